"""Spatial zones and the zone/behaviour compatibility rule."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ValidationError

LYING = "lying"
DEFAULT_REST_ZONES = ("bedroom",)
DEFAULT_ZONES = ("kitchen", "bedroom", "office", "toilet")


@dataclass(frozen=True)
class Zone:
    name: str
    allowed_activities: frozenset = frozenset()
    allowed_behaviors: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "allowed_activities", frozenset(self.allowed_activities))
        object.__setattr__(self, "allowed_behaviors", frozenset(self.allowed_behaviors))


@dataclass(frozen=True)
class ZoneMap:
    """Named zones plus the subset where lying down is normal.

    ``min_lie_duration`` (seconds, or whatever unit trace timestamps use)
    turns the emergency rule into a long-lie rule when positive.
    """

    zones: tuple = ()
    bedroom_equivalent: frozenset = frozenset()
    min_lie_duration: float = 0.0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        zones = tuple(sorted(self.zones, key=lambda z: z.name))
        names = [z.name for z in zones]
        if len(set(names)) != len(names):
            raise ValidationError("zone names must be unique")
        rest = frozenset(self.bedroom_equivalent)
        if not rest <= set(names):
            raise ValidationError(f"bedroom_equivalent zones not in map: {sorted(rest - set(names))}")
        if self.min_lie_duration < 0:
            raise ValidationError("min_lie_duration must be >= 0")
        object.__setattr__(self, "zones", zones)
        object.__setattr__(self, "bedroom_equivalent", rest)
        object.__setattr__(self, "_index", {z.name: z for z in zones})

    @property
    def names(self):
        return tuple(self._index)

    def __contains__(self, name):
        return name in self._index

    def __getitem__(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown zone {name!r}") from None

    def __len__(self):
        return len(self.zones)

    @classmethod
    def default(cls, min_lie_duration=0.0):
        """The four zones of the reference home, bedroom as the only rest zone."""
        return cls(zones=tuple(Zone(n) for n in DEFAULT_ZONES),
                   bedroom_equivalent=frozenset(DEFAULT_REST_ZONES),
                   min_lie_duration=min_lie_duration)

    def with_min_lie_duration(self, seconds):
        return ZoneMap(self.zones, self.bedroom_equivalent, seconds)

    def to_dict(self):
        return {
            "zones": [
                {"name": z.name,
                 "allowed_activities": sorted(z.allowed_activities),
                 "allowed_behaviors": sorted(z.allowed_behaviors)}
                for z in self.zones
            ],
            "bedroom_equivalent": sorted(self.bedroom_equivalent),
            "min_lie_duration": self.min_lie_duration,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            zones = tuple(
                Zone(str(z["name"]), z.get("allowed_activities", ()), z.get("allowed_behaviors", ()))
                for z in data["zones"]
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed zone map: {exc}") from None
        return cls(zones, frozenset(data.get("bedroom_equivalent", ())),
                   float(data.get("min_lie_duration", 0.0)))


def load_zone_map(path) -> ZoneMap:
    with open(path, encoding="utf-8") as fh:
        return ZoneMap.from_dict(json.load(fh))


def save_zone_map(zmap, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(zmap.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def zones_from_dataset(records, rest_zones=DEFAULT_REST_ZONES, min_lie_duration=0.0) -> ZoneMap:
    """Build one zone per distinct zone label seen in ``records``.

    Allowed activities and behaviours are the ground-truth labels observed in
    each zone.  Zones named in ``rest_zones`` that occur in the data become
    bedroom-equivalent.
    """
    acts, behs = {}, {}
    for r in records:
        acts.setdefault(r.zone, set())
        behs.setdefault(r.zone, set())
        if r.activity is not None:
            acts[r.zone].add(r.activity)
        if r.behavior is not None:
            behs[r.zone].add(r.behavior)
    zones = tuple(Zone(name, acts[name], behs[name]) for name in acts)
    rest = frozenset(rest_zones) & set(acts)
    return ZoneMap(zones, rest, min_lie_duration)


def behavior_compatible(zmap: ZoneMap, zone: str, behavior: str, *,
                        duration=None, use_allowed=False) -> bool:
    """Is ``behavior`` acceptable in ``zone``?

    Default rule: only lying outside a bedroom-equivalent zone is
    incompatible.  With a positive ``zmap.min_lie_duration`` the lie must also
    have lasted at least that long (unknown duration counts as zero).  With
    ``use_allowed=True`` the zone's explicit ``allowed_behaviors`` decide.
    """
    z = zmap[zone]
    if use_allowed:
        return behavior in z.allowed_behaviors
    if behavior != LYING or zone in zmap.bedroom_equivalent:
        return True
    if zmap.min_lie_duration > 0:
        return (duration or 0.0) < zmap.min_lie_duration
    return False
