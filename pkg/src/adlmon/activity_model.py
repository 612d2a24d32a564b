"""Complex activities as weighted atomic-activity / context-attribute structures.

A complex activity is a list of atomic activities, each performed on exactly
one context attribute.  Some atomics are marked core (the activity cannot be
completed without them), some start, some end.  An *instance* of the activity
is the subset of atomics the user actually performed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .errors import CapacityError, ValidationError

MAX_COUNT_ATOMICS = 62
MAX_ENUM_ATOMICS = 20
N_JOINTS = 20
WEIGHT_SUM_TOL = 1e-9

# Kinect skeleton joint numbering (reference data only).
JOINT_NAMES = {
    1: "Center of Hip", 2: "Spine", 3: "Center of Shoulder", 4: "Head",
    5: "Left Shoulder", 6: "Left Elbow", 7: "Left Wrist", 8: "Left Hand",
    9: "Right Shoulder", 10: "Right Elbow", 11: "Right Wrist", 12: "Right Hand",
    13: "Left Hip", 14: "Left Knee", 15: "Left Ankle", 16: "Left Foot",
    17: "Right Hip", 18: "Right Knee", 19: "Right Ankle", 20: "Right Foot",
}


@dataclass(frozen=True)
class AtomicActivity:
    id: str
    label: str
    weight: float
    is_start: bool = False
    is_end: bool = False
    is_core: bool = False
    joint_pairs: tuple = ()

    def __post_init__(self):
        if not (0.0 < self.weight <= 1.0):
            raise ValidationError(f"atomic {self.id!r}: weight {self.weight} not in (0, 1]")
        pairs = tuple(tuple(int(j) for j in p) for p in self.joint_pairs)
        for pair in pairs:
            if len(pair) != 2 or not all(1 <= j <= N_JOINTS for j in pair):
                raise ValidationError(f"atomic {self.id!r}: bad joint pair {pair}")
        object.__setattr__(self, "joint_pairs", pairs)


@dataclass(frozen=True)
class ContextAttribute:
    """Context attribute; marker flags mirror those of the paired atomic."""

    id: str
    label: str
    weight: float
    paired_atomic: str
    is_start: bool = False
    is_end: bool = False
    is_core: bool = False

    def __post_init__(self):
        if not (0.0 < self.weight <= 1.0):
            raise ValidationError(f"context {self.id!r}: weight {self.weight} not in (0, 1]")


@dataclass(frozen=True)
class InstanceCountSummary:
    alpha: int
    beta: int
    gamma: int
    a_t: int
    b_t: int
    c_t: int
    d_t: int

    def __str__(self):
        return (f"alpha={self.alpha} beta={self.beta} gamma={self.gamma}\n"
                f"a_t={self.a_t} b_t={self.b_t} c_t={self.c_t} d_t={self.d_t}")


@dataclass(frozen=True)
class ActivityInstance:
    performed: tuple
    instance_weight: float
    goal_reached: bool


@dataclass(frozen=True)
class ComplexActivityDefinition:
    name: str
    zone: str
    atomics: tuple
    contexts: tuple
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "atomics", tuple(self.atomics))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        self._validate()
        object.__setattr__(self, "_by_id", {a.id: a for a in self.atomics})

    def _validate(self):
        atomics, contexts = self.atomics, self.contexts
        if not atomics:
            raise ValidationError(f"{self.name!r}: at least one atomic activity required")
        ids = [a.id for a in atomics]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"{self.name!r}: duplicate atomic ids")
        if len(contexts) != len(atomics):
            raise ValidationError(
                f"{self.name!r}: {len(contexts)} contexts for {len(atomics)} atomics "
                "(pairing must be one-to-one)")
        ctx_ids = [c.id for c in contexts]
        if len(set(ctx_ids)) != len(ctx_ids):
            raise ValidationError(f"{self.name!r}: duplicate context ids")
        by_id = {a.id: a for a in atomics}
        paired = [c.paired_atomic for c in contexts]
        if sorted(paired) != sorted(ids):
            raise ValidationError(f"{self.name!r}: every atomic must pair with exactly one context")
        for c in contexts:
            a = by_id[c.paired_atomic]
            if (c.is_start, c.is_end, c.is_core) != (a.is_start, a.is_end, a.is_core):
                raise ValidationError(f"context {c.id!r}: marker flags differ from atomic {a.id!r}")
        if not any(a.is_core for a in atomics):
            raise ValidationError(f"{self.name!r}: at least one core atomic required")
        if not any(a.is_start for a in atomics):
            raise ValidationError(f"{self.name!r}: at least one start atomic required")
        if not any(a.is_end for a in atomics):
            raise ValidationError(f"{self.name!r}: at least one end atomic required")
        total = math.fsum(a.weight for a in atomics)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"{self.name!r}: atomic weights sum to {total!r}, expected 1")

    @property
    def atomic_ids(self):
        return tuple(a.id for a in self.atomics)

    @property
    def core_ids(self):
        return frozenset(a.id for a in self.atomics if a.is_core)

    @property
    def start_ids(self):
        return frozenset(a.id for a in self.atomics if a.is_start)

    @property
    def end_ids(self):
        return frozenset(a.id for a in self.atomics if a.is_end)

    @property
    def context_for(self):
        """Mapping atomic id -> paired context id."""
        return {c.paired_atomic: c.id for c in self.contexts}

    def atomic(self, atomic_id):
        return self._by_id[atomic_id]

    # a_t, b_t, c_t, d_t
    @property
    def a_t(self):
        return len(self.atomics)

    @property
    def b_t(self):
        return len(self.contexts)

    @property
    def c_t(self):
        return sum(a.is_core for a in self.atomics)

    @property
    def d_t(self):
        return sum(c.is_core for c in self.contexts)


def _check_counts(a_t, c_t):
    if a_t < 1:
        raise ValidationError("a_t must be >= 1")
    if not (0 <= c_t <= a_t):
        raise ValidationError(f"c_t={c_t} must lie in [0, a_t={a_t}]")
    if a_t > MAX_COUNT_ATOMICS:
        raise CapacityError(f"a_t={a_t} exceeds {MAX_COUNT_ATOMICS}; counts would overflow 64-bit")


def alpha_from_counts(a_t):
    _check_counts(a_t, 0)
    return 1 << a_t


def beta_from_counts(a_t, c_t):
    _check_counts(a_t, c_t)
    return 1 << (a_t - c_t)


def gamma_from_counts(a_t, c_t):
    _check_counts(a_t, c_t)
    return (1 << (a_t - c_t)) * ((1 << c_t) - 1)


def alpha_count(definition: ComplexActivityDefinition) -> int:
    """Number of ways to perform the activity, false starts included (2**a_t)."""
    return alpha_from_counts(definition.a_t)


def beta_count(definition: ComplexActivityDefinition) -> int:
    """Number of instances that contain every core atomic."""
    return beta_from_counts(definition.a_t, definition.c_t)


def gamma_count(definition: ComplexActivityDefinition) -> int:
    """Number of instances missing at least one core atomic."""
    return gamma_from_counts(definition.a_t, definition.c_t)


def instance_counts(definition):
    return InstanceCountSummary(
        alpha=alpha_count(definition), beta=beta_count(definition),
        gamma=gamma_count(definition), a_t=definition.a_t, b_t=definition.b_t,
        c_t=definition.c_t, d_t=definition.d_t)


def _check_subset(definition, performed):
    performed = frozenset(performed)
    unknown = performed.difference(definition.atomic_ids)
    if unknown:
        raise ValidationError(f"unknown atomic ids: {sorted(unknown)}")
    return performed


def instance_weight(definition, performed: Iterable[str]) -> float:
    performed = _check_subset(definition, performed)
    return math.fsum(a.weight for a in definition.atomics if a.id in performed)


def threshold_weight(definition) -> float:
    """Weight bar for a properly performed instance: the summed core weights."""
    return math.fsum(a.weight for a in definition.atomics if a.is_core)


def goal_reached(definition, performed: Iterable[str]) -> bool:
    performed = _check_subset(definition, performed)
    return definition.core_ids <= performed


def enumerate_instances(definition) -> list:
    """All 2**a_t instances, ordered by binary counting over the atomics list.

    Bit ``j`` of the instance index set means ``definition.atomics[j]`` was
    performed, so index 0 is the empty instance and the last is the full one.
    """
    a_t = definition.a_t
    if a_t > MAX_ENUM_ATOMICS:
        raise CapacityError(f"a_t={a_t} exceeds enumeration cap {MAX_ENUM_ATOMICS}")
    atomics = definition.atomics
    core_mask = sum(1 << j for j, a in enumerate(atomics) if a.is_core)
    out = []
    for idx in range(1 << a_t):
        chosen = [a for j, a in enumerate(atomics) if idx >> j & 1]
        out.append(ActivityInstance(
            performed=tuple(a.id for a in chosen),
            instance_weight=math.fsum(a.weight for a in chosen),
            goal_reached=(idx & core_mask) == core_mask,
        ))
    return out


# -- interchange format -----------------------------------------------------

def definition_from_dict(data: dict) -> ComplexActivityDefinition:
    try:
        atomics = [
            AtomicActivity(
                id=str(a["id"]), label=str(a.get("label", a["id"])),
                weight=float(a["weight"]),
                is_start=bool(a.get("start", False)), is_end=bool(a.get("end", False)),
                is_core=bool(a.get("core", False)),
                joint_pairs=tuple(tuple(p) for p in a.get("joint_pairs", ())),
            )
            for a in data["atomics"]
        ]
        by_id = {a.id: a for a in atomics}
        contexts = []
        for c in data["contexts"]:
            paired = str(c["paired_atomic"])
            if paired not in by_id:
                raise ValidationError(f"context {c['id']!r} pairs with unknown atomic {paired!r}")
            a = by_id[paired]
            contexts.append(ContextAttribute(
                id=str(c["id"]), label=str(c.get("label", c["id"])),
                weight=float(c.get("weight", a.weight)), paired_atomic=paired,
                is_start=a.is_start, is_end=a.is_end, is_core=a.is_core,
            ))
        return ComplexActivityDefinition(
            name=str(data["name"]), zone=str(data["zone"]),
            atomics=atomics, contexts=contexts)
    except KeyError as exc:
        raise ValidationError(f"activity definition missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed activity definition: {exc}") from None


def definition_to_dict(definition) -> dict:
    return {
        "name": definition.name,
        "zone": definition.zone,
        "atomics": [
            {"id": a.id, "label": a.label, "weight": a.weight, "start": a.is_start,
             "end": a.is_end, "core": a.is_core,
             "joint_pairs": [list(p) for p in a.joint_pairs]}
            for a in definition.atomics
        ],
        "contexts": [
            {"id": c.id, "label": c.label, "paired_atomic": c.paired_atomic}
            for c in definition.contexts
        ],
    }


def load_definitions(path) -> list:
    """Read one definition (object) or several (list) from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "definitions" in data:
        data = data["definitions"]
    if isinstance(data, dict):
        data = [data]
    return [definition_from_dict(d) for d in data]


def load_definition(path) -> ComplexActivityDefinition:
    defs = load_definitions(path)
    if len(defs) != 1:
        raise ValidationError(f"{path}: expected one definition, found {len(defs)}")
    return defs[0]


def builtin_definition_path(name: str = "eating_lunch") -> Path:
    return Path(str(resources.files("adlmon") / "data" / f"{name}.json"))


def eating_lunch(zone: Optional[str] = None) -> ComplexActivityDefinition:
    """The bundled six-atomic eating-lunch definition."""
    d = load_definition(builtin_definition_path("eating_lunch"))
    if zone is not None and zone != d.zone:
        d = ComplexActivityDefinition(d.name, zone, d.atomics, d.contexts)
    return d
