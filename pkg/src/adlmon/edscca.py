"""Knowledge base of activity semantics and the four-branch emergency rule.

A trace is an ordered list of events.  An event records which atomic
activity was performed, on which context attribute, the wearer's behaviour at
that moment and the zone.  Behaviour-only snapshots (nothing performed) carry
``atomic_id=None``.

Given a semantic definition, ``edscca_decide`` checks whether the start pairs
and end pairs were observed:

* start and end seen  -> completed, no emergency (branch "iv")
* neither seen        -> nothing performed, no emergency (branch "vi")
* exactly one seen    -> branch "iii" (start only) or "v" (end only): the
  trace is an emergency when, from the anomaly point on, the wearer is found
  lying and performs no further atomic activity.

The anomaly point is the first event whose context does not match its
atomic's paired context; when every pair matches it is the last atomic event
(where the activity stalled).
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .activity_model import ComplexActivityDefinition
from .errors import ValidationError
from .zones import LYING, ZoneMap, behavior_compatible

BEHAVIOR_LABELS = ("lying", "standing", "sitting", "walking")


class Outcome(str, Enum):
    EMERGENCY = "Emergency"
    NON_EMERGENCY = "NonEmergency"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TraceEvent:
    atomic_id: Optional[str]
    context_id: Optional[str]
    behavior: str
    zone: str
    timestamp: int = 0

    def __post_init__(self):
        if self.behavior not in BEHAVIOR_LABELS:
            raise ValidationError(f"unknown behavior {self.behavior!r}")
        if (self.atomic_id is None) != (self.context_id is None):
            raise ValidationError("atomic_id and context_id must be given together")


@dataclass(frozen=True)
class ActivityTrace:
    events: tuple = ()
    zone: Optional[str] = None
    name: str = ""

    def __post_init__(self):
        events = tuple(self.events)
        ts = [e.timestamp for e in events]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValidationError(f"trace {self.name!r}: timestamps must be non-decreasing")
        object.__setattr__(self, "events", events)
        if self.zone is None and events:
            # dominant zone; ties resolved by first appearance
            counts = Counter(e.zone for e in events)
            top = max(counts.values())
            object.__setattr__(self, "zone", next(e.zone for e in events if counts[e.zone] == top))

    @property
    def atomic_events(self):
        return [e for e in self.events if e.atomic_id is not None]


@dataclass(frozen=True)
class SemanticDefinition:
    """The ten characteristic sets of one complex activity, bound to a zone."""

    name: str
    zone: str
    atomics: frozenset
    contexts: frozenset
    other_atomics: frozenset
    other_contexts: frozenset
    core_atomics: frozenset
    core_contexts: frozenset
    start_atomics: frozenset
    end_atomics: frozenset
    start_contexts: frozenset
    end_contexts: frozenset
    pairing: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not (self.core_atomics | self.start_atomics | self.end_atomics) <= self.atomics:
            raise ValidationError("start/end/core atomics must be a subset of atomics")
        if self.other_atomics != self.atomics - self.core_atomics:
            raise ValidationError("other atomics must equal atomics minus core atomics")
        if self.other_contexts != self.contexts - self.core_contexts:
            raise ValidationError("other contexts must equal contexts minus core contexts")

    @property
    def context_for(self):
        return dict(self.pairing)

    @property
    def key(self):
        return (self.start_atomics, self.start_contexts, self.zone)

    def start_pairs(self):
        ctx = self.context_for
        return {(a, ctx[a]) for a in self.start_atomics}

    def end_pairs(self):
        ctx = self.context_for
        return {(a, ctx[a]) for a in self.end_atomics}

    def to_dict(self):
        out = {"name": self.name, "zone": self.zone}
        for f in ("atomics", "contexts", "other_atomics", "other_contexts", "core_atomics",
                  "core_contexts", "start_atomics", "end_atomics", "start_contexts",
                  "end_contexts"):
            out[f] = sorted(getattr(self, f))
        out["pairing"] = dict(self.pairing)
        return out


def sdca_build(definition: ComplexActivityDefinition, trace: Optional[ActivityTrace] = None,
               ) -> SemanticDefinition:
    """Project a definition onto its ten characteristic sets.

    When a trace is supplied the result is bound to the zone the trace was
    observed in; otherwise to the definition's own zone.
    """
    atomics = frozenset(definition.atomic_ids)
    contexts = frozenset(c.id for c in definition.contexts)
    core_a = frozenset(a.id for a in definition.atomics if a.is_core)
    core_c = frozenset(c.id for c in definition.contexts if c.is_core)
    zone = trace.zone if trace is not None and trace.zone is not None else definition.zone
    return SemanticDefinition(
        name=definition.name, zone=zone,
        atomics=atomics, contexts=contexts,
        other_atomics=atomics - core_a, other_contexts=contexts - core_c,
        core_atomics=core_a, core_contexts=core_c,
        start_atomics=frozenset(a.id for a in definition.atomics if a.is_start),
        end_atomics=frozenset(a.id for a in definition.atomics if a.is_end),
        start_contexts=frozenset(c.id for c in definition.contexts if c.is_start),
        end_contexts=frozenset(c.id for c in definition.contexts if c.is_end),
        pairing=tuple(sorted(definition.context_for.items())),
    )


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable SDCA store keyed by (start atomics, start contexts, zone).

    ``kb_insert`` returns a new instance, so readers holding the old one never
    observe a half-applied update.
    """

    entries: tuple = ()

    def __post_init__(self):
        keys = [e.key for e in self.entries]
        if len(set(keys)) != len(keys):
            raise ValidationError("knowledge base keys must be unique")
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __contains__(self, sdca):
        return any(e.key == sdca.key for e in self.entries)

    @classmethod
    def from_definitions(cls, definitions):
        kb = cls()
        for d in definitions:
            kb = kb_insert(kb, sdca_build(d))
        return kb


def kb_insert(kb: KnowledgeBase, sdca: SemanticDefinition) -> KnowledgeBase:
    if sdca in kb:
        return kb
    return KnowledgeBase(kb.entries + (sdca,))


def match_start(kb: KnowledgeBase, trace: ActivityTrace) -> Optional[SemanticDefinition]:
    """Entry whose start pairs are exactly the trace's opening atomic events.

    For an entry with ``m`` start atomics, the first ``m`` atomic events of the
    trace (in order, context included) must be precisely its start pairs, and
    the entry must belong to the trace's zone.  Among several matches the one
    with the most start atomics wins, then insertion order.
    """
    observed = [(e.atomic_id, e.context_id) for e in trace.atomic_events]
    best = None
    for entry in kb.entries:
        if entry.zone != trace.zone:
            continue
        m = len(entry.start_atomics)
        head = observed[:m]
        if len(head) == m and set(head) == entry.start_pairs():
            if best is None or m > len(best.start_atomics):
                best = entry
    return best


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    branch: str
    reason: str
    confidences: Optional[dict] = None

    @property
    def is_emergency(self):
        return self.outcome is Outcome.EMERGENCY

    def to_dict(self):
        out = {"outcome": self.outcome.value, "branch": self.branch, "reason": self.reason}
        if self.confidences is not None:
            out["confidences"] = self.confidences
        return out


def _pairs_seen(pairs, events, require_all):
    seen = {(e.atomic_id, e.context_id) for e in events}
    hits = [p in seen for p in pairs]
    return all(hits) if require_all else any(hits)


def _anomaly_point(sdca, events):
    ctx = sdca.context_for
    last_atomic = None
    for i, e in enumerate(events):
        if e.atomic_id is None:
            continue
        if ctx[e.atomic_id] != e.context_id:
            return i
        last_atomic = i
    return last_atomic if last_atomic is not None else 0


def _stalled_lying(sdca, events):
    """True when the wearer lies down at/after the anomaly point and does nothing more."""
    start = _anomaly_point(sdca, events)
    for i in range(start, len(events)):
        if events[i].behavior == LYING:
            return all(e.atomic_id is None for e in events[i + 1:])
    return False


def edscca_decide(sdca: SemanticDefinition, trace: ActivityTrace, *,
                  require_all_start: bool = True) -> Verdict:
    """Classify a trace against one semantic definition (see module docstring)."""
    events = trace.events
    unknown = {e.atomic_id for e in events if e.atomic_id is not None} - sdca.atomics
    if unknown:
        raise ValidationError(f"trace {trace.name!r} references unknown atomics {sorted(unknown)}")
    start_ok = _pairs_seen(sdca.start_pairs(), events, require_all_start)
    end_ok = _pairs_seen(sdca.end_pairs(), events, True)

    if start_ok and end_ok:
        return Verdict(Outcome.NON_EMERGENCY, "iv", "activity completed, no emergency")
    if not start_ok and not end_ok:
        return Verdict(Outcome.NON_EMERGENCY, "vi", "no activity performed")
    branch = "iii" if start_ok else "v"
    what = "started but not finished" if start_ok else "finished without a start"
    if _stalled_lying(sdca, events):
        return Verdict(Outcome.EMERGENCY, branch,
                       f"activity {what}; lying with no further atomic activity")
    return Verdict(Outcome.NON_EMERGENCY, branch,
                   f"activity {what}; wearer still active or not lying")


def _terminal_lie(trace):
    """(zone, duration) of the trailing run of lying events, or None."""
    events = trace.events
    if not events or events[-1].behavior != LYING:
        return None
    i = len(events) - 1
    while i > 0 and events[i - 1].behavior == LYING and events[i - 1].zone == events[-1].zone:
        i -= 1
    return events[-1].zone, events[-1].timestamp - events[i].timestamp


def zone_rule(zmap: ZoneMap, trace: ActivityTrace) -> Verdict:
    """Lying, not getting up again, in a zone where lying is abnormal."""
    lie = _terminal_lie(trace)
    if lie is None:
        return Verdict(Outcome.NON_EMERGENCY, "zone", "trace does not end lying down")
    zone, duration = lie
    if behavior_compatible(zmap, zone, LYING, duration=duration):
        return Verdict(Outcome.NON_EMERGENCY, "zone", f"lying is normal in {zone}")
    return Verdict(Outcome.EMERGENCY, "zone", f"lying and not getting up in {zone}")


def nearest_definition(definitions, trace):
    """Definition sharing the most start atomics with the trace's atomics, if any."""
    seen = {e.atomic_id for e in trace.atomic_events}
    best, best_overlap = None, 0
    for d in definitions:
        overlap = len(d.start_ids & seen)
        if overlap > best_overlap:
            best, best_overlap = d, overlap
    return best


def observe(kb: KnowledgeBase, trace: ActivityTrace, definitions=()) -> KnowledgeBase:
    """Learn an SDCA for an unmatched trace from the closest known definition."""
    d = nearest_definition(definitions, trace)
    if d is None:
        return kb
    return kb_insert(kb, sdca_build(d, trace))


def classify_trace(kb: KnowledgeBase, zmap: ZoneMap, trace: ActivityTrace, *,
                   require_all_start: bool = True) -> Verdict:
    """Run EDSCCA when the trace's start matches the knowledge base, else the zone rule."""
    sdca = match_start(kb, trace)
    if sdca is not None:
        return edscca_decide(sdca, trace, require_all_start=require_all_start)
    return zone_rule(zmap, trace)


# -- interchange format -----------------------------------------------------

def trace_to_dict(trace: ActivityTrace) -> dict:
    return {
        "name": trace.name,
        "zone": trace.zone,
        "events": [
            {"atomic": e.atomic_id, "context": e.context_id, "behavior": e.behavior,
             "zone": e.zone, "timestamp": e.timestamp}
            for e in trace.events
        ],
    }


def trace_from_dict(data: dict) -> ActivityTrace:
    try:
        events = [
            TraceEvent(atomic_id=e.get("atomic"), context_id=e.get("context"),
                       behavior=e["behavior"], zone=e.get("zone", data.get("zone")),
                       timestamp=int(e.get("timestamp", 0)))
            for e in data.get("events", [])
        ]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed trace event: {exc}") from None
    for e in events:
        if e.zone is None:
            raise ValidationError("trace event without zone")
    return ActivityTrace(events, zone=data.get("zone"), name=str(data.get("name", "")))


def dump_traces(traces) -> str:
    return json.dumps({"traces": [trace_to_dict(t) for t in traces]}, indent=2) + "\n"


def load_traces(path) -> list:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        return []
    data = json.loads(text)
    if isinstance(data, dict):
        data = data.get("traces", [])
    return [trace_from_dict(t) for t in data]
