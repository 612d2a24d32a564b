"""Synthetic activity traces and an independent expected-verdict oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .activity_model import MAX_ENUM_ATOMICS, enumerate_instances
from .edscca import ActivityTrace, Outcome, TraceEvent, Verdict
from .errors import CapacityError, ValidationError

POLICIES = ("all", "random")


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    subset_policy: str = "all"
    n: int = 10
    behavior_tail: Optional[str] = "lying"
    mismatch_rate: float = 0.0
    event_behavior: str = "standing"
    time_step: int = 1

    def __post_init__(self):
        if self.subset_policy not in POLICIES:
            raise ValidationError(f"subset_policy must be one of {POLICIES}")
        if not 0.0 <= self.mismatch_rate <= 1.0:
            raise ValidationError("mismatch_rate must lie in [0, 1]")
        if self.n < 0:
            raise ValidationError("n must be >= 0")


def _trace_for(definition, performed, config, rng, name):
    ctx = definition.context_for
    all_ctx = [c.id for c in definition.contexts]
    events = []
    t = 0
    for atomic_id in performed:
        context = ctx[atomic_id]
        if config.mismatch_rate and len(all_ctx) > 1 and rng.random() < config.mismatch_rate:
            others = [c for c in all_ctx if c != context]
            context = others[int(rng.integers(len(others)))]
        events.append(TraceEvent(atomic_id, context, config.event_behavior, definition.zone, t))
        t += config.time_step
    if events and config.behavior_tail is not None:
        events.append(TraceEvent(None, None, config.behavior_tail, definition.zone, t))
    return ActivityTrace(tuple(events), zone=definition.zone, name=name)


def generate(definition, config: SimConfig = SimConfig()) -> list:
    """Traces for the definition's performed-subsets.

    ``subset_policy="all"`` yields one trace per subset in enumeration order;
    ``"random"`` draws ``config.n`` subsets uniformly with replacement.  Events
    follow the definition's atomic order; a behaviour-only tail event is
    appended to every non-empty trace.
    """
    if definition.a_t > MAX_ENUM_ATOMICS:
        raise CapacityError(f"a_t={definition.a_t} exceeds enumeration cap")
    rng = np.random.default_rng(config.seed)
    instances = enumerate_instances(definition)
    if config.subset_policy == "all":
        chosen = list(enumerate(instances))
    else:
        picks = rng.integers(len(instances), size=config.n)
        chosen = [(int(i), instances[int(i)]) for i in picks]
    return [_trace_for(definition, inst.performed, config, rng, f"instance-{idx:05d}")
            for idx, inst in chosen]


def label_trace(definition, trace) -> Verdict:
    """Expected verdict by direct scan of the trace against the definition.

    Written without reference to the engine: it walks the events once,
    tracking which start/end pairs were seen, where the first
    context mismatch occurred and what happened after the first lie.
    """
    pair_of = {c.paired_atomic: c.id for c in definition.contexts}
    starts = {(a.id, pair_of[a.id]) for a in definition.atomics if a.is_start}
    ends = {(a.id, pair_of[a.id]) for a in definition.atomics if a.is_end}

    seen = set()
    first_mismatch = None
    last_atomic = None
    for pos, ev in enumerate(trace.events):
        if ev.atomic_id is None:
            continue
        seen.add((ev.atomic_id, ev.context_id))
        if first_mismatch is None and pair_of[ev.atomic_id] != ev.context_id:
            first_mismatch = pos
        last_atomic = pos

    start_ok = starts <= seen
    end_ok = ends <= seen
    if start_ok == end_ok:
        return Verdict(Outcome.NON_EMERGENCY, "iv" if start_ok else "vi", "oracle")

    branch = "iii" if start_ok else "v"
    onset = first_mismatch if first_mismatch is not None else (last_atomic or 0)
    lie_at = next((p for p in range(onset, len(trace.events))
                   if trace.events[p].behavior == "lying"), None)
    if lie_at is not None and not any(ev.atomic_id for ev in trace.events[lie_at + 1:]):
        return Verdict(Outcome.EMERGENCY, branch, "oracle")
    return Verdict(Outcome.NON_EMERGENCY, branch, "oracle")
