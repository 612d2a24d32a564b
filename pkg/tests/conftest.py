import pytest

from adlmon.activity_model import (
    AtomicActivity,
    ComplexActivityDefinition,
    ContextAttribute,
    eating_lunch,
)


def make_definition(a_t, core, weights=None, start=(0,), end=None, zone="kitchen", name="toy"):
    """Toy definition with atomics A1..An; ``core``/``start``/``end`` are 0-based indices."""
    end = (a_t - 1,) if end is None else end
    if weights is None:
        weights = [1.0 / a_t] * a_t
        weights[-1] = 1.0 - sum(weights[:-1])
    atomics, contexts = [], []
    for i in range(a_t):
        flags = dict(is_start=i in start, is_end=i in end, is_core=i in core)
        atomics.append(AtomicActivity(f"A{i + 1}", f"atomic {i + 1}", weights[i], **flags))
        contexts.append(ContextAttribute(f"C{i + 1}", f"context {i + 1}", weights[i],
                                         f"A{i + 1}", **flags))
    return ComplexActivityDefinition(name, zone, atomics, contexts)


@pytest.fixture
def lunch():
    return eating_lunch()


@pytest.fixture
def toy():
    return make_definition


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(RESULTS):
        ok, detail = RESULTS[criterion]
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
