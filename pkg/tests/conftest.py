import pytest
from hypothesis import strategies as st

from podfeedback.model import MICRO, make_instance, zero_vcg_instance

_acceptance = []


@pytest.fixture
def zvcg():
    return zero_vcg_instance()


@pytest.fixture
def zvcg_units():
    """The three-ad example with amounts in whole micro-units (10 each)."""
    return zero_vcg_instance(unit=1)


def single_item(bids, values=None):
    values = values or bids
    return make_instance(1, 30, [(str(i + 1), 15, v, b) for i, (v, b) in enumerate(zip(values, bids))])


@st.composite
def small_instances(draw):
    m = draw(st.integers(1, 3))
    n = draw(st.integers(1, 6))
    durs = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    max_dur = draw(st.integers(max(durs), sum(durs)))
    agents = []
    for k, d in enumerate(durs):
        value = draw(st.lists(st.integers(0, 9), min_size=m, max_size=m))
        value[0] += 1
        bid = [draw(st.integers(0, v)) for v in value]
        agents.append((str(k), d, value, bid))
    pairs = [(str(a), str(b)) for a in range(n) for b in range(a + 1, n) if draw(st.booleans()) and draw(st.booleans())]
    return make_instance(m, max_dur, agents, max_ads=draw(st.integers(1, m)), exclusions=pairs)


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        _acceptance.append(report)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for rep in _acceptance:
        props = dict(rep.user_properties)
        label = props.get("criterion", rep.nodeid.split("::")[-1])
        status = "PASS" if rep.passed else "FAIL"
        detail = props.get("detail", "")
        terminalreporter.write_line(f"[{status}] {label}  {detail}")


__all__ = ["MICRO", "single_item", "small_instances"]
