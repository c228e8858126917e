import pytest

from hdlingam.sparse import kkt_monitor

KKT_LIMIT = 1e-6


@pytest.fixture(scope="session", autouse=True)
def session_kkt():
    """Worst KKT residual over every in-process solve of the whole run."""
    with kkt_monitor() as mon:
        yield mon


@pytest.fixture(autouse=True)
def kkt_guard():
    """Every lasso-type solve made in-process during a test must satisfy KKT."""
    with kkt_monitor() as mon:
        yield mon
    assert mon.worst < KKT_LIMIT, f"KKT residual {mon.worst:.3g} over {mon.calls} solves"
