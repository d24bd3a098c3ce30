import numpy as np
import pytest

from tailcs.solvers import kernel

TOY_A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])


@pytest.fixture
def toy():
    return TOY_A.copy(), np.array([1.0, 1.0])


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    """Run a test against each splitting-kernel implementation."""
    if request.param == "compiled":
        if kernel.compiled_admm_steps is None:
            pytest.skip("compiled kernel not built")
        monkeypatch.setattr(kernel, "admm_steps", kernel.compiled_admm_steps)
    else:
        monkeypatch.setattr(kernel, "admm_steps", kernel.python_admm_steps)
    return request.param


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """``{criterion: [(passed, detail), ...]}`` collected across the acceptance suite."""
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(log, key=lambda k: int(k)):
        parts = log[key]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
