import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=["cython", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend by swapping the dispatch table."""
    from endoconj import _kernels_py, kernels

    if request.param == "python":
        for name in ("mul_trunc", "power_table", "eval_monomials"):
            monkeypatch.setattr(kernels, name, getattr(_kernels_py, name))
    elif kernels.BACKEND != "cython":
        pytest.skip("compiled backend disabled or not built")
    return request.param


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
