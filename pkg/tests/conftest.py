import numpy as np
import pytest

from landalloc.model import LandUse, Plot, ProblemInstance

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def tiny1() -> ProblemInstance:
    """Two plots, two uses, symmetric neighborhood; 16 possible allocations.

    The as-built map is u_0 = [0, 1], u_1 = [0, 0]; compatibility of the
    as-built map is 10000 and its price is 45.
    """
    plots = [
        Plot(0, 2, 100.0, (1,), False, (0, 1)),
        Plot(1, 2, 200.0, (0,), False, (0, 0)),
    ]
    uses = [LandUse(0, "residential"), LandUse(1, "commercial")]
    compat = np.array([[1.0, -0.5], [-0.5, 1.0]])
    price = np.array([[10.0, 20.0], [30.0, 15.0]])
    return ProblemInstance(
        plots, uses, compat, price, gamma=0.3, mu=0.2, price_min=40.0, price_max=50.0
    )


@pytest.fixture
def small_synthetic():
    from landalloc.instance_io import GeneratorSpec, generate_synthetic

    return generate_synthetic(
        GeneratorSpec(
            grid_width=4, grid_height=3, use_count=3, floor_range=(1, 3),
            locked_fraction=0.15, rng_seed=9,
        )
    )
