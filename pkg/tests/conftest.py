import numpy as np
import pytest

from hjbplan import DomainMask, Grid2D, Problem, ScalarField, build_problem

UNIT_SCENARIOS = ["example1", "example2", "example3", "example4", "example5"]
ALL_SCENARIOS = UNIT_SCENARIOS + ["terrain"]


@pytest.fixture(scope="session")
def unit_grid():
    return Grid2D(100, 100)


@pytest.fixture(scope="session")
def unit_mask(unit_grid):
    return DomainMask.full_interior(unit_grid)


@pytest.fixture(scope="session")
def ones(unit_grid):
    return ScalarField.constant(unit_grid, 1.0)


@pytest.fixture(scope="session")
def problems_101():
    """Every built-in scenario evaluated on a ~101-gridpoint lattice."""
    return {name: build_problem(name, 101) for name in ALL_SCENARIOS}


def banded_problem(grid, mask, E=2.0):
    """Square-domain problem with the depth-banded detection rate."""
    from hjbplan import normalize_budget

    X, Y = grid.meshgrid()
    d = np.minimum(np.minimum(X, 1 - X), np.minimum(Y, 1 - Y))
    shape = ScalarField(grid, 1.0 / (50.0 * (d - 0.3) ** 2 + 0.5))
    return Problem(
        grid=grid,
        mask=mask,
        B=ScalarField.constant(grid, 2.0),
        psi=normalize_budget(shape, mask, E),
        f=ScalarField.constant(grid, 1.0),
        K=ScalarField.constant(grid, 1.0),
    )
