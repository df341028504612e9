"""Shared fixtures.

Heavy objects (classical paths, JIT-compiled integrator) are built once per
session; individual tests treat them as immutable.
"""

import numpy as np
import pytest

from instanton import potentials, trajectory


@pytest.fixture(scope="session")
def qdw():
    return potentials.QuarticDoubleWell()


@pytest.fixture(scope="session")
def kink_path(qdw):
    return trajectory.solve_path(qdw, (-0.5, 0.5))


@pytest.fixture(scope="session")
def bounce_path_half():
    """Negative-quartic bounce at g = -0.5 (turning point at x = 2)."""
    model = potentials.PolyBounce(2, -0.5)
    sigma = potentials.exit_point(model, 0.0)
    return model, trajectory.solve_path(model, (0.0, sigma))


@pytest.fixture(scope="session")
def sine_gordon_path():
    model = potentials.PeriodicCosine(e_j=1.0, e_c=0.02)
    return model, trajectory.solve_path(model, (0.0, 2.0 * np.pi))


@pytest.fixture(scope="session", autouse=True)
def _integrator_warmup():
    """Trigger JIT compilation of the shooting kernels once, outside any
    timed assertion (compilation cost is a per-environment constant, not a
    per-run cost; the kernels are disk-cached afterwards)."""
    from instanton import determinants

    determinants.warmup()
    yield
