import numpy as np
import pytest

from diracmech import (
    CanonicalDirac,
    Chart,
    LinearConstraint,
    PiGraphDirac,
    Section,
    SkewAlgebroid,
    induce,
)
from diracmech.systems import (
    rolling_disc_algebroid,
    rolling_disc_hamiltonian,
    rolling_disc_lagrangian,
    so3_algebroid,
)


@pytest.fixture
def disc():
    return rolling_disc_algebroid()


@pytest.fixture
def disc_pi(disc):
    return PiGraphDirac(disc)


@pytest.fixture
def disc_induced(disc_pi):
    return induce(disc_pi, LinearConstraint(fiber=(2, 3)))


@pytest.fixture
def disc_lagrangian():
    return rolling_disc_lagrangian()


@pytest.fixture
def disc_hamiltonian():
    return rolling_disc_hamiltonian()


@pytest.fixture
def so3():
    return so3_algebroid()


@pytest.fixture
def canonical1():
    return CanonicalDirac(1)


def make_random_pigraph(seed=0, base_dim=2, fiber_dim=3):
    """Smooth random algebroid: trigonometric anchor and structure fields."""
    rng = np.random.default_rng(seed)
    a_coef = rng.normal(size=(base_dim, fiber_dim))
    a_freq = rng.normal(size=(base_dim, fiber_dim, base_dim))
    c_coef = rng.normal(size=(fiber_dim, fiber_dim, fiber_dim))
    c_freq = rng.normal(size=(fiber_dim, fiber_dim, fiber_dim, base_dim))

    def anchor(x):
        return a_coef * np.sin(a_freq @ x + 1.0)

    def structure(x):
        raw = c_coef * np.cos(c_freq @ x)
        return raw - np.swapaxes(raw, 0, 1)

    chart = Chart(base_dim, fiber_dim)
    return SkewAlgebroid(chart, anchor, structure, name=f"random{seed}")


@pytest.fixture
def random_pigraph():
    return PiGraphDirac(make_random_pigraph(seed=42))


def smooth_section(seed, fiber_dim, base_dim):
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=(fiber_dim,))
    freq = rng.normal(size=(fiber_dim, base_dim))
    shift = rng.normal(size=(fiber_dim,))

    def fn(x):
        return coef * np.sin(freq @ x + shift)

    def jac(x):
        return (coef * np.cos(freq @ x + shift))[:, None] * freq

    return Section(fn, jacobian=jac, name=f"smooth{seed}")
