"""Shared fixtures and generators for the test suite."""

import numpy as np
import pytest

from groundstate import build_torus_grid, icosphere, make_potential

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def circle256():
    return build_torus_grid(1, TWO_PI, 256)


@pytest.fixture(scope="session")
def circle128():
    return build_torus_grid(1, TWO_PI, 128)


@pytest.fixture(scope="session")
def circle64():
    return build_torus_grid(1, TWO_PI, 64)


@pytest.fixture(scope="session")
def torus2_16():
    return build_torus_grid(2, (TWO_PI, TWO_PI), 16)


@pytest.fixture(scope="session")
def sphere1():
    return icosphere(1.0, 1)


@pytest.fixture(scope="session")
def sphere3():
    return icosphere(1.0, 3)


@pytest.fixture(scope="session")
def vcos01_256(circle256):
    return make_potential(circle256, "cos+0.1")


@pytest.fixture(scope="session")
def vcos01_128(circle128):
    return make_potential(circle128, "cos+0.1")


def random_admissible_trig(m, rng, n_modes=3):
    """Random sign-changing positive-average trig potential on a torus grid.

    The oscillatory part has exact zero discrete mean (pure nonzero
    frequencies on a uniform periodic grid), is normalized to sup 1, and is
    lifted by a small positive constant, so admissibility holds by
    construction.
    """
    lengths = np.asarray(m.descriptor["lengths"], dtype=float)
    angles = m.coordinates * (TWO_PI / lengths)
    wave = np.zeros(m.n_vertices)
    for _ in range(n_modes):
        freq = rng.integers(1, 4, size=m.dimension)
        if not np.any(freq):
            freq[0] = 1
        phase = angles @ freq.astype(float)
        wave += rng.normal() * np.cos(phase) + rng.normal() * np.sin(phase)
    wave /= np.max(np.abs(wave))
    shift = rng.uniform(0.05, 0.45)
    v = make_potential(m, wave + shift)
    assert v.condition_report.admissible
    return v
