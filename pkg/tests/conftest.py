import math

import numpy as np
import pytest

from hypercone import Arc, IfsSystem, Mat2, Multicone


@pytest.fixture
def oracle_system() -> IfsSystem:
    """Triangular pair whose Moebius chart is the self-similar pair {x/4, x/4 + 1/4}.

    Exact attractor dimension 1/2; attractor angles in [atan 3, pi/2].
    """
    return IfsSystem.from_matrices(
        [
            ("1", [[0.5, 0.0], [0.0, 2.0]]),
            ("2", [[0.5, 0.5], [0.0, 2.0]]),
        ]
    )


@pytest.fixture
def oracle_multicone() -> Multicone:
    return Multicone((Arc(1.19, 1.63 - 1.19),))


@pytest.fixture
def inverse_pair() -> IfsSystem:
    """diag(2, 1/2) and its inverse; the semigroup contains the identity."""
    return IfsSystem.from_matrices(
        [
            ("1", [[2.0, 0.0], [0.0, 0.5]]),
            ("2", [[0.5, 0.0], [0.0, 2.0]]),
        ]
    )


@pytest.fixture
def rotation_system() -> IfsSystem:
    return IfsSystem.from_matrices([("1", Mat2.rotation(1.0))])


@pytest.fixture
def five_map_system() -> IfsSystem:
    """Five chart maps x/4 + c_k; Hutchinson exponent log5/log4 > 1."""
    mats = []
    for k, c in enumerate((0.0, 3 / 16, 6 / 16, 9 / 16, 12 / 16)):
        mats.append((str(k + 1), [[0.5, 2.0 * c], [0.0, 2.0]]))
    return IfsSystem.from_matrices(mats)


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> Mat2:
    """Random determinant-one matrix, rejection-sampled away from singularity."""
    while True:
        m = rng.normal(size=(2, 2)) * scale
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) < 1e-3:
            continue
        if det < 0:
            m[:, [0, 1]] = m[:, [1, 0]]
            det = -det
        m /= math.sqrt(det)
        return Mat2.from_rows(m)


def random_positive_sl2(rng: np.random.Generator) -> Mat2:
    """Random strictly positive matrix scaled to determinant one."""
    while True:
        m = rng.uniform(0.2, 3.0, size=(2, 2))
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det > 1e-3:
            return Mat2.from_rows(m / math.sqrt(det))
