import itertools

import numpy as np
import pytest

from mimo_dof import AntennaConfig, QualityExponents

GRID_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


def exponent_grid(values=GRID_VALUES):
    """Valid (alpha, beta) pairs: alpha2 <= alpha1 and alpha_i <= beta_i."""
    for a1, a2, b1, b2 in itertools.product(values, repeat=4):
        if a2 <= a1 and a1 <= b1 and a2 <= b2:
            yield QualityExponents.constant((a1, a2), (b1, b2))


def config_grid(kinds=("bc", "ic")):
    for kind in kinds:
        for m, n in itertools.product((2, 3, 4), (1, 2, 3)):
            cfg = AntennaConfig(m, n, kind)
            for q in exponent_grid():
                yield cfg, q


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
