import math

import pytest

from steklov_excision import BaseManifold, ProblemSpec

TWO_PI = 2 * math.pi


@pytest.fixture
def circle():
    return BaseManifold.circle(TWO_PI)


def annulus(m, n, eps, bc="dirichlet", delta=1.0, base=None):
    if base is None:
        if n == 0:
            base = BaseManifold.point()
        elif n == 1:
            base = BaseManifold.circle(TWO_PI)
        else:
            base = BaseManifold.flat_torus([TWO_PI] * n)
    return ProblemSpec(m, n, eps, delta, base, bc)
