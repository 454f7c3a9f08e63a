import math

import pytest

from torus_contact.contact import Giroux, Linear, ParametricH


@pytest.fixture
def giroux2():
    """h(z) = 2 z + 0.3 sin z with the identity gluing."""
    return Giroux(ParametricH(2, 0.3, 1), 2)


def giroux_family(n: int, eps: float = 0.3) -> Giroux:
    return Giroux(ParametricH(n, eps, 1), n)


TAU = 2 * math.pi
