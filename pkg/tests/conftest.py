import random
from fractions import Fraction

import pytest

from orbitlab.poly import discriminant
from orbitlab.rings import GF, QQ, Qp
from orbitlab.thetarep import Invariants

SEED = 0xA5EED


def is_rs(c: Invariants) -> bool:
    ring = c.ring
    return (not ring.is_zero(c.e)
            and not ring.is_zero(discriminant(c.fpoly())))


def random_rs_invariants(ring, rng, n=3, span=9):
    """A random regular semisimple invariant tuple over the given ring."""
    while True:
        if hasattr(ring, "p") and not hasattr(ring, "prec"):  # prime field
            a = tuple(ring.from_int(rng.randrange(ring.p))
                      for _ in range(n - 1))
            e = ring.from_int(rng.randrange(1, ring.p))
        else:
            a = tuple(ring.from_fraction(Fraction(rng.randint(-span, span)))
                      for _ in range(n - 1))
            e = ring.from_fraction(Fraction(rng.randint(1, span)))
        c = Invariants(ring, a, e)
        if is_rs(c):
            return c


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def f5():
    return GF(5)


@pytest.fixture(scope="session")
def q7():
    return Qp(7, 20)


@pytest.fixture(scope="session")
def base_c_f5(f5):
    # f = x^3 + 4x^2 + x + 4 over F_5: split with three rational roots
    return Invariants(f5, (f5.from_int(4), f5.from_int(1)), f5.from_int(2))


@pytest.fixture(scope="session")
def base_c_q():
    # f = x^3 - x + 1 over Q: irreducible, disc -23
    return Invariants(QQ, (Fraction(0), Fraction(-1)), Fraction(1))
