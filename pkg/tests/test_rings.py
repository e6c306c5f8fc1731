from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitlab.errors import UsageError
from orbitlab.rings import (GF, QQ, RR, PadicField, Qp, hilbert_symbol,
                            sqrt_mod_p)

nonzero_rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50)).filter(lambda x: x != 0)


class TestRationals:
    def test_field_ops(self):
        a = QQ.from_fraction(Fraction(3, 4))
        b = QQ.from_fraction(Fraction(-2, 5))
        assert QQ.eq(QQ.mul(a, QQ.inv(a)), QQ.one)
        assert QQ.eq(QQ.add(a, b), Fraction(7, 20))

    def test_squares(self):
        assert QQ.is_square(Fraction(9, 4))
        assert not QQ.is_square(Fraction(2))
        assert not QQ.is_square(Fraction(-1))

    def test_real_field_signs(self):
        assert RR.is_square(RR.from_fraction(Fraction(2)))
        assert not RR.is_square(RR.from_fraction(Fraction(-2)))


class TestPrimeField:
    def test_inverse_all_units(self):
        F = GF(11)
        for u in range(1, 11):
            x = F.from_int(u)
            assert F.eq(F.mul(x, F.inv(x)), F.one)

    def test_square_counts(self):
        # exactly (p-1)/2 nonzero squares
        F = GF(13)
        squares = sum(1 for u in range(1, 13) if F.is_square(F.from_int(u)))
        assert squares == 6

    def test_sqrt_mod_p_roundtrip(self):
        for p in (3, 5, 7, 11, 13, 17):
            for u in range(1, p):
                if pow(u, (p - 1) // 2, p) == 1:
                    r = sqrt_mod_p(u, p)
                    assert r * r % p == u


class TestPadics:
    def test_valuation_arithmetic(self):
        K = Qp(5, 20)
        x = K.from_fraction(Fraction(50))     # 2 * 5^2
        y = K.from_fraction(Fraction(1, 5))
        assert x.valuation() == 2
        assert y.valuation() == -1
        assert K.mul(x, y).valuation() == 1
        assert K.inv(x).valuation() == -2

    def test_from_fraction_exact(self):
        K = Qp(7, 20)
        x = K.from_fraction(Fraction(3, 4))
        back = K.mul(x, K.from_int(4))
        assert K.eq(back, K.from_int(3))

    def test_odd_p_squares(self):
        K = Qp(7, 20)
        assert K.is_square(K.from_int(2))       # 2 is a QR mod 7
        assert not K.is_square(K.from_int(3))   # 3 is not
        assert not K.is_square(K.from_int(7))   # odd valuation
        assert K.is_square(K.from_int(49))

    def test_two_adic_squares_mod8(self):
        K = Qp(2, 24)
        assert K.is_square(K.from_int(17))      # 1 mod 8
        for u in (3, 5, 7):
            assert not K.is_square(K.from_int(u))
        assert K.is_square(K.from_int(4))
        assert not K.is_square(K.from_int(2))

    def test_sqrt_squares_back(self):
        K = Qp(5, 20)
        x = K.from_fraction(Fraction(6))
        s = K.sqrt(K.mul(x, x))
        assert K.eq(K.mul(s, s), K.mul(x, x))

    @given(a=nonzero_rationals)
    @settings(max_examples=50, deadline=None)
    def test_square_of_square(self, a):
        K = Qp(3, 20)
        x = K.from_fraction(a)
        assert K.is_square(K.mul(x, x))


class TestHilbertSymbol:
    def test_known_values(self):
        # (-1, -1) = -1 over R and Q_2, +1 at odd p
        assert hilbert_symbol(Fraction(-1), Fraction(-1), RR) == -1
        assert hilbert_symbol(Fraction(-1), Fraction(-1), Qp(2, 20)) == -1
        assert hilbert_symbol(Fraction(-1), Fraction(-1), Qp(5, 20)) == 1
        # (p, u) at odd p = Legendre(u | p)
        assert hilbert_symbol(Fraction(5), Fraction(2), Qp(5, 20)) == -1
        assert hilbert_symbol(Fraction(5), Fraction(4), Qp(5, 20)) == 1

    @given(a=nonzero_rationals, b=nonzero_rationals, c=nonzero_rationals)
    @settings(max_examples=40, deadline=None)
    def test_bimultiplicative(self, a, b, c):
        for place in (RR, Qp(2, 24), Qp(3, 20), Qp(5, 20)):
            lhs = hilbert_symbol(a, b * c, place)
            rhs = hilbert_symbol(a, b, place) * hilbert_symbol(a, c, place)
            assert lhs == rhs

    @given(a=nonzero_rationals)
    @settings(max_examples=40, deadline=None)
    def test_a_minus_a(self, a):
        # (a, -a) = 1 always
        for place in (RR, Qp(2, 24), Qp(7, 20)):
            assert hilbert_symbol(a, -a, place) == 1

    @given(a=nonzero_rationals, b=nonzero_rationals)
    @settings(max_examples=30, deadline=None)
    def test_product_formula(self, a, b):
        # product over all places of (a, b)_v = 1; only finitely many -1
        primes = set()
        for x in (a, b):
            for t in (x.numerator, x.denominator):
                t = abs(t)
                d = 2
                while d * d <= t:
                    if t % d == 0:
                        primes.add(d)
                        while t % d == 0:
                            t //= d
                    d += 1
                if t > 1:
                    primes.add(t)
        primes.add(2)
        prod = hilbert_symbol(a, b, RR)
        for p in sorted(primes):
            prod *= hilbert_symbol(a, b, Qp(p, 24))
        assert prod == 1


class TestConstruction:
    def test_gf_requires_prime(self):
        with pytest.raises(UsageError):
            GF(9)
        with pytest.raises(UsageError):
            GF(1)

    def test_qp_requires_prime(self):
        with pytest.raises(UsageError):
            Qp(6, 20)

    def test_field_identity(self):
        assert Qp(5, 20) == Qp(5, 20)
        assert isinstance(Qp(5, 20), PadicField)
