"""Exact base rings: Q, R (exact rational coordinates), GF(p), and truncated Qp.

Every ring object exposes the same small arithmetic API (add/sub/mul/div,
is_zero, eq, from_fraction, is_square, sqrt, ...) so that polynomials,
matrices and quadratic forms can be written once, generically.

p-adic scalars are precision-tracked triples (valuation, unit mod p^N, N);
all cancellation is accounted for explicitly and a value that cannot be
certified nonzero at its tracked precision raises PrecisionError when a
valuation is demanded.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import PrecisionError, PreconditionError, UsageError

DEFAULT_PRECISION = 20


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise UsageError(f"cannot coerce {x!r} to a rational")


def _padic_val(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def sqrt_mod_p(a: int, p: int) -> int:
    """Tonelli-Shanks square root mod an odd prime p; a must be a QR."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        # write p-1 = q * 2^s with q odd
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    if r * r % p != a:
        raise PreconditionError(f"{a} is not a square mod {p}")
    return r


class Padic:
    """A truncated p-adic number p^v * u + O(p^(v+N)).

    A zero value has u == 0; then v is an absolute precision bound
    (the value is O(p^v)), with v = None meaning an exact zero.
    """

    __slots__ = ("p", "v", "u", "prec")

    def __init__(self, p: int, v, u: int, prec: int):
        if u != 0:
            if prec < 1:
                raise PrecisionError("p-adic value with no significant digits")
            u %= p ** prec
            if u % p == 0 or u == 0:
                raise ValueError("unit part must be a unit")
        self.p = p
        self.v = v
        self.u = u
        self.prec = prec if u != 0 else 0

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(p: int, abs_prec=None) -> "Padic":
        return Padic(p, abs_prec, 0, 0)

    @staticmethod
    def from_fraction(x, p: int, prec: int = DEFAULT_PRECISION) -> "Padic":
        x = _as_fraction(x)
        if x == 0:
            return Padic.zero(p)
        vn = _padic_val(x.numerator, p)
        vd = _padic_val(x.denominator, p)
        mod = p ** prec
        num = x.numerator // p ** vn
        den = x.denominator // p ** vd
        u = num * pow(den, -1, mod) % mod
        return Padic(p, vn - vd, u, prec)

    # -- queries -------------------------------------------------------

    def is_exact_zero(self) -> bool:
        return self.u == 0 and self.v is None

    def is_zero(self) -> bool:
        """Zero at the tracked precision (exact or indistinguishable)."""
        return self.u == 0

    def valuation(self) -> int:
        if self.u == 0:
            if self.v is None:
                raise PreconditionError("valuation of exact zero")
            raise PrecisionError(
                f"value is O({self.p}^{self.v}); valuation not determined")
        return self.v

    def unit_mod(self, k: int) -> int:
        if self.u == 0:
            raise PrecisionError("unit part of a (possible) zero")
        if self.prec < k:
            raise PrecisionError(f"need {k} digits of unit part, have {self.prec}")
        return self.u % self.p ** k

    # -- arithmetic ----------------------------------------------------

    def _abs_prec(self):
        """Absolute precision: value is known mod p^(this)."""
        if self.u == 0:
            return self.v  # None = infinite
        return self.v + self.prec

    def __add__(self, other: "Padic") -> "Padic":
        p = self.p
        a1, a2 = self._abs_prec(), other._abs_prec()
        if self.u == 0 and other.u == 0:
            if a1 is None:
                return other
            if a2 is None:
                return self
            return Padic.zero(p, min(a1, a2))
        if self.u == 0:
            return other._truncate_abs(a1)
        if other.u == 0:
            return self._truncate_abs(a2)
        A = min(a1, a2)
        m = min(self.v, other.v)
        mod = p ** (A - m)
        s = (self.u * p ** (self.v - m) + other.u * p ** (other.v - m)) % mod
        if s == 0:
            return Padic.zero(p, A)
        w = _padic_val(s, p)
        if m + w >= A:
            return Padic.zero(p, A)
        return Padic(p, m + w, s // p ** w, A - m - w)

    def _truncate_abs(self, abs_prec) -> "Padic":
        if abs_prec is None or self.u == 0:
            return self
        if self.v >= abs_prec:
            return Padic.zero(self.p, abs_prec)
        return Padic(self.p, self.v, self.u, min(self.prec, abs_prec - self.v))

    def __neg__(self) -> "Padic":
        if self.u == 0:
            return self
        return Padic(self.p, self.v, -self.u % self.p ** self.prec, self.prec)

    def __sub__(self, other: "Padic") -> "Padic":
        return self + (-other)

    def __mul__(self, other: "Padic") -> "Padic":
        p = self.p
        if self.is_exact_zero() or other.is_exact_zero():
            return Padic.zero(p)
        if self.u == 0 or other.u == 0:
            # O(p^a) * (unit info) -> O(p^(a + v)), pessimistic when both fuzzy
            a = self.v if self.u == 0 else self.v
            b = other.v if other.u == 0 else other.v
            return Padic.zero(p, a + b)
        N = min(self.prec, other.prec)
        return Padic(p, self.v + other.v, self.u * other.u % p ** N, N)

    def inverse(self) -> "Padic":
        if self.u == 0:
            raise PrecisionError("inverting a (possible) zero")
        mod = self.p ** self.prec
        return Padic(self.p, -self.v, pow(self.u, -1, mod), self.prec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Padic):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("Padic values are not hashable (inexact equality)")

    def __repr__(self):
        if self.u == 0:
            return "0" if self.v is None else f"O({self.p}^{self.v})"
        return f"{self.p}^{self.v} * {self.u} mod {self.p}^{self.prec}"

    def to_fraction(self) -> Fraction:
        """A rational representative of this approximation."""
        if self.u == 0:
            return Fraction(0)
        return Fraction(self.u) * Fraction(self.p) ** self.v


class RationalField:
    tag = "Q"
    char = 0

    zero = Fraction(0)
    one = Fraction(1)

    def from_int(self, n: int):
        return Fraction(n)

    def from_fraction(self, x):
        return _as_fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in Q")
        return a / b

    def inv(self, a):
        return self.div(self.one, a)

    def is_zero(self, a) -> bool:
        return a == 0

    def eq(self, a, b) -> bool:
        return a == b

    def is_square(self, a) -> bool:
        a = _as_fraction(a)
        if a < 0:
            return False
        if a == 0:
            return True
        n, d = a.numerator, a.denominator
        return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d

    def sqrt(self, a):
        a = _as_fraction(a)
        if not self.is_square(a):
            raise PreconditionError(f"{a} is not a rational square")
        return Fraction(math.isqrt(a.numerator), math.isqrt(a.denominator))

    def scalar_str(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash(self.tag)


class RealField(RationalField):
    """The real place; elements are exact rational coordinates."""

    tag = "R"

    def is_square(self, a) -> bool:
        return _as_fraction(a) >= 0

    def sqrt(self, a):
        # only exact square roots are representable
        return RationalField.sqrt(self, a)

    def __repr__(self):
        return "RR"

    def __eq__(self, other):
        return isinstance(other, RealField)

    def __hash__(self):
        return hash(self.tag)


class PrimeField:
    char: int

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise UsageError(f"GF({p}): only prime fields are supported")
        self.p = p
        self.char = p
        self.tag = f"F{p}"
        self.zero = 0
        self.one = 1 % p

    def from_int(self, n: int):
        return n % self.p

    def from_fraction(self, x):
        x = _as_fraction(x)
        if x.denominator % self.p == 0:
            raise ZeroDivisionError(f"denominator divisible by {self.p}")
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return -a % self.p

    def div(self, a, b):
        if b % self.p == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return a * pow(b, -1, self.p) % self.p

    def inv(self, a):
        return self.div(1, a)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def eq(self, a, b) -> bool:
        return (a - b) % self.p == 0

    def is_square(self, a) -> bool:
        a %= self.p
        if a == 0:
            return True
        if self.p == 2:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a):
        a %= self.p
        if self.p == 2:
            return a
        return sqrt_mod_p(a, self.p)

    def scalar_str(self, a) -> str:
        return str(a % self.p)

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(self.tag)


class PadicField:
    char = 0

    def __init__(self, p: int, prec: int = DEFAULT_PRECISION):
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise UsageError(f"Qp: {p} is not prime")
        if prec < 1:
            raise UsageError("precision must be >= 1")
        self.p = p
        self.prec = prec
        self.tag = f"Q{p}adic"
        self.zero = Padic.zero(p)
        self.one = Padic(p, 0, 1, prec)

    def from_int(self, n: int):
        return Padic.from_fraction(Fraction(n), self.p, self.prec)

    def from_fraction(self, x):
        if isinstance(x, Padic):
            if x.p != self.p:
                raise UsageError("p mismatch")
            return x
        return Padic.from_fraction(_as_fraction(x), self.p, self.prec)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def div(self, a, b):
        return a * b.inverse()

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def eq(self, a, b) -> bool:
        return (a - b).is_zero()

    def is_square(self, a: Padic) -> bool:
        v = a.valuation()
        if v % 2 != 0:
            return False
        if self.p == 2:
            return a.unit_mod(3) % 8 == 1
        return pow(a.unit_mod(1), (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a: Padic) -> Padic:
        if not self.is_square(a):
            raise PreconditionError(f"{a} is not a square in Q_{self.p}")
        p, v, N = self.p, a.valuation(), a.prec
        if self.p == 2:
            # lift bit by bit from x = 1 (u = 1 mod 8)
            N = max(N - 1, 1)
            u = a.u % 2 ** (N + 1)
            x = 1
            for k in range(3, N + 1):
                if (u - x * x) % 2 ** (k + 1) != 0:
                    x += 2 ** (k - 1)
            x %= 2 ** N
            if (x * x - a.u) % 2 ** N != 0:
                raise PrecisionError("2-adic square root did not converge")
        else:
            mod = p ** N
            x = sqrt_mod_p(a.u % p, p)
            for _ in range(N.bit_length() + 2):
                x = (x + a.u * pow(x, -1, mod)) * pow(2, -1, mod) % mod
            if x * x % mod != a.u % mod:
                raise PrecisionError("p-adic square root did not converge")
        return Padic(p, v // 2, x, N)

    def scalar_str(self, a: Padic) -> str:
        return repr(a)

    def __repr__(self):
        return f"Qp({self.p}, prec={self.prec})"

    def __eq__(self, other):
        return isinstance(other, PadicField) and other.p == self.p

    def __hash__(self):
        return hash(self.tag)


QQ = RationalField()
RR = RealField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


@lru_cache(maxsize=None)
def Qp(p: int, prec: int = DEFAULT_PRECISION) -> PadicField:
    return PadicField(p, prec)


# ---------------------------------------------------------------------------
# Hilbert symbols


def _val_and_unit(x, p: int):
    """Write a nonzero rational (or Padic) as p^v * unit; return (v, unit mod p^3)."""
    if isinstance(x, Padic):
        return x.valuation(), x.unit_mod(min(3, x.prec))
    x = _as_fraction(x)
    if x == 0:
        raise PreconditionError("Hilbert symbol of zero")
    v = _padic_val(x.numerator, p) - _padic_val(x.denominator, p)
    mod = p ** 3
    num = x.numerator // p ** _padic_val(x.numerator, p)
    den = x.denominator // p ** _padic_val(x.denominator, p)
    return v, num * pow(den, -1, mod) % mod


def hilbert_symbol(a, b, place) -> int:
    """Hilbert symbol (a, b)_v over R or Q_p. a, b rational or Padic."""
    if isinstance(place, RealField):
        a, b = _as_fraction(a), _as_fraction(b)
        if a == 0 or b == 0:
            raise PreconditionError("Hilbert symbol of zero")
        return -1 if (a < 0 and b < 0) else 1
    if not isinstance(place, PadicField):
        raise UsageError(f"Hilbert symbol undefined over {place!r}")
    p = place.p
    alpha, u = _val_and_unit(a, p)
    beta, w = _val_and_unit(b, p)
    if p != 2:
        def leg(t):
            return 1 if pow(t % p, (p - 1) // 2, p) == 1 else -1
        eps = (p - 1) // 2
        sign = (-1) ** (alpha * beta * eps)
        return sign * leg(u) ** beta * leg(w) ** alpha
    # p = 2, with eps(u) = (u-1)/2, omega(u) = (u^2-1)/8 mod 2
    eu, ew = (u - 1) // 2 % 2, (w - 1) // 2 % 2
    ou, ow = (u * u - 1) // 8 % 2, (w * w - 1) // 8 % 2
    return (-1) ** (eu * ew + alpha * ow + beta * ou)
