"""Etale algebras L = k[x]/(f) with norm/trace and square-class arithmetic.

Elements are polynomials of degree < deg f over the base ring. Square
classes carry a representative element plus per-factor labels:

  * GF(p):   quadratic-residue bit per factor (square in GF(p^d) iff the
             norm down to GF(p) is a residue);
  * R:       sign at each real root (complex pairs contribute nothing);
  * Q_p odd: (valuation mod 2, residue QR bit) per unramified factor;
  * Q_2:     (valuation mod 2, 1+2O-level bits, trace bit) computed in
             O/8O -- a unit is a square iff it is one mod 8;
  * Q:       exact global answer via factorization over each number field
             factor (with norm and real-sign prescreens).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy

from .errors import PrecisionError, PreconditionError, UsageError
from .linalg import Mat, det as mat_det
from .poly import Poly, discriminant, ext_gcd, factor, powmod, to_sympy
from .rings import (GF, QQ, RR, Padic, PadicField, PrimeField, Qp,
                    RationalField, RealField)

_x = sympy.Symbol("x")
_t = sympy.Symbol("t")


# ---------------------------------------------------------------------------
# exact signs at real roots


def real_roots_exact(f: Poly):
    """Sorted exact real roots (sympy CRootOf) of a separable f over Q/R."""
    expr = to_sympy(f)
    return sympy.real_roots(expr, _x)


def rational_approx(root, dx):
    """A rational within dx of a real algebraic root expression.

    Roots from sympy may be CRootOf objects or explicit radical
    expressions (for factorable polynomials); both are handled.
    """
    if root.is_Rational:
        return sympy.Rational(root)
    if isinstance(root, sympy.CRootOf):
        return root.eval_rational(dx=dx)
    digits = max(20, len(str(sympy.Integer(sympy.ceiling(1 / dx)))) + 5)
    return sympy.Rational(str(root.evalf(digits)))


def _root_box(root, dx):
    """Rational interval [a, b] containing the root, of width <= 2*dx."""
    if root.is_Rational:
        return root, root
    approx = rational_approx(root, dx)
    return approx - dx, approx + dx


def sign_at_root(g: Poly, root) -> int:
    """Exact sign of g at an algebraic real root; g(root) must be nonzero."""
    gs = sympy.Poly(to_sympy(g), _x)
    if gs.degree() <= 0:
        val = Fraction(str(gs.as_expr())) if gs.degree() == 0 else Fraction(0)
        if val == 0:
            raise PreconditionError("sign of zero")
        return 1 if val > 0 else -1
    if root.is_Rational:
        val = Fraction(str(gs.eval(root)))
        if val == 0:
            raise PreconditionError("sign of zero")
        return 1 if val > 0 else -1
    for bits in (16, 32, 64, 128, 256, 512, 1024, 2048):
        dx = sympy.Rational(1, 2 ** bits)
        a, b = _root_box(root, dx)
        if gs.count_roots(a, b) > 0:
            continue
        va = gs.eval(a)
        if va != 0:
            return 1 if va > 0 else -1
    raise PrecisionError("could not separate sign at real root")


# ---------------------------------------------------------------------------
# GF(2^d) helpers (polynomials mod 2 modulo an irreducible fbar)


def _f2_trace(z: Poly, fbar: Poly) -> int:
    d = fbar.degree
    acc = Poly(GF(2), [])
    w = z.mod(fbar)
    for _ in range(d):
        acc = (acc + w).mod(fbar)
        w = (w * w).mod(fbar)
    if acc.degree > 0:
        raise PreconditionError("trace landed outside GF(2)")
    return acc.coeff(0)


def _mod8_mul(a, b, f8):
    """Multiply coefficient tuples mod 8, reduced modulo monic f8 (ints)."""
    d = len(f8) - 1
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, xa in enumerate(a):
        if xa == 0:
            continue
        for j, xb in enumerate(b):
            out[i + j] = (out[i + j] + xa * xb) % 8
    # reduce modulo monic f8
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k]
        if c:
            out[k] = 0
            for i in range(d):
                out[k - d + i] = (out[k - d + i] - c * f8[i]) % 8
    out = out[:d] + [0] * (d - len(out[:d]))
    return tuple(c % 8 for c in out)


def _unit2_data(u8, f8, fbar):
    """(ebits, tracebit) class data of a 2-adic unit residue u mod 8O.

    ebits is the 1+2O level (a hom to GF(2^d)); tracebit refines the
    classes with ebits = 0 and is None otherwise. The unit is a square
    iff ebits = 0 and tracebit = 0.
    """
    F2 = GF(2)
    d = fbar.degree
    ubar = Poly(F2, [c % 2 for c in u8])
    if ubar.is_zero():
        raise PreconditionError("not a unit at 2")
    w0 = powmod(ubar, 2 ** (d - 1), fbar) if d > 1 else ubar
    # lift w0^{-1} to O/8O by Newton iteration
    w0inv_bar = powmod(w0, 2 ** d - 2, fbar) if d > 1 else Poly(F2, [1])
    z = tuple((w0inv_bar.coeff(i) % 8) for i in range(d))
    w0_8 = tuple((w0.coeff(i) % 8) for i in range(d))
    for _ in range(2):
        two_minus = tuple((-c) % 8 for c in _mod8_mul(w0_8, z, f8))
        two_minus = (two_minus[0] + 2,) + two_minus[1:]
        two_minus = (two_minus[0] % 8,) + two_minus[1:]
        z = _mod8_mul(z, two_minus, f8)
    zz = _mod8_mul(z, z, f8)
    un = _mod8_mul(tuple(u8), zz, f8)
    if un[0] % 2 != 1 or any(c % 2 for c in un[1:]):
        raise PreconditionError("2-adic unit normalization failed")
    e = [( (un[0] - 1) // 2 if i == 0 else un[i] // 2) % 4 for i in range(d)]
    ebits = tuple(c % 2 for c in e)
    if any(ebits):
        return ebits, None
    cbits = Poly(F2, [c // 2 % 2 for c in e])
    return ebits, _f2_trace(cbits, fbar)


# ---------------------------------------------------------------------------
# the algebra


_UNFACTORED = object()


class EtaleAlgebra:
    """k[x]/(f) for monic separable f over QQ, RR, GF(p) or Qp."""

    def __init__(self, f: Poly):
        ring = f.ring
        if f.degree < 1 or not f.is_monic():
            raise PreconditionError("defining polynomial must be monic, degree >= 1")
        if ring.is_zero(discriminant(f)):
            raise PreconditionError("defining polynomial is inseparable")
        self.ring = ring
        self.f = f
        self.n = f.degree
        if isinstance(ring, RealField):
            self._factors = None
            self.real_roots = real_roots_exact(f)
            self.n_pairs = (self.n - len(self.real_roots)) // 2
        else:
            self.real_roots = None
            self._factors = _UNFACTORED
        self._comp_cache = {}
        self._idem_cache = None

    @property
    def factors(self):
        """Irreducible factors, computed on first use (multiplication and
        trace/norm work do not need them)."""
        if self._factors is _UNFACTORED:
            parts = factor(self.f)
            if any(m > 1 for _, m in parts):
                raise PreconditionError(
                    "repeated factor in separable polynomial")
            self._factors = [g for g, _ in parts]
        return self._factors

    # -- structural ----------------------------------------------------

    @property
    def r(self) -> int:
        """Number of factors of f over the base."""
        if self.factors is None:
            return len(self.real_roots) + self.n_pairs
        return len(self.factors)

    def gamma(self) -> Poly:
        return Poly.gen(self.ring).mod(self.f)

    def one(self) -> Poly:
        return Poly.const(self.ring, self.ring.one)

    def scalar(self, c) -> Poly:
        return Poly.const(self.ring, self.ring.from_fraction(c)
                          if isinstance(c, (int, Fraction)) else c)

    def reduce(self, a: Poly) -> Poly:
        return a.mod(self.f)

    def mul(self, a: Poly, b: Poly) -> Poly:
        return (a * b).mod(self.f)

    def add(self, a: Poly, b: Poly) -> Poly:
        return a + b

    def sub(self, a: Poly, b: Poly) -> Poly:
        return a - b

    def inv(self, a: Poly) -> Poly:
        d, s, _ = ext_gcd(a.mod(self.f), self.f)
        if d.degree != 0:
            raise PreconditionError("element not invertible (shares a factor)")
        return s.scale(self.ring.inv(d.coeff(0))).mod(self.f)

    def power(self, a: Poly, e: int) -> Poly:
        return powmod(a, e, self.f)

    def mult_matrix(self, a: Poly) -> Mat:
        """Matrix of multiplication by a in the power basis (columns a*x^j)."""
        a = a.mod(self.f)
        cols = []
        cur = a
        for _ in range(self.n):
            cols.append([cur.coeff(i) for i in range(self.n)])
            cur = cur.shift(1).mod(self.f)
        return Mat(self.ring, list(zip(*cols)))

    def norm(self, a: Poly):
        return mat_det(self.mult_matrix(a))

    def trace(self, a: Poly):
        return self.mult_matrix(a).trace()

    def is_unit(self, a: Poly) -> bool:
        return not self.ring.is_zero(self.norm(a))

    # -- factor-local views ---------------------------------------------

    def component(self, a: Poly, i: int) -> Poly:
        return a.mod(self.factors[i])

    def comp_algebra(self, i: int) -> "EtaleAlgebra":
        if i not in self._comp_cache:
            self._comp_cache[i] = EtaleAlgebra(self.factors[i])
        return self._comp_cache[i]

    def norm_in_factor(self, a: Poly, i: int):
        fi = self.factors[i]
        if fi.degree == 1:
            return a.eval(self.ring.neg(fi.coeff(0)))
        return self.comp_algebra(i).norm(self.component(a, i))

    def idempotents(self):
        """CRT idempotents e_i (1 in factor i, 0 elsewhere)."""
        if self._idem_cache is None:
            out = []
            for fi in self.factors:
                rest = self.f.divmod(fi)[0]
                _, s, _ = ext_gcd(rest.mod(fi), fi)
                out.append((rest * s).mod(self.f))
            self._idem_cache = out
        return self._idem_cache

    def crt(self, parts) -> Poly:
        acc = Poly(self.ring, [])
        for part, e in zip(parts, self.idempotents()):
            acc = (acc + part * e).mod(self.f)
        return acc

    # -- base change ----------------------------------------------------

    def localize(self, place) -> "EtaleAlgebra":
        """The same algebra over a completion (base must be Q)."""
        if not isinstance(self.ring, RationalField) or isinstance(self.ring, RealField):
            raise UsageError("localize only from a Q-algebra")
        conv = _coeff_map(self.ring, place)
        return EtaleAlgebra(self.f.map_ring(place, conv))

    def convert_element(self, a: Poly, place) -> Poly:
        conv = _coeff_map(self.ring, place)
        return a.map_ring(place, conv)


def _coeff_map(src, dst):
    if isinstance(src, RationalField):
        return lambda c: dst.from_fraction(c)
    raise UsageError(f"no coefficient map from {src!r}")


def etale_build(f: Poly) -> EtaleAlgebra:
    return EtaleAlgebra(f)


def etale_norm_trace(algebra: EtaleAlgebra, a: Poly):
    return algebra.norm(a), algebra.trace(a)


# ---------------------------------------------------------------------------
# square classes


class SquareClass:
    """An element of L_v^x / (L_v^x)^2, with a representative element."""

    def __init__(self, algebra: EtaleAlgebra, rep: Poly):
        self.algebra = algebra
        self.rep = algebra.reduce(rep)
        self.labels = self._compute_labels()

    # -- labels ----------------------------------------------------------

    def _compute_labels(self):
        alg, ring, rep = self.algebra, self.algebra.ring, self.rep
        if isinstance(ring, RealField):
            return tuple(sign_at_root(rep, r) for r in alg.real_roots)
        if isinstance(ring, PrimeField):
            out = []
            for i in range(alg.r):
                Ni = alg.norm_in_factor(rep, i)
                if ring.is_zero(Ni):
                    raise PreconditionError("square class of a non-unit")
                out.append(0 if ring.is_square(Ni) else 1)
            return tuple(out)
        if isinstance(ring, PadicField):
            return tuple(self._padic_factor_label(i) for i in range(alg.r))
        if isinstance(ring, RationalField):
            if ring.is_zero(alg.norm(rep)):
                raise PreconditionError("square class of a non-unit")
            return None
        raise UsageError(f"square classes unsupported over {ring!r}")

    def _padic_factor_label(self, i: int):
        alg, ring = self.algebra, self.algebra.ring
        p = ring.p
        d = alg.factors[i].degree
        Ni = alg.norm_in_factor(self.rep, i)
        vN = Ni.valuation()
        if vN % d != 0:
            raise PreconditionError(
                "factor appears ramified; only unramified factors are supported")
        vK = vN // d
        if p != 2:
            unit = Ni.u  # unit part of the norm, mod p^prec
            qr = 0 if pow(unit % p, (p - 1) // 2, p) == 1 else 1
            return (vK % 2, qr)
        # p = 2: normalize to a unit of O_i and classify mod 8
        fi = alg.factors[i]
        comp = alg.component(self.rep, i)
        scalec = Padic.from_fraction(Fraction(1, 2 ** vK) if vK >= 0
                                     else Fraction(2 ** (-vK)), 2, ring.prec)
        unit_el = (comp.scale(scalec)).mod(fi)
        u8, f8 = [], []
        for k in range(d):
            c = unit_el.coeff(k)
            if c.is_zero():
                u8.append(0)
            else:
                if c.valuation() < 0:
                    raise PreconditionError("non-integral unit coordinates at 2")
                u8.append(c.u * 2 ** c.valuation() % 8)
        for k in range(d + 1):
            c = fi.coeff(k)
            if c.is_zero():
                f8.append(0)
            else:
                if c.valuation() < 0:
                    raise PreconditionError("non-integral factor at 2")
                f8.append(c.u * 2 ** c.valuation() % 8)
        fbar = Poly(GF(2), [c % 2 for c in f8])
        ebits, tracebit = _unit2_data(tuple(u8), f8, fbar)
        return (vK % 2, ebits, tracebit)

    # -- predicates -------------------------------------------------------

    def is_trivial(self) -> bool:
        ring = self.algebra.ring
        if isinstance(ring, RealField):
            return all(s > 0 for s in self.labels)
        if isinstance(ring, PrimeField):
            return all(b == 0 for b in self.labels)
        if isinstance(ring, PadicField):
            if ring.p != 2:
                return all(lab == (0, 0) for lab in self.labels)
            return all(lab[0] == 0 and not any(lab[1]) and lab[2] == 0
                       for lab in self.labels)
        return self._global_is_square()

    def _global_is_square(self) -> bool:
        alg, rep = self.algebra, self.rep
        for i, fi in enumerate(alg.factors):
            # N(s^2) = N(s)^2, so a non-square norm rules the factor out
            Ni = alg.norm_in_factor(rep, i)
            if not QQ.is_square(Ni):
                return False
            if fi.degree == 1:
                if not QQ.is_square(rep.eval(-fi.coeff(0))):
                    return False
                continue
            # real-place screen
            for root in real_roots_exact(fi):
                if sign_at_root(rep.mod(fi), root) < 0:
                    return False
            # exact test over the number field factor
            alpha = sympy.CRootOf(to_sympy(fi), 0)
            comp = rep.mod(fi)
            val = sum(sympy.Rational(c) * alpha ** k
                      for k, c in enumerate(comp.coeffs))
            _, parts = sympy.factor_list(_t ** 2 - val, _t, extension=alpha)
            degs = sorted(sympy.Poly(g, _t).degree() for g, _ in parts)
            if degs != [1, 1]:
                return False
        return True

    def norm_is_square(self) -> bool:
        return self.algebra.ring.is_square(self.algebra.norm(self.rep))

    # -- group structure ---------------------------------------------------

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        if self.algebra.f != other.algebra.f:
            raise PreconditionError("square classes from different algebras")
        return SquareClass(self.algebra, self.algebra.mul(self.rep, other.rep))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SquareClass):
            return NotImplemented
        if self.algebra.f != other.algebra.f:
            return False
        ring = self.algebra.ring
        if isinstance(ring, (RealField, PrimeField)):
            return self.labels == other.labels
        if isinstance(ring, PadicField) and ring.p != 2:
            return self.labels == other.labels
        return (self * other).is_trivial()

    def __hash__(self):
        if self.labels is None:
            raise TypeError("global square classes are not hashable")
        return hash(self.labels)

    def __repr__(self):
        return f"SquareClass({self.rep!r}, labels={self.labels})"


def square_class(algebra: EtaleAlgebra, a: Poly, place=None) -> SquareClass:
    """Square class of a at a place; place defaults to the algebra's base."""
    if place is None or place == algebra.ring:
        return SquareClass(algebra, a)
    loc = algebra.localize(place)
    return SquareClass(loc, algebra.convert_element(a, place))


# ---------------------------------------------------------------------------
# enumeration of (L^x / L^x2)_{N=1} at local places


def _nonsquare_unit(alg: EtaleAlgebra, i: int):
    """A unit of factor i whose class in the residue field is a nonsquare."""
    ring = alg.ring
    p = ring.p if isinstance(ring, (PrimeField, PadicField)) else None
    fi = alg.factors[i]
    d = fi.degree
    if isinstance(ring, PrimeField):
        Fbase = ring
        fbar = fi
    else:
        Fbase = GF(p)
        fbar = Poly(Fbase, [0 if c.is_zero() else c.u * p ** c.valuation() % p
                            for c in fi.coeffs])
    half = (p ** d - 1) // 2
    cand = None
    for trial in range(p ** d):
        coeffs = []
        t = trial + 1
        for _ in range(d):
            coeffs.append(t % p)
            t //= p
        z = Poly(Fbase, coeffs)
        if z.is_zero():
            continue
        pw = powmod(z, half, fbar)
        if pw.degree == 0 and Fbase.eq(pw.coeff(0), Fbase.from_int(-1)):
            cand = z
            break
    if cand is None:
        raise PreconditionError("no nonsquare found (is p = 2?)")
    if isinstance(ring, PrimeField):
        return cand
    return cand.map_ring(ring, lambda c: ring.from_int(int(c)))


def _unit_class_reps_2adic(alg: EtaleAlgebra, i: int):
    """Representatives of O_i^x / (O_i^x)^2 for a factor at p = 2."""
    ring = alg.ring
    fi = alg.factors[i]
    d = fi.degree
    f8 = []
    for k in range(d + 1):
        c = fi.coeff(k)
        f8.append(0 if c.is_zero() else c.u * 2 ** c.valuation() % 8)
    fbar = Poly(GF(2), [c % 2 for c in f8])
    # labels collide between at most two classes, so bucket by label and
    # separate buckets with the exact mod-8 square test on quotients
    buckets = {}
    reps = []
    target = 2 ** (d + 1)
    for code in range(8 ** d):
        t = code
        u8 = []
        for _ in range(d):
            u8.append(t % 8)
            t //= 8
        if not any(c % 2 for c in u8):
            continue
        u8 = tuple(u8)
        lab = _unit2_data(u8, f8, fbar)
        new = True
        for v8 in buckets.get(lab, []):
            prod = _mod8_mul(u8, v8, f8)
            eb, tb = _unit2_data(prod, f8, fbar)
            if not any(eb) and tb == 0:
                new = False
                break
        if not new:
            continue
        buckets.setdefault(lab, []).append(u8)
        reps.append(Poly(ring, [ring.from_int(c) for c in u8]))
        if len(reps) == target:
            break
    if len(reps) != target:
        raise PreconditionError("2-adic unit class enumeration incomplete")
    return reps


def norm_one_classes(alg: EtaleAlgebra):
    """All of (L^x/L^x2)_{N=1} over a local base (GF, R, Qp)."""
    ring = alg.ring
    if isinstance(ring, PrimeField):
        if ring.p == 2:
            return [SquareClass(alg, alg.one())]
        per_factor = [[alg.one(), _pad_const(alg, _nonsquare_unit(alg, i), i)]
                      for i in range(alg.r)]
        return _filtered_products(alg, per_factor)
    if isinstance(ring, PadicField):
        p = ring.p
        out_parts = []
        for i in range(alg.r):
            # uniformizer in factor i only (1 in the other factors)
            pi = _pad_const(alg, Poly.const(ring, ring.from_int(p)), i)
            if p != 2:
                c = _pad_const(alg, _nonsquare_unit(alg, i), i)
                parts = [alg.one(), c, pi, alg.mul(c, pi)]
            else:
                units = [_pad_const(alg, u, i)
                         for u in _unit_class_reps_2adic(alg, i)]
                parts = units + [alg.mul(u, pi) for u in units]
            out_parts.append(parts)
        return _filtered_products(alg, out_parts)
    if isinstance(ring, RealField):
        roots = alg.real_roots
        k = len(roots)
        if k == 0:
            return [SquareClass(alg, alg.one())]
        seps = _separators(roots)
        gens = [Poly(ring, [ring.neg(ring.from_fraction(m)), ring.one])
                for m in seps]
        out = []
        for mask in range(2 ** k):
            signs = [(-1) ** ((mask >> j) & 1) for j in range(k)]
            if _prod(signs) != 1:
                continue
            v = [1 if s < 0 else 0 for s in signs]
            rep = alg.one()
            for idx in range(k):
                nxt = v[idx + 1] if idx + 1 < k else 0
                if v[idx] ^ nxt:
                    rep = alg.mul(rep, gens[idx])
            out.append(SquareClass(alg, rep))
        return out
    raise UsageError("enumeration only over local bases")


def _prod(xs):
    out = 1
    for v in xs:
        out *= v
    return out


def _pad_const(alg: EtaleAlgebra, local_el: Poly, i: int):
    """Element of L equal to local_el in factor i and 1 elsewhere."""
    parts = [alg.one() if j != i else local_el for j in range(alg.r)]
    return alg.crt(parts)


def _filtered_products(alg: EtaleAlgebra, per_factor):
    out = []
    idx = [0] * len(per_factor)
    while True:
        rep = alg.one()
        for i, k in enumerate(idx):
            rep = alg.mul(rep, per_factor[i][k])
        cls = SquareClass(alg, rep)
        if cls.norm_is_square():
            out.append(cls)
        # advance odometer
        j = 0
        while j < len(idx):
            idx[j] += 1
            if idx[j] < len(per_factor[j]):
                break
            idx[j] = 0
            j += 1
        if j == len(idx):
            break
    # deduplicate (products may repeat classes)
    uniq = []
    for c in out:
        if not any(c == u for u in uniq):
            uniq.append(c)
    return uniq


def _separators(roots):
    """Rational points between consecutive real roots, plus one above all."""
    from sympy import Rational
    dx = Rational(1, 4)
    while True:
        ivs = [_root_box(r, dx) for r in roots]
        if all(ivs[i][1] < ivs[i + 1][0] for i in range(len(ivs) - 1)):
            break
        dx /= 16
    vals = [Fraction(str((ivs[i][1] + ivs[i + 1][0]) / 2))
            for i in range(len(ivs) - 1)]
    vals.append(Fraction(str(ivs[-1][1] + 1)))
    return vals
