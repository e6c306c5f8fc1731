"""Marked hyperelliptic curves y^2 = f(x) and y^2 = x f(x), the explicit
2-descent map on local points, local 2-torsion and Mordell-Weil mod-2 sizes,
generated local images with completeness flags, and their intersections.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, UsageError
from .etale import (EtaleAlgebra, SquareClass, norm_one_classes,
                    real_roots_exact, square_class)
from .orbits import algebra_of, stabilizer_info
from .poly import Poly, discriminant
from .rings import QQ, PadicField, PrimeField, RationalField, RealField
from .thetarep import Invariants

DEFAULT_BUDGET = 2000
DEFAULT_SEED = 0xA5EED


@dataclass
class MarkedCurve:
    """y^2 = f(x) (which = 1) or y^2 = x f(x) (which = 2), with the marked
    points at x = 0 and at infinity."""
    c: Invariants
    which: int

    def __post_init__(self):
        if self.which not in (1, 2):
            raise UsageError("which must be 1 or 2")
        R = self.c.ring
        if R.is_zero(self.c.e):
            raise PreconditionError("curve requires f(0) = e^2 nonzero")
        if R.is_zero(discriminant(self.c.fpoly())):
            raise PreconditionError("curve requires separable f")

    @property
    def genus(self) -> int:
        return self.c.n // 2

    def fpoly(self) -> Poly:
        return self.c.fpoly()

    def hpoly(self) -> Poly:
        """The defining right-hand side: f for curve 1, x*f for curve 2."""
        f = self.fpoly()
        return f if self.which == 1 else f.shift(1)


def two_torsion_size(c: Invariants, place=None) -> int:
    """|J[2](k_v)| = 2^(r-1), r = number of factors of f over the place."""
    return stabilizer_info(c, base=place).order


def descent_class(P, curve: MarkedCurve, place=None) -> SquareClass:
    """Image of a point under the 2-descent map into (L^x/L^x2)_{N=1}.

    P is either the string "marked" (the divisor of the marked point at
    x = 0 minus the marked point at infinity, mapping to the class of
    -gamma on both curves) or a pair (x0, y0) of base-field scalars with
    y0^2 equal to the defining polynomial at x0.
    """
    c = curve.c
    L = algebra_of(c)
    ring = c.ring
    if P == "marked":
        neg_gamma = L.mul(L.gamma(), L.scalar(ring.neg(ring.one)))
        return square_class(L, neg_gamma, place)
    x0, y0 = P
    f = curve.fpoly()
    fx0 = f.eval(x0)
    if ring.is_zero(fx0):
        raise PreconditionError(
            "2-torsion x-coordinate: f(x0) = 0 is not supported")
    rhs = fx0 if curve.which == 1 else ring.mul(x0, fx0)
    if not ring.eq(ring.mul(y0, y0), rhs):
        raise PreconditionError("(x0, y0) is not a point on the curve")
    # class of (x0 - gamma), times x0 on curve 2 to land in norm-one classes
    el = L.add(L.scalar(x0), L.mul(L.gamma(), L.scalar(ring.neg(ring.one))))
    if curve.which == 2:
        if ring.is_zero(x0):
            raise PreconditionError(
                "x0 = 0 is a 2-torsion point on curve 2")
        el = L.mul(el, L.scalar(x0))
    return square_class(L, el, place)


def local_mw_size(c: Invariants, place, which: int) -> int:
    """|J(k_v)/2J(k_v)| = b_v * |J[2](k_v)|: b_v is 1 at odd p and over
    finite fields, 2^g at 2, 2^(-g) over R."""
    ts = two_torsion_size(c, place)
    g = c.n // 2
    ring = _place_ring(c, place)
    if isinstance(ring, RealField):
        size, rem = divmod(ts, 2 ** g)
        if rem:
            raise PreconditionError(
                "real 2-torsion count not divisible by 2^g "
                "(falsifies the root-count bookkeeping)")
        return size
    if isinstance(ring, PadicField) and ring.p == 2:
        return (2 ** g) * ts
    if isinstance(ring, (PrimeField, PadicField)):
        return ts
    raise UsageError("local size needs a local place")


@dataclass
class LocalImage:
    place: object
    classes: list
    target: int
    complete: bool
    which: int = 0

    def contains(self, cls: SquareClass) -> bool:
        return any(cls == c for c in self.classes)

    def serialize(self) -> dict:
        return {
            "place": _place_name(self.place),
            "classes": sorted(str(c.labels) for c in self.classes),
            "target": self.target,
            "complete": self.complete,
        }


def _place_ring(c: Invariants, place):
    return c.ring if place is None else place


def _place_name(place) -> str:
    if isinstance(place, RealField):
        return "R"
    if isinstance(place, PadicField):
        return f"Qp:{place.p}"
    if isinstance(place, PrimeField):
        return f"F:{place.p}"
    return "Q"


def _close_under_product(classes, trivial):
    group = [trivial]
    frontier = list(classes)
    while frontier:
        g = frontier.pop()
        if any(g == h for h in group):
            continue
        group.append(g)
        frontier.extend(g * h for h in list(group))
    return group


def _good_reduction(c: Invariants, ring, which: int) -> bool:
    """Odd residue characteristic, p-integral invariants, unit disc(f);
    curve 2 (y^2 = x f(x)) additionally needs f(0) = e^2 to be a unit."""
    if not (isinstance(ring, PadicField) and ring.p != 2):
        return False
    conv = c if c.ring == ring else Invariants(
        ring, tuple(ring.from_fraction(a) for a in c.a),
        ring.from_fraction(c.e))
    vals = [a.valuation() for a in conv.a if not a.is_zero()]
    if any(v < 0 for v in vals):
        return False
    if conv.e.is_zero() or conv.e.valuation() < 0:
        return False
    if which == 2 and conv.e.valuation() != 0:
        return False
    d = discriminant(conv.fpoly())
    return (not d.is_zero()) and d.valuation() == 0


def _localized(c: Invariants, ring):
    if c.ring == ring:
        return c
    if not isinstance(c.ring, RationalField) or isinstance(c.ring, RealField):
        raise UsageError("place change requires rational invariants")
    return Invariants(ring, tuple(ring.from_fraction(a) for a in c.a),
                      ring.from_fraction(c.e))


def _real_components(h: Poly):
    """Rational sample x-values, several per connected arc where h >= 0."""
    from .etale import rational_approx
    roots = real_roots_exact(h.map_ring(QQ, Fraction))
    cuts = []
    for r in roots:
        if r.is_Rational:
            cuts.append(Fraction(str(r)))
        else:
            dx = Fraction(1, 64)
            cuts.append(Fraction(str(rational_approx(r, dx) - dx)))
    cuts = sorted(set(cuts))
    samples = []
    if not cuts:
        samples = [Fraction(0), Fraction(1), Fraction(-1)]
    else:
        samples.append(cuts[0] - 2)
        samples.append(cuts[-1] + 2)
        for a, b in zip(cuts, cuts[1:]):
            mid = (a + b) / 2
            samples.extend([mid, (a + mid) / 2, (mid + b) / 2])
        for cut in cuts:
            samples.extend([cut - Fraction(1, 3), cut + Fraction(1, 3)])
    return [x for x in samples if h.map_ring(QQ, Fraction).eval(x) > 0]


def _qp_candidates(p, budget, seed):
    """Fractions covering small integers, p-power scalings, and random
    p-adic approximations of bounded valuation."""
    rng = random.Random(seed)
    for t in range(-8, 9):
        yield Fraction(t)
    for j in (-1, 1, -2, 2):
        yield Fraction(p) ** j
    count = 0
    while count < budget:
        j = rng.randint(-2, 2)
        u = rng.randint(1, p ** 4)
        if u % p == 0:
            continue
        yield Fraction(u) * Fraction(p) ** j
        count += 1


def local_image(c: Invariants, place, which: int,
                budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED
                ) -> LocalImage:
    """Subgroup of (L^x/L^x2)_{N=1} generated by descent classes of local
    points, with a completeness flag against the local size target."""
    ring = _place_ring(c, place)
    target = local_mw_size(c, place, which)
    L = algebra_of(c)

    if isinstance(ring, PrimeField):
        # every class is soluble over a finite field
        classes = norm_one_classes(L if c.ring == ring else
                                   EtaleAlgebra(_localized(c, ring).fpoly()))
        return LocalImage(ring, classes, target, True, which)

    if _good_reduction(c, ring, which):
        loc = _localized(c, ring)
        Lloc = EtaleAlgebra(loc.fpoly())
        classes = [cl for cl in norm_one_classes(Lloc)
                   if all(lab[0] == 0 for lab in cl.labels)]
        if len(classes) != target:
            raise PreconditionError(
                "unramified subgroup size disagrees with the 2-torsion count")
        return LocalImage(ring, classes, target, True, which)

    curve = MarkedCurve(c, which)
    generators = [descent_class("marked", curve, place)]
    trivial = square_class(L, L.one(), place)
    group = _close_under_product(generators, trivial)

    if isinstance(ring, RealField):
        if not isinstance(c.ring, RationalField):
            raise UsageError("real sampling requires rational invariants")
        candidates = _real_components(curve.hpoly().map_ring(QQ, Fraction))
    elif isinstance(ring, PadicField):
        candidates = _qp_candidates(ring.p, budget, seed)
    else:
        raise UsageError("local image needs a local place")

    f = curve.fpoly()
    cring = c.ring
    used = 0
    for x0 in candidates:
        if len(group) >= target or used >= budget:
            break
        used += 1
        x0b = cring.from_fraction(x0)
        try:
            fx = f.eval(x0b)
            if cring.is_zero(fx) or (which == 2 and cring.is_zero(x0b)):
                continue
            rhs = fx if which == 1 else cring.mul(x0b, fx)
            if not ring_is_square_at(cring, ring, rhs):
                continue
            el = L.add(L.scalar(x0b),
                       L.mul(L.gamma(), L.scalar(cring.neg(cring.one))))
            if which == 2:
                el = L.mul(el, L.scalar(x0b))
            cls = square_class(L, el, place)
        except PreconditionError:
            continue
        if not any(cls == g for g in group):
            group = _close_under_product(group + [cls], trivial)
    return LocalImage(ring, group, target, len(group) >= target, which)


def ring_is_square_at(base, place_ring, value) -> bool:
    """Whether a base-field value is a square in the completion."""
    if base == place_ring:
        return base.is_square(value)
    if isinstance(place_ring, RealField):
        return Fraction(value) > 0
    return place_ring.is_square(place_ring.from_fraction(Fraction(value)))


def sel12_local(c: Invariants, place, budget: int = DEFAULT_BUDGET,
                seed: int = DEFAULT_SEED) -> LocalImage:
    """Intersection of the two curves' local images."""
    im1 = local_image(c, place, 1, budget, seed)
    im2 = local_image(c, place, 2, budget, seed)
    inter = [g for g in im1.classes if im2.contains(g)]
    complete = im1.complete and im2.complete
    return LocalImage(im1.place, inter, len(inter) if complete else -1,
                      complete, 0)
