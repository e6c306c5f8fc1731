"""Rational orbit parametrization: representatives from square classes via
trace forms, stabilizer structure, the class-to-forms map with its kernel
test, class recovery from a representative, distinguished-orbit
coincidence, and pencils of quadrics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionError, PreconditionError, UsageError
from .etale import EtaleAlgebra, SquareClass, real_roots_exact, square_class
from .linalg import Mat, block_matrix, inverse
from .poly import Poly
from .quadforms import GramForm, is_split, split_isometry, standard_split_gram
from .rings import QQ, RR, PadicField, PrimeField, Qp, RationalField, RealField
from .thetarep import Invariants, RepElement, antidiag, invariants_of, lift, star


def _nu_element(L: EtaleAlgebra, nu) -> Poly:
    if isinstance(nu, SquareClass):
        return nu.rep
    if isinstance(nu, Poly):
        return L.reduce(nu)
    raise UsageError("nu must be a SquareClass or an algebra element")


def algebra_of(c: Invariants) -> EtaleAlgebra:
    return EtaleAlgebra(c.fpoly())


def trace_gram(L: EtaleAlgebra, mult: Poly) -> Mat:
    """Gram of (x, y) -> Tr(f'(gamma) * mult * x * y) in the power basis."""
    ring = L.ring
    n = L.f.degree
    fprime = L.reduce(L.f.derivative())
    w = L.mul(fprime, mult)
    traces = []
    acc = w
    for k in range(2 * n - 1):
        traces.append(L.trace(acc))
        acc = L.mul(acc, L.gamma())
    return Mat(ring, [[traces[i + j] for j in range(n)] for i in range(n)])


def delta_map(c: Invariants, nu, place=None):
    """(form on L, form on L*beta, in_kernel) for the class nu."""
    L = algebra_of(c)
    ring = c.ring
    if place is None:
        place = ring
    v = _nu_element(L, nu)
    if not L.is_unit(v):
        raise PreconditionError("nu must be a unit")
    g1 = GramForm(trace_gram(L, v))
    # Second-copy multiplier is +v*gamma: that is the convention under which
    # multiplication by gamma on L (+) L is self-adjoint for diag(g1, g2).
    g2 = GramForm(trace_gram(L, L.mul(v, L.gamma())))
    in_ker = is_split(g1, place) and is_split(g2, place)
    return g1, g2, in_ker


def _disc_sign(ring, n: int):
    return ring.from_int((-1) ** (n * (n - 1) // 2))


def orbit_from_class(c: Invariants, nu) -> RepElement:
    """Representative with invariants c whose recomputed class is nu."""
    ring = c.ring
    if isinstance(ring, PadicField) and ring.p == 2:
        raise UsageError("no representative construction over Q_2 "
                         "(isotropic search unavailable)")
    if isinstance(ring, RealField):
        raise UsageError("no representative construction over R")
    if not c.is_regular_semisimple():
        raise PreconditionError("invariants must be regular semisimple")
    L = algebra_of(c)
    n = c.n
    g1, g2, in_ker = delta_map(c, nu)
    if not in_ker:
        raise PreconditionError("no rational orbit: forms are not both split")
    from .linalg import det as mat_det
    s = _disc_sign(ring, n)
    if not ring.is_square(ring.mul(s, mat_det(g1.gram))):
        raise PreconditionError("form on L has wrong discriminant class")
    if not ring.is_square(ring.neg(ring.mul(s, mat_det(g2.gram)))):
        raise PreconditionError("form on L*beta has wrong discriminant class")
    B = standard_split_gram(ring, n).gram
    P1 = split_isometry(g1, GramForm(B))
    P2 = split_isometry(g2, GramForm(-B))
    Mg = L.mult_matrix(L.gamma())
    A = inverse(P1) * Mg * P2
    lower = inverse(P2) * P1
    if not lower == star(A):
        raise PreconditionError("transport failed the adjointness relation")
    return lift(A)


def alpha1_construct(c: Invariants) -> RepElement:
    """The base-point representative (trivial class)."""
    L = algebra_of(c)
    rep = _with_precision_retry(c, L.one())
    return rep


def _with_precision_retry(c: Invariants, nu_elem):
    ring = c.ring
    attempts = 0
    while True:
        try:
            return orbit_from_class(c, nu_elem)
        except PrecisionError:
            if not isinstance(ring, PadicField) or attempts >= 2:
                raise
            attempts += 1
            ring = Qp(ring.p, 2 * ring.prec)
            conv = lambda x: ring.from_fraction(x.to_fraction())
            c = Invariants(ring, tuple(conv(a) for a in c.a), conv(c.e))
            nu_elem = nu_elem.map_ring(ring, conv)


@dataclass
class StabilizerInfo:
    factor_degrees: tuple
    order: int
    order_closure: int


def stabilizer_info(c: Invariants, base=None) -> StabilizerInfo:
    ring = c.ring if base is None else base
    f = c.fpoly()
    n = f.degree
    if isinstance(ring, RealField):
        roots = real_roots_exact(f.map_ring(QQ, Fraction))
        n_real = len(roots)
        pairs = (n - n_real) // 2
        degs = tuple([1] * n_real + [2] * pairs)
    else:
        if ring != c.ring:
            if not isinstance(c.ring, RationalField):
                raise UsageError("base change requires rational invariants")
            f = f.map_ring(ring, ring.from_fraction)
        from .poly import factor
        degs = tuple(g.degree for g, _ in factor(f))
    r = len(degs)
    return StabilizerInfo(degs, 2 ** (r - 1), 2 ** (n - 1))


def recompute_class(rep: RepElement, place=None) -> SquareClass:
    """Class of a representative: pull the V1 form back to L and read the
    multiplier against the base trace pairing."""
    ring = rep.ring
    c = invariants_of(rep)
    L = algebra_of(c)
    n = rep.n
    M1 = rep.t_squared_block(1)
    w = _cyclic_vector(M1)
    cols = []
    v = w
    for _ in range(n):
        cols.append(v)
        v = M1.apply(v)
    W = Mat(ring, list(zip(*cols)))
    B = antidiag(ring, n)
    GL = W.transpose() * B * W
    base = trace_gram(L, L.one())
    from .linalg import solve
    nu_coeffs = solve(base, list(GL.rows[0]))
    nu = Poly(ring, nu_coeffs)
    if not trace_gram(L, nu) == GL:
        raise PreconditionError("recovered multiplier fails the Gram check")
    return square_class(L, nu, place)


def _cyclic_vector(M: Mat):
    ring = M.ring
    n = M.nrows
    from .linalg import rank

    def is_cyclic(w):
        cols = []
        v = w
        for _ in range(n):
            cols.append(v)
            v = M.apply(v)
        return rank(Mat(ring, list(zip(*cols)))) == n

    for i in range(n):
        w = [ring.one if j == i else ring.zero for j in range(n)]
        if is_cyclic(w):
            return w
    # sums of basis vectors (deterministic fallback)
    import itertools
    for k in range(2, n + 1):
        for idx in itertools.combinations(range(n), k):
            w = [ring.one if j in idx else ring.zero for j in range(n)]
            if is_cyclic(w):
                return w
    raise PreconditionError("no cyclic vector (operator not regular)")


def distinguished_coincide(c: Invariants, place=None) -> bool:
    """Whether -gamma is a square in L (at the place, or over the base)."""
    L = algebra_of(c)
    ring = c.ring
    neg_gamma = L.mul(L.gamma(), L.scalar(ring.neg(ring.one)))
    return square_class(L, neg_gamma, place).is_trivial()


@dataclass
class PencilPair:
    q_ambient: GramForm     # (n+1)x(n+1) extension of Q_i by a zero slot
    q_twisted: GramForm     # extension of B_i(v, T^2 w) by a 1 in the corner
    i: int


def pencil_of(T: RepElement, i: int) -> PencilPair:
    ring = T.ring
    n = T.n
    Bi = antidiag(ring, n) if i == 1 else -antidiag(ring, n)
    M = T.t_squared_block(i)
    BM = Bi * M
    zcol = Mat.zero(ring, n, 1)
    zrow = Mat.zero(ring, 1, n)
    one = Mat(ring, [[ring.one]])
    zero1 = Mat(ring, [[ring.zero]])
    q1 = block_matrix(ring, [[Bi, zcol], [zrow, zero1]])
    q2 = block_matrix(ring, [[BM, zcol], [zrow, one]])
    return PencilPair(GramForm(q1), GramForm(q2), i)
