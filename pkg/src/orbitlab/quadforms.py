"""Quadratic form toolkit: diagonalization, local invariants, splitness,
explicit isometries onto split models, maximal isotropic subspaces.

Isotropic vectors come from: exhaustive/diagonal search over GF(q),
mod-p solutions plus Hensel lifting over Q_p (p odd), and Lagrange
descent for ternary forms over Q. Over Q_2 only invariants are used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from .errors import PrecisionError, PreconditionError, UsageError
from .etale import EtaleAlgebra, SquareClass
from .linalg import Mat, det as mat_det, inverse, nullspace
from .poly import Poly
from .rings import (GF, QQ, RR, Padic, PadicField, PrimeField, Qp,
                    RationalField, RealField, hilbert_symbol)


class GramForm:
    """A symmetric bilinear form via its Gram matrix."""

    def __init__(self, gram: Mat):
        if not gram.is_symmetric():
            raise PreconditionError("Gram matrix must be symmetric")
        self.gram = gram
        self.ring = gram.ring

    @property
    def rank(self) -> int:
        return self.gram.nrows

    def bilinear(self, v, w):
        R = self.ring
        gv = self.gram.apply(w)
        acc = R.zero
        for a, b in zip(v, gv):
            acc = R.add(acc, R.mul(a, b))
        return acc

    def quad(self, v):
        return self.bilinear(v, v)

    def det(self):
        return mat_det(self.gram)

    def is_nondegenerate(self) -> bool:
        return not self.ring.is_zero(self.det())

    def congruent(self, P: Mat) -> "GramForm":
        return GramForm(P.transpose() * self.gram * P)

    def __repr__(self):
        return f"GramForm({self.gram!r})"


def standard_split_gram(ring, n: int) -> GramForm:
    """Antidiagonal ones: the split model B of rank n."""
    return GramForm(Mat(ring, [[ring.one if i + j == n - 1 else ring.zero
                                for j in range(n)] for i in range(n)]))


# ---------------------------------------------------------------------------
# diagonalization


def diagonalize(Q: GramForm):
    """(P, diag) with P^t G P diagonal; raises on degenerate input."""
    R = Q.ring
    if isinstance(R, PrimeField) and R.p == 2:
        raise PreconditionError("characteristic 2 not supported")
    n = Q.rank
    G = [[Q.gram[i, j] for j in range(n)] for i in range(n)]
    P = [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]

    def addmul_col(dst, src, c):
        # column op on G (and record in P): col_dst += c*col_src, then row same
        for i in range(n):
            G[i][dst] = R.add(G[i][dst], R.mul(c, G[i][src]))
        for j in range(n):
            G[dst][j] = R.add(G[dst][j], R.mul(c, G[src][j]))
        for i in range(n):
            P[i][dst] = R.add(P[i][dst], R.mul(c, P[i][src]))

    def swap_cols(a, b):
        for i in range(n):
            G[i][a], G[i][b] = G[i][b], G[i][a]
        G[a], G[b] = G[b], G[a]
        for i in range(n):
            P[i][a], P[i][b] = P[i][b], P[i][a]

    for k in range(n):
        # choose pivot among diagonal entries k..n-1
        pivot = None
        best_key = None
        for i in range(k, n):
            if R.is_zero(G[i][i]):
                continue
            key = G[i][i].valuation() if isinstance(R, PadicField) else 0
            if pivot is None or key < best_key:
                pivot, best_key = i, key
        if pivot is None:
            # all diagonal zero: use an off-diagonal entry (char != 2 trick)
            found = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if not R.is_zero(G[i][j]):
                        found = (i, j)
                        break
                if found:
                    break
            if found is None:
                rad = [j for j in range(k, n)]
                err = PreconditionError("degenerate form: nonzero radical")
                err.radical = rad
                raise err
            i, j = found
            addmul_col(i, j, R.one)  # now G[i][i] = 2*G[i][j] != 0
            pivot = i
        if pivot != k:
            swap_cols(pivot, k)
        d = G[k][k]
        for j in range(k + 1, n):
            if not R.is_zero(G[k][j]):
                addmul_col(j, k, R.neg(R.div(G[k][j], d)))
    Pm = Mat(R, P)
    return Pm, [G[i][i] for i in range(n)]


# ---------------------------------------------------------------------------
# invariants


@lru_cache(maxsize=None)
def _line_algebra(ring):
    return EtaleAlgebra(Poly.gen(ring))


def base_square_class(ring, a) -> SquareClass:
    """Square class of a base-field element (degree-1 etale algebra)."""
    alg = _line_algebra(ring)
    return SquareClass(alg, Poly.const(ring, a))


@dataclass
class FormInvariants:
    rank: int
    disc: object             # base-field element, defined up to squares
    disc_class: object       # SquareClass at the place (None over GF for p=2)
    hasse: object            # +-1, or None where undefined
    signature: object        # (pos, neg) over R, else None
    place: object


def _diag_over(Q: GramForm, place):
    """Diagonal entries usable at the place (rational entries stay exact)."""
    _, diag = diagonalize(Q)
    return diag


def form_invariants(Q: GramForm, place=None) -> FormInvariants:
    ring = Q.ring
    if place is None:
        place = ring
    if not Q.is_nondegenerate():
        raise PreconditionError("degenerate form")
    diag = _diag_over(Q, place)
    disc = ring.one
    for d in diag:
        disc = ring.mul(disc, d)
    n = Q.rank
    same_base = place == ring
    if isinstance(place, RealField):
        if not isinstance(ring, RationalField):
            raise UsageError("real invariants need rational coordinates")
        pos = sum(1 for d in diag if d > 0)
        return FormInvariants(n, disc, base_square_class(RR, Fraction(disc)),
                              None, (pos, n - pos), place)
    if isinstance(place, PrimeField):
        if not same_base:
            raise UsageError("finite-field invariants need a matching base")
        dc = base_square_class(ring, disc) if place.p != 2 else None
        return FormInvariants(n, disc, dc, None, None, place)
    if isinstance(place, PadicField):
        if same_base:
            vals = diag
            dloc = disc
        elif isinstance(ring, RationalField):
            vals = diag
            dloc = disc
        else:
            raise UsageError("cannot evaluate p-adic invariants from this base")
        eps = 1
        for i in range(n):
            for j in range(i + 1, n):
                eps *= hilbert_symbol(vals[i], vals[j], place)
        if same_base:
            dc = base_square_class(place, dloc)
        else:
            dc = base_square_class(place, place.from_fraction(dloc))
        return FormInvariants(n, disc, dc, eps, None, place)
    if isinstance(place, RationalField):
        return FormInvariants(n, disc, base_square_class(QQ, disc), None,
                              None, place)
    raise UsageError(f"unsupported place {place!r}")


def _model_hasse(diag_model, place) -> int:
    eps = 1
    for i in range(len(diag_model)):
        for j in range(i + 1, len(diag_model)):
            eps *= hilbert_symbol(diag_model[i], diag_model[j], place)
    return eps


def _relevant_primes(diag) -> list:
    ps = {2}
    for d in diag:
        fr = Fraction(d)
        for val in (fr.numerator, fr.denominator):
            for p in sympy.factorint(abs(val)):
                ps.add(int(p))
    return sorted(ps)


def is_split(Q: GramForm, place=None) -> bool:
    """Maximal Witt index at the place (global Hasse-Minkowski over Q)."""
    ring = Q.ring
    if place is None:
        place = ring
    if not Q.is_nondegenerate():
        return False
    n = Q.rank
    m = n // 2
    if isinstance(place, PrimeField):
        if place.p == 2:
            raise UsageError("characteristic 2 not supported")
        if n % 2 == 1:
            return True
        inv = form_invariants(Q, place)
        sign = place.from_int((-1) ** m)
        return place.is_square(place.mul(inv.disc, sign))
    if isinstance(place, RealField):
        inv = form_invariants(Q, place)
        pos, neg = inv.signature
        return abs(pos - neg) <= (n % 2)
    if isinstance(place, PadicField):
        inv = form_invariants(Q, place)
        disc = inv.disc
        if isinstance(ring, RationalField):
            disc_local = place.from_fraction(Fraction(disc))
        else:
            disc_local = disc
        if n % 2 == 0:
            target = place.from_int((-1) ** m)
            if not place.is_square(place.mul(disc_local, target)):
                return False
            model = [1, -1] * m
            return inv.hasse == _model_hasse(model, place)
        # odd rank: compare with H^m + <c>, c = (-1)^m * disc
        c = Fraction((-1) ** m) * _square_free_of(disc, ring)
        model = [1, -1] * m + [c]
        return inv.hasse == _model_hasse(model, place)
    if isinstance(place, RationalField) and not isinstance(place, RealField):
        if not isinstance(ring, RationalField):
            raise UsageError("global splitness needs rational coordinates")
        _, diag = diagonalize(Q)
        if n % 2 == 0:
            disc = Fraction(1)
            for d in diag:
                disc *= Fraction(d)
            if not QQ.is_square(disc * (-1) ** m):
                return False
        if not is_split(Q, RR):
            return False
        return all(is_split(Q, Qp(p)) for p in _relevant_primes(diag))
    raise UsageError(f"unsupported place {place!r}")


def _square_free_of(disc, ring):
    """Rational squarefree representative of a disc (rational bases only)."""
    if isinstance(ring, RationalField):
        fr = Fraction(disc)
        return _squarefree(fr.numerator * fr.denominator)
    if isinstance(ring, PadicField):
        v = disc.valuation()
        u = disc.unit_mod(min(3, disc.prec))
        return Fraction(ring.p ** (v % 2) * (u if ring.p == 2 else u % ring.p))
    raise UsageError("no squarefree representative here")


def _squarefree(n: int) -> int:
    if n == 0:
        return 0
    sign = -1 if n < 0 else 1
    out = sign
    for p, e in sympy.factorint(abs(n)).items():
        if e % 2 == 1:
            out *= int(p)
    return out


# ---------------------------------------------------------------------------
# isotropic vectors


def _isotropic_diag_gf(diag, ring):
    """Isotropic vector of a diagonal form over GF(p), p odd, or None."""
    p = ring.p
    n = len(diag)
    # pairs first
    for i in range(n):
        for j in range(i + 1, n):
            q = ring.neg(ring.div(diag[i], diag[j]))
            if ring.is_square(q):
                v = [ring.zero] * n
                v[i] = ring.one
                v[j] = ring.sqrt(q)
                return v
    # triples: z = 1, scan x, y in lex order
    import itertools
    for i, j, k in itertools.combinations(range(n), 3):
        for x in range(p):
            for y in range(p):
                val = (diag[i] * x * x + diag[j] * y * y + diag[k]) % p
                if val == 0:
                    v = [ring.zero] * n
                    v[i], v[j], v[k] = x % p, y % p, ring.one
                    return v
    return None


def _isotropic_diag_qp(diag, ring):
    """Isotropic vector of a diagonal form over Q_p (p odd), or None."""
    p = ring.p
    n = len(diag)
    # normalize: d_i = p^{v_i} u_i; only parity matters, record scaled units
    norm = []
    for i, d in enumerate(diag):
        v = d.valuation()
        u = Padic(p, 0, d.u, d.prec)
        norm.append((i, v % 2, v, u))
    for parity in (0, 1):
        group = [(i, u) for (i, _par, _v, u) in norm if _par == parity]
        res = _unit_group_isotropic(group, ring)
        if res is not None:
            # d_i = p^{parity + 2 w_i} u_i; coordinate i absorbs p^{-w_i}
            out = [ring.zero] * n
            for (i, coeff) in res:
                w = (dict((j, vv) for (j, _pp, vv, _u) in norm)[i] - parity) // 2
                out[i] = ring.mul(coeff, ring.from_fraction(
                    Fraction(1, p ** w) if w >= 0 else Fraction(p ** (-w))))
            return out
    return None


def _unit_group_isotropic(group, ring):
    """Isotropic combination using only unit-scaled slots; or None."""
    p = ring.p
    if len(group) < 2:
        return None
    # pair shortcut
    for a in range(len(group)):
        for b in range(a + 1, len(group)):
            i, ui = group[a]
            j, uj = group[b]
            q = ring.neg(ring.div(ui, uj))
            if ring.is_square(q):
                return [(i, ring.one), (j, ring.sqrt(q))]
    if len(group) < 3:
        return None
    # ternary: solve mod p with a liftable first coordinate, then Hensel.
    # After the pair shortcut fails, any mod-p isotropic vector has all
    # coordinates nonzero, so fixing z = 1 and lifting the first slot works.
    import itertools
    for (a, b, c) in itertools.combinations(range(len(group)), 3):
        i, ui = group[a]
        j, uj = group[b]
        k, uk = group[c]
        u = [ui.unit_mod(1), uj.unit_mod(1), uk.unit_mod(1)]
        for x in range(p):
            rhs = -(u[1] * x * x + u[2]) % p
            if rhs != 0 and pow(rhs * pow(u[0], -1, p) % p,
                                (p - 1) // 2, p) == 1:
                val = ring.neg(ring.add(
                    ring.mul(uj, ring.mul(ring.from_int(x), ring.from_int(x))),
                    uk))
                t = ring.sqrt(ring.div(val, ui))
                return [(i, t), (j, ring.from_int(x)), (k, ring.one)]
    return None


def _legendre_solve(a: int, b: int):
    """(x, y, z) != 0 with x^2 = a*y^2 + b*z^2; a, b squarefree nonzero.

    Returns None when locally unsolvable. Lagrange descent.
    """
    if a == 1:
        return (1, 1, 0)
    if b == 1:
        return (1, 0, 1)
    # local solvability of x^2 - a y^2 - b z^2
    places = [RR] + [Qp(p) for p in
                     sorted({2} | set(int(q) for q in sympy.factorint(abs(a)))
                            | set(int(q) for q in sympy.factorint(abs(b))))]
    for pl in places:
        if hilbert_symbol(Fraction(a), Fraction(b), pl) != 1:
            return None
    if abs(a) > abs(b):
        res = _legendre_solve(b, a)
        if res is None:
            return None
        x, y, z = res
        return (x, z, y)
    # now |a| <= |b|, |b| >= 2
    t = sympy.ntheory.sqrt_mod(a % abs(b), abs(b))
    if t is None:
        return None
    t = int(t)
    if t > abs(b) // 2:
        t = t - abs(b)
    r = (t * t - a) // b
    if r == 0:
        # a = t^2
        return (t, 1, 0)
    bprime = _squarefree(r)
    msq = r // bprime
    from math import isqrt
    m = isqrt(msq)
    res = _legendre_solve(a, bprime)
    if res is None:
        return None
    x1, y1, z1 = res
    # (x1 t + a y1)^2 - a (x1 + t y1)^2 = (t^2 - a)(x1^2 - a y1^2) = b (b' m z1)^2
    x = x1 * t + a * y1
    y = x1 + t * y1
    z = bprime * m * z1
    if x == 0 and y == 0 and z == 0:
        return None
    return (x, y, z)


def _isotropic_diag_qq(diag):
    """Isotropic vector of a diagonal form over Q, or None (exhausted)."""
    n = len(diag)
    fr = [Fraction(d) for d in diag]
    for i in range(n):
        for j in range(i + 1, n):
            q = -fr[i] / fr[j]
            if q > 0 and QQ.is_square(q):
                v = [Fraction(0)] * n
                v[i] = Fraction(1)
                v[j] = QQ.sqrt(q)
                return v
    import itertools
    for (i, j, k) in itertools.combinations(range(n), 3):
        d1, d2, d3 = fr[i], fr[j], fr[k]
        aa = -d1 * d2
        bb = -d1 * d3
        a = _squarefree(aa.numerator * aa.denominator)
        b = _squarefree(bb.numerator * bb.denominator)
        if a == 0 or b == 0:
            continue
        sol = _legendre_solve(a, b)
        if sol is None:
            continue
        X, Y, Z = sol
        alpha2 = aa / a     # aa = a * alpha^2
        beta2 = bb / b
        alpha = QQ.sqrt(alpha2)
        beta = QQ.sqrt(beta2)
        v = [Fraction(0)] * n
        v[i] = Fraction(X)
        v[j] = d1 * Y / alpha
        v[k] = d1 * Z / beta
        if v[i] == 0 and v[j] == 0 and v[k] == 0:
            continue
        return v
    return None


def _normalize_vector(v, ring):
    """Scale for determinism: integer primitive with positive leading entry
    over Q; unit leading entry over GF; valuation-balanced over Qp."""
    if isinstance(ring, RationalField):
        from math import gcd as igcd
        den = 1
        for c in v:
            den = den * Fraction(c).denominator // igcd(den, Fraction(c).denominator)
        ints = [int(Fraction(c) * den) for c in v]
        g = 0
        for c in ints:
            g = igcd(g, abs(c))
        if g:
            ints = [c // g for c in ints]
        for c in ints:
            if c != 0:
                if c < 0:
                    ints = [-t for t in ints]
                break
        return [ring.from_int(c) for c in ints]
    return list(v)


def isotropic_vector(Q: GramForm):
    """A nonzero v with Q(v) = 0, or None if none found/exists."""
    ring = Q.ring
    P, diag = diagonalize(Q)
    if isinstance(ring, PrimeField):
        if ring.p == 2:
            raise UsageError("characteristic 2 not supported")
        w = _isotropic_diag_gf(diag, ring)
    elif isinstance(ring, PadicField):
        if ring.p == 2:
            raise UsageError("no isotropic search over Q_2 (invariants only)")
        w = _isotropic_diag_qp(diag, ring)
    elif isinstance(ring, RealField):
        raise UsageError("no isotropic search over R")
    elif isinstance(ring, RationalField):
        w = _isotropic_diag_qq(diag)
    else:
        raise UsageError(f"unsupported base {ring!r}")
    if w is None:
        return None
    v = P.apply([ring.from_fraction(c) if isinstance(c, (int, Fraction)) else c
                 for c in w])
    v = _normalize_vector(v, ring)
    if not ring.is_zero(Q.quad(v)):
        raise PreconditionError("isotropic search produced a bad vector")
    return v


# ---------------------------------------------------------------------------
# split frames and isometries


def _complete_hyperbolic(Q: GramForm, v):
    """w with B(v,w) = 1, Q(w) = 0."""
    R = Q.ring
    gv = Q.gram.apply(v)
    w = None
    for j, c in enumerate(gv):
        if not R.is_zero(c):
            w = [R.zero] * len(gv)
            w[j] = R.inv(c)
            break
    if w is None:
        raise PreconditionError("vector lies in the radical")
    qw = Q.quad(w)
    half = R.div(qw, R.from_int(2))
    return [R.sub(w[i], R.mul(half, v[i])) for i in range(len(w))]


def split_frame(Q: GramForm):
    """(P, m, c): P^t G P = H^m (antidiagonal 2x2 blocks) + optional <c>."""
    R = Q.ring
    n = Q.rank
    if n == 0:
        return Mat(R, []), 0, None
    if n == 1:
        return Mat.identity(R, 1), 0, Q.gram[0, 0]
    v = isotropic_vector(Q)
    if v is None:
        raise PreconditionError("form is not split (no isotropic vector)")
    w = _complete_hyperbolic(Q, v)
    # orthogonal complement of span(v, w)
    rows = [Q.gram.apply(v), Q.gram.apply(w)]
    comp = nullspace(Mat(R, rows))
    if len(comp) != n - 2:
        raise PreconditionError("hyperbolic complement has wrong dimension")
    cols = [v, w]
    if comp:
        C = Mat(R, list(zip(*comp)))  # columns = complement basis
        Qc = GramForm(C.transpose() * Q.gram * C)
        Pc, m, c = split_frame(Qc)
        lifted = C * Pc
        for j in range(lifted.ncols):
            cols.append(lifted.col(j))
    else:
        m, c = 0, None
    P = Mat(R, list(zip(*cols)))
    return P, m + 1, c


def _hyperbolic_model(ring, m: int, c=None) -> Mat:
    n = 2 * m + (0 if c is None else 1)
    rows = [[ring.zero] * n for _ in range(n)]
    for k in range(m):
        rows[2 * k][2 * k + 1] = ring.one
        rows[2 * k + 1][2 * k] = ring.one
    if c is not None:
        rows[n - 1][n - 1] = c
    return Mat(ring, rows)


def split_isometry(Q: GramForm, target: GramForm) -> Mat:
    """P with P^t * Q * P = target; both forms split with equal disc class."""
    R = Q.ring
    if Q.rank != target.rank:
        raise PreconditionError("rank mismatch")
    dq, dt = Q.det(), target.det()
    ratio = R.div(dq, dt)
    if not R.is_square(ratio):
        raise PreconditionError("discriminant mismatch")
    P1, m1, c1 = split_frame(Q)
    P2, m2, c2 = split_frame(target)
    if m1 != m2:
        raise PreconditionError("forms are not both split (Witt index differs)")
    if c1 is not None:
        # scale the last frame vector of Q so the tail entries agree
        s2 = R.div(c1, c2)
        if not R.is_square(s2):
            raise PreconditionError("tail entries differ by a nonsquare")
        s = R.sqrt(s2)
        n = Q.rank
        scale_col = Mat(R, [[R.one if (i == j and i < n - 1)
                             else (R.inv(s) if i == j else R.zero)
                             for j in range(n)] for i in range(n)])
        P1 = P1 * scale_col
    P = P1 * inverse(P2)
    if not (P.transpose() * Q.gram * P) == target.gram:
        raise PreconditionError("isometry construction failed verification")
    return P


def max_isotropic(Q: GramForm):
    """Basis of a maximal totally isotropic subspace of a split form."""
    P, m, _c = split_frame(Q)
    vecs = [P.col(2 * k) for k in range(m)]
    R = Q.ring
    for a in vecs:
        for b in vecs:
            if not R.is_zero(Q.bilinear(a, b)):
                raise PreconditionError("isotropic basis check failed")
    return vecs
