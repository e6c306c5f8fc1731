"""Z_p-lattice algorithms: symmetric block diagonalization over Z_p,
self-dualization of a lattice against a second bilinear form, verification
of ideal triples, and integral representative assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionError, PreconditionError, UsageError
from .etale import EtaleAlgebra
from .linalg import Mat, det, inverse
from .orbits import algebra_of, trace_gram
from .poly import Poly, discriminant
from .quadforms import GramForm, diagonalize, is_split, isotropic_vector
from .rings import PadicField, Qp
from .thetarep import Invariants


def working_precision(c: Invariants) -> int:
    """Default p-adic digit count: 20 plus the valuation of disc of the
    full (even) characteristic polynomial."""
    ring = c.ring
    if not isinstance(ring, PadicField):
        raise UsageError("working precision is defined for p-adic invariants")
    d = discriminant(c.gpoly())
    if d.is_zero():
        raise PreconditionError("degenerate invariants")
    return 20 + max(0, d.valuation())


def ideal_pairing_gram(L: EtaleAlgebra, mult: Poly) -> Mat:
    """Gram of (x, y) -> Tr(mult * x * y / f'(gamma)) on the power basis.

    The coordinate ring Z_p[gamma] is self-dual for this pairing with
    mult = 1, so self-duality of a fractional ideal I for the multiplier
    nu is equivalent to nu*I^2 integral plus the norm condition
    N(I)^2 * N(nu) being a unit.
    """
    ring = L.ring
    n = L.f.degree
    fprime = L.reduce(L.f.derivative())
    w = L.mul(L.inv(fprime), mult)
    traces = []
    acc = w
    for _ in range(2 * n - 1):
        traces.append(L.trace(acc))
        acc = L.mul(acc, L.gamma())
    return Mat(ring, [[traces[i + j] for j in range(n)] for i in range(n)])


@dataclass
class LatticeBasis:
    """Full-rank lattice in L given by basis columns in the power basis."""
    basis: Mat
    p: int
    prec: int
    algebra: object = None

    def __post_init__(self):
        n = self.basis.nrows
        if n != self.basis.ncols:
            raise UsageError("lattice basis must be square")
        ring = self.basis.ring
        if ring.is_zero(det(self.basis)):
            raise PreconditionError("lattice basis is degenerate to precision")

    @property
    def ring(self):
        return self.basis.ring

    def elements(self):
        """Basis vectors as algebra elements (power-basis polynomials)."""
        ring = self.ring
        n = self.basis.nrows
        return [Poly(ring, [self.basis[i, j] for i in range(n)])
                for j in range(n)]

    def norm_valuation(self) -> int:
        """v_p of the lattice norm N(I) = |det of the basis|."""
        return det(self.basis).valuation()

    def is_gamma_stable(self) -> bool:
        if self.algebra is None:
            raise UsageError("no algebra attached")
        Mg = self.algebra.mult_matrix(self.algebra.gamma())
        return _integral_matrix(inverse(self.basis) * Mg * self.basis)


def _integral(x) -> bool:
    return x.is_zero() or x.valuation() >= 0


def _integral_matrix(M: Mat) -> bool:
    return all(_integral(M[i, j])
               for i in range(M.nrows) for j in range(M.ncols))


def _unit(x) -> bool:
    return (not x.is_zero()) and x.valuation() == 0


# ---------------------------------------------------------------------------
# Cassels-style block diagonalization over Z_p


class _Reduction:
    """Mutable symmetric-congruence state: G tracks C^t G0 C."""

    def __init__(self, Q: GramForm):
        self.ring = Q.ring
        n = Q.rank
        self.n = n
        self.G = [[Q.gram[i, j] for j in range(n)] for i in range(n)]
        self.C = [[self.ring.one if i == j else self.ring.zero
                   for j in range(n)] for i in range(n)]

    def addmul(self, dst: int, src: int, lam):
        """Basis op b_dst += lam * b_src."""
        R, G, n = self.ring, self.G, self.n
        for i in range(n):
            self.C[i][dst] = R.add(self.C[i][dst], R.mul(lam, self.C[i][src]))
        for i in range(n):
            G[i][dst] = R.add(G[i][dst], R.mul(lam, G[i][src]))
        for j in range(n):
            G[dst][j] = R.add(G[dst][j], R.mul(lam, G[src][j]))

    def swap(self, i: int, j: int):
        if i == j:
            return
        for r in range(self.n):
            self.C[r][i], self.C[r][j] = self.C[r][j], self.C[r][i]
        for r in range(self.n):
            self.G[r][i], self.G[r][j] = self.G[r][j], self.G[r][i]
        self.G[i], self.G[j] = self.G[j], self.G[i]

    def set_pair(self, pos: int, e, f):
        """Replace (b_pos, b_pos+1) by the combinations e, f of themselves."""
        R, n = self.ring, self.n
        newC = []
        for r in range(n):
            c0 = R.add(R.mul(e[0], self.C[r][pos]),
                       R.mul(e[1], self.C[r][pos + 1]))
            c1 = R.add(R.mul(f[0], self.C[r][pos]),
                       R.mul(f[1], self.C[r][pos + 1]))
            newC.append((c0, c1))
        for r in range(n):
            self.C[r][pos], self.C[r][pos + 1] = newC[r]
        # refresh the Gram rows/cols for the pair
        old = [[self.G[pos + a][pos + b] for b in range(2)] for a in range(2)]
        vecs = [e, f]
        for a in range(2):
            for b in range(2):
                acc = R.zero
                for s in range(2):
                    for t in range(2):
                        acc = R.add(acc, R.mul(R.mul(vecs[a][s], vecs[b][t]),
                                               old[s][t]))
                self.G[pos + a][pos + b] = acc
        for j in range(n):
            if j in (pos, pos + 1):
                continue
            g0 = R.add(R.mul(e[0], self.G[pos][j]),
                       R.mul(e[1], self.G[pos + 1][j]))
            g1 = R.add(R.mul(f[0], self.G[pos][j]),
                       R.mul(f[1], self.G[pos + 1][j]))
            self.G[pos][j], self.G[pos + 1][j] = g0, g1
            self.G[j][pos], self.G[j][pos + 1] = g0, g1


def _min_valuation_entry(st: _Reduction, pos: int):
    best, bv = None, None
    for i in range(pos, st.n):
        for j in range(i, st.n):
            g = st.G[i][j]
            if g.is_zero():
                continue
            v = g.valuation()
            if bv is None or v < bv:
                best, bv = (i, j), v
    if best is None:
        raise PreconditionError("form is degenerate to precision")
    return best, bv


def cassels_diagonalize(Q: GramForm, p: int = None):
    """(P, blocks) with P^t Q P in block-diagonal normal form over Z_p.

    p odd: 1x1 blocks u * p^b.  p = 2: 1x1 blocks u * 2^b plus 2x2 blocks
    2^b * H (H = [[0,1],[1,0]]) and 2^b * H0 (H0 = [[2,1],[1,2]]).
    Each block is {"type": "unit"|"H"|"H0", "val": b, "unit": u or None}.
    """
    ring = Q.ring
    if not isinstance(ring, PadicField):
        raise UsageError("block diagonalization works over Z_p")
    if p is not None and p != ring.p:
        raise UsageError("prime mismatch with the coefficient ring")
    p = ring.p
    n = Q.rank
    for i in range(n):
        for j in range(n):
            if not _integral(Q.gram[i, j]):
                raise UsageError("Gram matrix is not integral")
    st = _Reduction(Q)
    blocks = []
    pos = 0
    while pos < n:
        (i, j), w = _min_valuation_entry(st, pos)
        if i != j and p != 2:
            # merge to put a minimal-valuation entry on the diagonal;
            # at odd p at least one of b_i +- b_j works
            st.addmul(i, j, ring.one)
            if st.G[i][i].is_zero() or st.G[i][i].valuation() > w:
                st.addmul(i, j, ring.from_int(-2))
            i = j = i
        if i == j or (p == 2 and _diag_min(st, pos, w) is not None):
            if p == 2 and i != j:
                i = j = _diag_min(st, pos, w)
            st.swap(pos, i)
            piv = st.G[pos][pos]
            for k in range(pos + 1, n):
                if st.G[k][pos].is_zero():
                    continue
                lam = ring.neg(ring.div(st.G[k][pos], piv))
                st.addmul(k, pos, lam)
            blocks.append({"type": "unit", "val": piv.valuation(),
                           "unit": piv})
            pos += 1
            continue
        # p = 2, minimal valuation strictly off-diagonal: 2x2 block
        st.swap(pos, i)
        st.swap(pos + 1, j if j != pos else i)
        blk = [[st.G[pos + a][pos + b] for b in range(2)] for a in range(2)]
        db = ring.sub(ring.mul(blk[0][0], blk[1][1]),
                      ring.mul(blk[0][1], blk[0][1]))
        for k in range(pos + 2, n):
            g0, g1 = st.G[k][pos], st.G[k][pos + 1]
            if g0.is_zero() and g1.is_zero():
                continue
            lam0 = ring.div(ring.sub(ring.mul(blk[0][1], g1),
                                     ring.mul(blk[1][1], g0)), db)
            lam1 = ring.div(ring.sub(ring.mul(blk[0][1], g0),
                                     ring.mul(blk[0][0], g1)), db)
            st.addmul(k, pos, lam0)
            st.addmul(k, pos + 1, lam1)
        btype = _normalize_even_block(st, pos, w)
        blocks.append({"type": btype, "val": w, "unit": None})
        pos += 2
    P = Mat(ring, [tuple(row) for row in st.C])
    _verify_blocks(Q, P, blocks)
    return P, blocks


def _diag_min(st: _Reduction, pos: int, w: int):
    for i in range(pos, st.n):
        g = st.G[i][i]
        if (not g.is_zero()) and g.valuation() == w:
            return i
    return None


def _normalize_even_block(st: _Reduction, pos: int, w: int) -> str:
    """Turn the current 2x2 block (scaled even unimodular) into 2^w * H or
    2^w * H0 by an in-block GL_2(Z_2) change of basis."""
    ring = st.ring
    two_w = ring.from_fraction(Fraction(2) ** w)
    a = ring.div(st.G[pos][pos], two_w)
    b = ring.div(st.G[pos][pos + 1], two_w)
    c = ring.div(st.G[pos + 1][pos + 1], two_w)
    disc = ring.sub(ring.mul(b, b), ring.mul(a, c))   # = -det of the block
    if ring.is_square(disc):
        # hyperbolic: primitive isotropic e, then a unimodular partner
        if a.is_zero():
            e = [ring.one, ring.zero]
        else:
            s = ring.sqrt(disc)
            e = [ring.sub(s, b), a]
            ev = min(x.valuation() for x in e if not x.is_zero())
            sc = ring.from_fraction(Fraction(1, 2 ** ev))
            e = [ring.mul(x, sc) for x in e]
        t = [_blk_bil(ring, a, b, c, e, [ring.one, ring.zero]),
             _blk_bil(ring, a, b, c, e, [ring.zero, ring.one])]
        k = 0 if _unit(t[0]) else 1
        base = [ring.one if m == k else ring.zero for m in range(2)]
        f = [ring.div(x, t[k]) for x in base]
        qf = _blk_q(ring, a, b, c, f)
        lam = ring.neg(ring.div(qf, ring.from_int(2)))
        f = [ring.add(f[m], ring.mul(lam, e[m])) for m in range(2)]
        st.set_pair(pos, e, f)
        return "H"
    # anisotropic: realize [[2,1],[1,2]] exactly
    e = _represent_two(ring, a, b, c)
    t = [_blk_bil(ring, a, b, c, e, [ring.one, ring.zero]),
         _blk_bil(ring, a, b, c, e, [ring.zero, ring.one])]
    k = 0 if _unit(t[0]) else 1
    base = [ring.one if m == k else ring.zero for m in range(2)]
    f = [ring.div(x, t[k]) for x in base]
    # correct f along the direction w with B(e, w) = 0, which keeps
    # B(e, f) = 1 while Q(f + s*w) = 2 is solved exactly (a solution
    # exists because every anisotropic even unimodular block is
    # equivalent to [[2,1],[1,2]])
    w = [t[1], ring.neg(t[0])]
    wv = min(x.valuation() for x in w if not x.is_zero())
    if wv:
        sc = ring.from_fraction(Fraction(1, 2 ** wv))
        w = [ring.mul(x, sc) for x in w]
    qw = _blk_q(ring, a, b, c, w)
    bw = _blk_bil(ring, a, b, c, f, w)
    qf = _blk_q(ring, a, b, c, f)
    disc2 = ring.sub(ring.mul(bw, bw),
                     ring.mul(qw, ring.sub(qf, ring.from_int(2))))
    root = ring.sqrt(disc2)
    sol = None
    for sgn in (root, ring.neg(root)):
        cand = ring.div(ring.sub(sgn, bw), qw)
        if cand.is_zero() or cand.valuation() >= 0:
            sol = cand
            break
    if sol is None:
        raise PrecisionError("no integral norm-2 partner found")
    f = [ring.add(f[m], ring.mul(sol, w[m])) for m in range(2)]
    st.set_pair(pos, e, f)
    return "H0"


def _blk_q(ring, a, b, c, v):
    return ring.add(ring.add(ring.mul(a, ring.mul(v[0], v[0])),
                             ring.mul(ring.from_int(2),
                                      ring.mul(b, ring.mul(v[0], v[1])))),
                    ring.mul(c, ring.mul(v[1], v[1])))


def _blk_bil(ring, a, b, c, v, w):
    t0 = ring.add(ring.mul(a, v[0]), ring.mul(b, v[1]))
    t1 = ring.add(ring.mul(b, v[0]), ring.mul(c, v[1]))
    return ring.add(ring.mul(t0, w[0]), ring.mul(t1, w[1]))


def _represent_two(ring, a, b, c):
    """Vector e over Z_2 with a e0^2 + 2b e0 e1 + c e1^2 = 2 exactly, for an
    even unimodular anisotropic block (which represents every 2*unit)."""
    two = ring.from_int(2)
    # residue search: a true solution reduces to some residue pair mod 16,
    # and any lift within 2^5 keeps the value ≡ 2 mod 64 with unit gradient
    for x in range(-8, 9):
        for y in range(-8, 9):
            if x % 2 == 0 and y % 2 == 0:
                continue
            e = [ring.from_int(x), ring.from_int(y)]
            val = ring.sub(_blk_q(ring, a, b, c, e), two)
            if val.is_zero():
                return e
            if val.valuation() >= 6:
                return _hensel_refine(ring, a, b, c, e)
    raise PreconditionError("even block represents no vector of norm 2 "
                            "(falsifies the anisotropic classification)")


def _hensel_refine(ring, a, b, c, e):
    """Newton iteration on Q(e + t*d) = 2 along a unit-gradient direction."""
    grads = [[ring.one, ring.zero], [ring.zero, ring.one]]
    d = next(g for g in grads if _unit(_blk_bil(ring, a, b, c, e, g)))
    t = ring.zero
    for _ in range(ring.prec + 2):
        cur = [ring.add(e[0], ring.mul(t, d[0])),
               ring.add(e[1], ring.mul(t, d[1]))]
        h = ring.sub(_blk_q(ring, a, b, c, cur), ring.from_int(2))
        if h.is_zero():
            return cur
        hp = ring.mul(ring.from_int(2), _blk_bil(ring, a, b, c, cur, d))
        t = ring.sub(t, ring.div(h, hp))
    raise PrecisionError("norm-2 refinement did not converge")


def _verify_blocks(Q: GramForm, P: Mat, blocks):
    ring = Q.ring
    got = P.transpose() * Q.gram * P
    n = Q.rank
    expected = [[ring.zero] * n for _ in range(n)]
    pos = 0
    for blk in blocks:
        if blk["type"] == "unit":
            expected[pos][pos] = blk["unit"]
            pos += 1
            continue
        tw = ring.from_fraction(Fraction(2) ** blk["val"])
        if blk["type"] == "H":
            expected[pos][pos + 1] = tw
            expected[pos + 1][pos] = tw
        else:
            expected[pos][pos] = ring.mul(tw, ring.from_int(2))
            expected[pos + 1][pos + 1] = ring.mul(tw, ring.from_int(2))
            expected[pos][pos + 1] = tw
            expected[pos + 1][pos] = tw
        pos += 2
    for i in range(n):
        for j in range(n):
            if not ring.eq(got[i, j], expected[i][j]):
                raise PreconditionError(
                    "block reduction failed verification")


# ---------------------------------------------------------------------------
# representing units and self-dualization


_UNIT_REPS = {2: (1, 3, 5, 7, -1, -3, -5, -7)}


def _unit_reps(ring):
    if ring.p == 2:
        return [ring.from_int(u) for u in _UNIT_REPS[2]]
    return [ring.one, _nonsquare_unit(ring)]


def _nonsquare_unit(ring):
    for u in range(2, ring.p):
        cand = ring.from_int(u)
        if not ring.is_square(cand):
            return cand
    raise PreconditionError("no quadratic non-residue found")


def _two_adic_candidates(vmax: int):
    """Fractions 2^j * m covering all square classes and residues mod 2^5
    at bounded valuations (a true coordinate of bounded valuation reduces
    to one of these mod 2^(j+5))."""
    out = [Fraction(0)]
    for j in range(-vmax, vmax + 1):
        for m in range(1, 32, 2):
            out.append(Fraction(m) * Fraction(2) ** j)
            out.append(-Fraction(m) * Fraction(2) ** j)
    return out


def _represent_value(Q: GramForm, target):
    """Vector v with v^t G v = target over Q_p, or None."""
    ring = Q.ring
    n = Q.rank
    if ring.p != 2:
        ext = Mat(ring, [[Q.gram[i, j] if i < n and j < n else
                          (ring.neg(target) if i == j else ring.zero)
                          for j in range(n + 1)] for i in range(n + 1)])
        w = isotropic_vector(GramForm(ext))
        if w is None:
            return None
        if not ring.is_zero(w[n]):
            inv_t = ring.inv(w[n])
            return [ring.mul(w[i], inv_t) for i in range(n)]
        # the form itself is isotropic; shift off the isotropic vector
        v = [w[i] for i in range(n)]
        for k in range(n):
            d = [ring.one if i == k else ring.zero for i in range(n)]
            bvd = _gram_bil(Q, v, d)
            if not ring.is_zero(bvd):
                qd = _gram_bil(Q, d, d)
                alpha = ring.div(ring.sub(target, qd),
                                 ring.mul(ring.from_int(2), bvd))
                return [ring.add(ring.mul(alpha, v[i]), d[i])
                        for i in range(n)]
        return None
    # p = 2: diagonalize and run a bounded complete search
    P, diag = diagonalize(Q)
    vmax = max(abs(d.valuation()) for d in diag) // 2 + abs(
        target.valuation()) // 2 + 3
    cands = _two_adic_candidates(vmax)
    for i in range(n):
        r = ring.div(target, diag[i])
        if ring.is_square(r):
            x = ring.sqrt(r)
            return P.apply([x if k == i else ring.zero for k in range(n)])
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for y in cands:
                yy = ring.from_fraction(y)
                rem = ring.sub(target,
                               ring.mul(diag[j], ring.mul(yy, yy)))
                if rem.is_zero():
                    continue
                r = ring.div(rem, diag[i])
                if ring.is_square(r):
                    x = ring.sqrt(r)
                    vec = [ring.zero] * n
                    vec[i], vec[j] = x, yy
                    return P.apply(vec)
    return None


def _gram_bil(Q: GramForm, v, w):
    ring = Q.ring
    n = Q.rank
    acc = ring.zero
    for i in range(n):
        for j in range(n):
            acc = ring.add(acc, ring.mul(ring.mul(v[i], w[j]), Q.gram[i, j]))
    return acc


def _unimodular_transform(Q: GramForm) -> Mat:
    """X with X^t G X diagonal with unit entries (a self-dual basis for the
    form), or raises when no unit is represented at some stage."""
    ring = Q.ring
    n = Q.rank
    if n == 0:
        return Mat(ring, [])
    e = None
    for u in _unit_reps(ring):
        e = _represent_value(Q, u)
        if e is not None:
            break
    if e is None:
        raise PreconditionError("no self-dual refinement: the form "
                                "represents no unit")
    qe = _gram_bil(Q, e, e)
    # complement: project the standard basis away from e
    pivot = max(range(n), key=lambda k: -(e[k].valuation()
                                          if not e[k].is_zero() else 10 ** 9))
    comp = []
    for k in range(n):
        if k == pivot:
            continue
        d = [ring.one if i == k else ring.zero for i in range(n)]
        lam = ring.neg(ring.div(_gram_bil(Q, e, d), qe))
        comp.append([ring.add(d[i], ring.mul(lam, e[i])) for i in range(n)])
    if not comp:
        return Mat(ring, [[e[0]]])
    sub = Mat(ring, [[_gram_bil(Q, comp[i], comp[j])
                      for j in range(len(comp))] for i in range(len(comp))])
    Xs = _unimodular_transform(GramForm(sub))
    cols = [list(e)]
    for j in range(Xs.ncols):
        col = [ring.zero] * n
        for i in range(len(comp)):
            for r in range(n):
                col[r] = ring.add(col[r], ring.mul(Xs[i, j], comp[i][r]))
        cols.append(col)
    return Mat(ring, list(zip(*cols)))


def self_dualize(I1: LatticeBasis, B2: GramForm, p: int = None
                 ) -> LatticeBasis:
    """Lattice between I1 and gamma^(-1) I1 that is self-dual for B2."""
    ring = B2.ring
    if p is not None and p != ring.p:
        raise UsageError("prime mismatch with the coefficient ring")
    G = I1.basis.transpose() * B2.gram * I1.basis
    n = G.nrows
    if not all(_integral(G[i, j]) for i in range(n) for j in range(n)):
        raise PreconditionError("I1 is not integral for the second form")
    if _unit(det(G)):
        return I1
    X = _unimodular_transform(GramForm(G))
    out = Mat(ring, I1.basis.rows) * X
    lat = LatticeBasis(out, ring.p, ring.prec, I1.algebra)
    check = lat.basis.transpose() * B2.gram * lat.basis
    if not (_integral_matrix(check) and _unit(det(check))):
        raise PreconditionError("self-dualization failed verification")
    if I1.algebra is not None:
        if not (lattice_contains(lat, I1) and
                lattice_contains(_gamma_inverse_lattice(I1), lat)):
            raise PreconditionError(
                "self-dual lattice violates the sandwich inclusions")
    return lat


def _gamma_inverse_lattice(I: LatticeBasis) -> LatticeBasis:
    Mg = I.algebra.mult_matrix(I.algebra.gamma())
    return LatticeBasis(inverse(Mg) * I.basis, I.p, I.prec, I.algebra)


def lattice_contains(outer: LatticeBasis, inner: LatticeBasis) -> bool:
    return _integral_matrix(inverse(outer.basis) * inner.basis)


# ---------------------------------------------------------------------------
# ideal triples


@dataclass
class IdealTriple:
    I1: LatticeBasis
    I2: LatticeBasis
    nu: Poly
    algebra: EtaleAlgebra


def _products_integral(L: EtaleAlgebra, mult: Poly, lat: LatticeBasis
                       ) -> bool:
    els = lat.elements()
    for i, a in enumerate(els):
        for b in els[i:]:
            prod = L.mul(L.mul(mult, a), b)
            if not all(_integral(prod.coeff(k)) for k in range(L.n)):
                return False
    return True


def ideal_triple_verify(t: IdealTriple):
    """(all_ok, report) for the containment/norm/splitness conditions."""
    L = t.algebra
    ring = L.ring
    gamma = L.gamma()
    report = {}
    g1inv = _gamma_inverse_lattice(
        LatticeBasis(t.I1.basis, t.I1.p, t.I1.prec, L))
    report["i_containments"] = (lattice_contains(t.I2, t.I1) and
                                lattice_contains(g1inv, t.I2))
    report["ii_nu_I1_squared_integral"] = _products_integral(L, t.nu, t.I1)
    report["iii_nu_gamma_I2_squared_integral"] = _products_integral(
        L, L.mul(t.nu, gamma), t.I2)
    report["iv_norm_I1"] = (
        2 * t.I1.norm_valuation() == -L.norm(t.nu).valuation())
    neg_gamma_nu = L.mul(t.nu, L.mul(gamma, L.scalar(ring.neg(ring.one))))
    report["v_norm_I2"] = (
        2 * t.I2.norm_valuation() == -L.norm(neg_gamma_nu).valuation())
    g1 = GramForm(trace_gram(L, t.nu))
    g2 = GramForm(trace_gram(L, neg_gamma_nu))
    report["vi_forms_split"] = is_split(g1, ring) and is_split(g2, ring)
    return all(report.values()), report


def integral_representative(c: Invariants, nu, p: int,
                            i1: LatticeBasis) -> IdealTriple:
    """Assemble and verify an ideal triple from a caller-supplied self-dual
    lattice for the first trace form."""
    ring = c.ring
    if not (isinstance(ring, PadicField) and ring.p == p):
        raise UsageError("invariants must live over Q_p for the given p")
    if p == 2:
        n = c.n
        for i, ai in enumerate(c.a, start=1):
            if (not ring.is_zero(ai)) and ai.valuation() < 4 * i:
                raise PreconditionError(
                    "2-adic divisibility 2^(4i) | a_i is required")
        if c.e.valuation() < 2 * n:
            raise PreconditionError(
                "2-adic divisibility 2^(2n) | e is required")
    L = algebra_of(c)
    nu_el = nu.rep if hasattr(nu, "rep") else L.reduce(nu)
    g1 = GramForm(ideal_pairing_gram(L, nu_el))
    gram1 = i1.basis.transpose() * g1.gram * i1.basis
    if not (_integral_matrix(gram1) and _unit(det(gram1))):
        raise PreconditionError("i1 is not self-dual for the first pairing")
    b2 = GramForm(ideal_pairing_gram(L, L.mul(nu_el, L.gamma())))
    i1a = LatticeBasis(i1.basis, p, ring.prec, L)
    lam = self_dualize(i1a, b2, p)
    triple = IdealTriple(i1a, lam, nu_el, L)
    ok, report = ideal_triple_verify(triple)
    if not ok:
        bad = [k for k, v in report.items() if not v]
        raise PreconditionError(
            "assembled triple failed verification: " + ", ".join(bad))
    return triple
