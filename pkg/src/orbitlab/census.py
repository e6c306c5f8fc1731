"""Finite-field and integral statistics: exhaustive invariant sweeps over
F_p, brute-force orthogonal-group orbit oracles for tiny (n, p), height-box
enumeration over Z, and the strict-inclusion local test family.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetError, PreconditionError, UsageError
from .rings import QQ, PrimeField
from .thetarep import Invariants

DEFAULT_SEED = 0xA5EED
BRUTEFORCE_BUDGET = 2 * 10 ** 8


# ---------------------------------------------------------------------------
# exhaustive invariant sweeps over F_p (n = 3 closed-form)


@dataclass
class SweepReport:
    p: int
    n: int
    total: int
    counts: dict
    densities: dict
    exhaustive: bool
    sample_size: int
    seed: int

    def serialize(self) -> dict:
        return {
            "p": self.p, "n": self.n, "total": self.total,
            "counts": dict(sorted(self.counts.items())),
            "densities": {k: [v.numerator, v.denominator]
                          for k, v in sorted(self.densities.items())},
            "exhaustive": self.exhaustive,
            "sample_size": self.sample_size,
            "seed": self.seed,
        }


def _cubic_grids(p: int):
    """(a1, a2, e) grids plus derived disc/e2 arrays for all p^3 tuples."""
    r = np.arange(p, dtype=np.int64)
    a1, a2, e = np.meshgrid(r, r, r, indexing="ij")
    a1, a2, e = a1.ravel(), a2.ravel(), e.ravel()
    a3 = (e * e) % p
    # disc(x^3 + a x^2 + b x + c) = 18abc - 4a^3 c + a^2 b^2 - 4 b^3 - 27 c^2
    disc = (18 * a1 * a2 % p * a3 + (p - 4) * pow_np(a1, 3, p) % p * a3
            + pow_np(a1, 2, p) * pow_np(a2, 2, p)
            + (p - 4) * pow_np(a2, 3, p) + (p - 27 % p) * pow_np(a3, 2, p)
            ) % p
    return a1, a2, e, a3, disc


def pow_np(arr, k: int, p: int):
    out = np.ones_like(arr)
    base = arr % p
    while k:
        if k & 1:
            out = out * base % p
        base = base * base % p
        k >>= 1
    return out


def _qr_table(p: int):
    t = np.zeros(p, dtype=bool)
    t[(np.arange(p) ** 2) % p] = True
    return t


def _root_data(a1, a2, a3, p: int):
    """(nroots, prod_flags): count of distinct roots in F_p of each monic
    cubic, and whether -gamma is a square componentwise."""
    N = a1.shape[0]
    nroots = np.zeros(N, dtype=np.int64)
    qr = _qr_table(p)
    neg_ok = np.ones(N, dtype=bool)
    root_prod = np.ones(N, dtype=np.int64)  # product of roots found (units)
    any_zero_root = np.zeros(N, dtype=bool)
    for r in range(p):
        val = (r ** 3 % p + a1 * (r * r % p) + a2 * r + a3) % p
        hit = val == 0
        nroots += hit
        if r == 0:
            any_zero_root |= hit
        neg_ok &= ~hit | qr[(-r) % p]
        root_prod = np.where(hit & (r != 0), root_prod * r % p, root_prod)
    return nroots, neg_ok, root_prod, any_zero_root


def fp_sweep(p: int, n: int = 3, seed: int = DEFAULT_SEED,
             sample_size: int = 20000) -> SweepReport:
    """Counts of the invariant-tuple classes over F_p with exact densities.

    n = 3 is a closed-form exhaustive sweep; other (odd) n fall back to
    seeded sampling with the sample size reported.
    """
    if n % 2 == 0 or n < 3:
        raise UsageError("n must be odd and at least 3")
    if p == 2 or not _is_prime(p):
        raise UsageError("p must be an odd prime")
    if n == 3 and p <= 97:
        return _fp_sweep_cubic(p, seed)
    return _fp_sweep_sampled(p, n, seed, sample_size)


def _fp_sweep_cubic(p: int, seed: int) -> SweepReport:
    a1, a2, e, a3, disc = _cubic_grids(p)
    total = p ** 3
    rs = (e != 0) & (disc != 0)
    nroots, neg_ok, root_prod, zero_root = _root_data(a1, a2, a3, p)
    qr = _qr_table(p)
    # factor counts for separable cubics: 3 roots -> 3, 1 root -> 2, 0 -> 1
    nfact = np.where(nroots == 3, 3, np.where(nroots == 1, 2, 1))
    irreducible = rs & (nroots == 0)
    dist_coincide = _distinguished_mask(p, a1, a2, a3, nroots, neg_ok, qr)
    # members with e = 0: f = x (x^2 + a1 x + a2), distinct nonzero roots
    # of the quadratic with square product
    quad_disc = (a1 * a1 - 4 * a2) % p
    small = ((e == 0) & (a2 != 0) & (quad_disc != 0) & qr[quad_disc]
             & qr[a2])
    counts = {
        "total": int(total),
        "regular_semisimple": int(rs.sum()),
        "irreducible": int(irreducible.sum()),
        "reducible_rs": int((rs & (nroots > 0)).sum()),
        "nontrivial_stabilizer": int((rs & (nfact > 1)).sum()),
        "distinguished_coincide": int((rs & dist_coincide).sum()),
        "e_zero": int((e == 0).sum()),
        "smallonetwo": int(small.sum()),
    }
    densities = {
        "reducible": Fraction(counts["reducible_rs"], total),
        "nontrivial_stabilizer": Fraction(counts["nontrivial_stabilizer"],
                                          total),
        "distinguished_or_non_rs": Fraction(
            int((dist_coincide | ~rs).sum()), total),
        "smallonetwo": Fraction(counts["smallonetwo"], total),
        "irreducible": Fraction(counts["irreducible"], total),
    }
    return SweepReport(p, 3, total, counts, densities, True, total, seed)


def _distinguished_mask(p, a1, a2, a3, nroots, neg_ok, qr):
    """-gamma a square in L = F_p[x]/(f), componentwise, for cubics.

    3 roots: all -r_i squares.  1 root r: -r square and the norm of -gamma
    in the quadratic factor (= f(0)/(-r) * ... = q(0)) square.  0 roots:
    always (odd-degree extension: square norm suffices, and N(-gamma) =
    f(0) = e^2).
    """
    N = a1.shape[0]
    out = np.zeros(N, dtype=bool)
    out |= nroots == 0
    out |= (nroots == 3) & neg_ok
    one_root = nroots == 1
    if one_root.any():
        # find the root r, then q(0) = a3 / (-r) when r != 0; if the root
        # is 0 the quadratic is x^2 + a1 x + a2 with q-norm of -gamma = a2
        ok = np.zeros(N, dtype=bool)
        for r in range(p):
            val = (r ** 3 % p + a1 * (r * r % p) + a2 * r + a3) % p
            hit = one_root & (val == 0)
            if not hit.any():
                continue
            if r == 0:
                ok |= hit & qr[a2 % p]
            else:
                q0 = a3 * pow(int((-r) % p), p - 2, p) % p
                ok |= hit & qr[(-r) % p] & qr[q0]
        out |= one_root & ok
    return out


def _fp_sweep_sampled(p: int, n: int, seed: int, sample_size: int
                      ) -> SweepReport:
    from .poly import Poly, discriminant, factor
    ring = PrimeField(p)
    rng = random.Random(seed)
    counts = {"total": sample_size, "regular_semisimple": 0,
              "irreducible": 0, "reducible_rs": 0,
              "nontrivial_stabilizer": 0, "distinguished_coincide": 0,
              "e_zero": 0, "smallonetwo": 0}
    dist_or_non_rs = 0
    for _ in range(sample_size):
        a = [rng.randrange(p) for _ in range(n - 1)]
        e = rng.randrange(p)
        coeffs = [e * e % p] + list(reversed(a)) + [1]
        f = Poly(ring, [ring.from_int(x) for x in coeffs])
        rs = e != 0 and not ring.is_zero(discriminant(f))
        if e == 0:
            counts["e_zero"] += 1
        if not rs:
            dist_or_non_rs += 1
            continue
        counts["regular_semisimple"] += 1
        parts = factor(f)
        r = len(parts)
        if r == 1:
            counts["irreducible"] += 1
        else:
            counts["reducible_rs"] += 1
        if r > 1:
            counts["nontrivial_stabilizer"] += 1
        if _neg_gamma_square_fp(ring, parts):
            counts["distinguished_coincide"] += 1
            dist_or_non_rs += 1
    densities = {k: Fraction(counts[k], sample_size)
                 for k in ("reducible_rs", "nontrivial_stabilizer",
                           "irreducible", "smallonetwo")}
    densities["distinguished_or_non_rs"] = Fraction(dist_or_non_rs,
                                                    sample_size)
    densities["reducible"] = densities.pop("reducible_rs")
    return SweepReport(p, n, p ** n, counts, densities, False,
                       sample_size, seed)


def _neg_gamma_square_fp(ring, parts) -> bool:
    # In F_q/F_p an element is a square iff its norm is a square in F_p,
    # and N(-gamma) over F_p[x]/(g) = prod(-root) = (-1)^deg (-1)^deg g(0).
    return all(ring.is_square(g.coeff(0)) for g, _ in parts)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# brute-force orthogonal groups and orbit partitions


def _so3_elements(p: int):
    """All of SO(B)(F_p) for the antidiagonal split form B, n = 3."""
    B = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=np.int64)
    vecs = np.array(list(itertools.product(range(p), repeat=3)),
                    dtype=np.int64)
    q = (2 * vecs[:, 0] * vecs[:, 2] + vecs[:, 1] ** 2) % p
    iso = vecs[(q == 0) & (vecs.any(axis=1))]
    out = []
    for c1 in iso:
        bc1 = B @ c1 % p
        # c2: B(c1,c2) = 0, Q(c2) = 1
        dot1 = vecs @ bc1 % p
        qv = (2 * vecs[:, 0] * vecs[:, 2] + vecs[:, 1] ** 2) % p
        c2s = vecs[(dot1 == 0) & (qv == 1)]
        for c2 in c2s:
            bc2 = B @ c2 % p
            d1 = vecs @ bc1 % p
            d2 = vecs @ bc2 % p
            qz = (2 * vecs[:, 0] * vecs[:, 2] + vecs[:, 1] ** 2) % p
            c3s = vecs[(d1 == 1) & (d2 == 0) & (qz == 0)]
            for c3 in c3s:
                g = np.stack([c1, c2, c3], axis=1)
                if int(round(np.linalg.det(g))) % p == 1:
                    out.append(g % p)
    return np.array(out, dtype=np.int64)


_SO3_CACHE = {}


def so3_group(p: int):
    if p not in _SO3_CACHE:
        if p ** 6 > BRUTEFORCE_BUDGET:
            raise BudgetError("group enumeration budget exceeded")
        _SO3_CACHE[p] = _so3_elements(p)
    return _SO3_CACHE[p]


def group_order(p: int, n: int = 3) -> int:
    """Brute-force |SO_n(F_p)| for n = 3, checked against the closed form
    p^(m^2) * prod(p^(2i) - 1)."""
    m = n // 2
    formula = p ** (m * m)
    for i in range(1, m + 1):
        formula *= p ** (2 * i) - 1
    if n != 3:
        return formula
    got = len(so3_group(p))
    if got != formula:
        raise PreconditionError(
            f"group order mismatch: enumerated {got}, formula {formula}")
    return got


def _fiber_key(a1: int, a2: int, e: int, p: int) -> int:
    return (a1 % p) * p * p + (a2 % p) * p + (e % p)


def _all_matrix_invariants(p: int):
    """(keys, mats): invariant key for every A in M_3(F_p)."""
    N = p ** 9
    if N * 30 > BRUTEFORCE_BUDGET:
        raise BudgetError("fiber enumeration budget exceeded")
    ints = np.arange(N, dtype=np.int64)
    digits = []
    rest = ints
    for _ in range(9):
        digits.append(rest % p)
        rest = rest // p
    A = np.stack(digits, axis=1).reshape(N, 3, 3)
    B = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=np.int64)
    # A* = -B A^t B ; M = A A*
    Astar = (-(B @ A.transpose(0, 2, 1) @ B)) % p
    M = np.matmul(A, Astar) % p
    tr = (M[:, 0, 0] + M[:, 1, 1] + M[:, 2, 2]) % p
    # second elementary symmetric = sum of principal 2x2 minors
    s2 = ((M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0])
          + (M[:, 0, 0] * M[:, 2, 2] - M[:, 0, 2] * M[:, 2, 0])
          + (M[:, 1, 1] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 1])) % p
    detA = np.round(np.linalg.det(A)).astype(np.int64) % p
    # charpoly(M) = x^3 + a1 x^2 + a2 x + e^2 with a1 = -tr, a2 = s2, e=detA
    keys = _fiber_key(0, 0, 0, p) + ((-tr) % p) * p * p + s2 * p + detA
    return keys, A


_FIBER_CACHE = {}


def _fibers(p: int):
    if p not in _FIBER_CACHE:
        keys, A = _all_matrix_invariants(p)
        order = np.argsort(keys, kind="stable")
        skeys = keys[order]
        bounds = np.searchsorted(skeys, np.arange(p ** 3 + 1))
        _FIBER_CACHE[p] = (order, bounds, A)
    return _FIBER_CACHE[p]


def _encode(mats, p: int):
    flat = mats.reshape(mats.shape[0], 9)
    out = np.zeros(mats.shape[0], dtype=np.int64)
    for k in range(9):
        out = out * p + flat[:, k]
    return out


def bruteforce_orbits(p: int, n: int, c: Invariants):
    """(orbit count, per-orbit stabilizer orders, orbit representatives)
    under SO_3 x SO_3 acting by A -> g1 A g2^(-1) on the fiber over c."""
    if n != 3:
        raise BudgetError("brute force is limited to n = 3")
    ring = c.ring
    if not (isinstance(ring, PrimeField) and ring.p == p):
        raise UsageError("invariants must live over F_p")
    G = so3_group(p)
    order, bounds, A = _fibers(p)
    key = _fiber_key(int(c.a[0]), int(c.a[1]), int(c.e), p)
    idx = order[bounds[key]:bounds[key + 1]]
    fiber = A[idx]
    if fiber.shape[0] == 0:
        return 0, [], []
    Ginv = np.array([_mat_inv3(g, p) for g in G], dtype=np.int64)
    fiber_keys = set(_encode(fiber, p).tolist())
    seen = set()
    stab_orders = []
    reps = []
    gsq = len(G) ** 2
    for mat, code in zip(fiber, _encode(fiber, p).tolist()):
        if code in seen:
            continue
        orbit = np.matmul(np.matmul(G[:, None], mat[None, None]),
                          Ginv[None, :]) % p
        codes = set(_encode(orbit.reshape(-1, 3, 3), p).tolist())
        if not codes <= fiber_keys:
            raise PreconditionError("orbit left the fiber (invariance bug)")
        seen |= codes
        reps.append(mat)
        stab_orders.append(gsq // len(codes))
    return len(reps), stab_orders, reps


def same_orbit(p: int, A1, A2) -> bool:
    """Whether two 3x3 matrices over F_p are SO_3 x SO_3 conjugate."""
    G = so3_group(p)
    Ginv = np.array([_mat_inv3(g, p) for g in G], dtype=np.int64)
    a1 = np.array(A1, dtype=np.int64) % p
    a2 = np.array(A2, dtype=np.int64) % p
    orbit = np.matmul(np.matmul(G[:, None], a1[None, None]),
                      Ginv[None, :]) % p
    target = _encode(a2[None], p)[0]
    return target in set(_encode(orbit.reshape(-1, 3, 3), p).tolist())


def _mat_inv3(g, p: int):
    d = int(round(np.linalg.det(g))) % p
    dinv = pow(d, p - 2, p)
    cof = np.zeros((3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            minor = np.delete(np.delete(g, i, axis=0), j, axis=1)
            cof[j, i] = ((-1) ** (i + j)) * int(round(np.linalg.det(minor)))
    return (cof * dinv) % p


# ---------------------------------------------------------------------------
# height windows over Z


def height_box_bounds(X: int, n: int):
    """Per-coordinate strict bounds: |a_i| < X^(2i), |e| < X^n."""
    return [X ** (2 * i) for i in range(1, n)] + [X ** n]


def height_box_count(X: int, n: int) -> int:
    out = 1
    for b in height_box_bounds(X, n):
        out *= max(0, 2 * b - 1)
    return out


def height_enumerate(X: int, n: int = 3, flags: bool = False):
    """All integral invariant tuples with height < X, streamed as dicts."""
    bounds = height_box_bounds(X, n)
    ranges = [range(-b + 1, b) for b in bounds]
    for tup in itertools.product(*ranges):
        a, e = tup[:-1], tup[-1]
        rec = {"a": list(a), "e": e}
        if flags:
            c = Invariants(QQ, tuple(Fraction(x) for x in a), Fraction(e))
            from .poly import discriminant
            rs = e != 0 and not QQ.is_zero(discriminant(c.fpoly()))
            rec["regular_semisimple"] = rs
            rec["minimal"] = _is_minimal(a, e, n)
            if rs:
                from .orbits import distinguished_coincide
                rec["distinguished_coincide"] = distinguished_coincide(c)
        yield rec


def _is_minimal(a, e, n: int) -> bool:
    """No prime scaling lambda = p with p^(2i) | a_i and p^n | e."""
    if e == 0 and all(x == 0 for x in a):
        return False
    candidates = set()
    probe = abs(e) if e != 0 else next(abs(x) for x in a if x != 0)
    d = 2
    while d * d <= probe:
        if probe % d == 0:
            candidates.add(d)
            while probe % d == 0:
                probe //= d
        d += 1
    if probe > 1:
        candidates.add(probe)
    for q in candidates:
        if e % q ** n != 0 and e != 0:
            continue
        if all(x % q ** (2 * i) == 0 for i, x in enumerate(a, start=1)):
            return False
    return True


def scale_invariants(a, e, lam: int, n: int):
    return ([x * lam ** (2 * i) for i, x in enumerate(a, start=1)],
            e * lam ** n)


def height_lt(a, e, X) -> bool:
    """Exact test h(c) < X for rational X (strict box membership)."""
    X = Fraction(X)
    n = len(a) + 1
    for i, x in enumerate(a, start=1):
        if Fraction(abs(x)) >= X ** (2 * i):
            return False
    return Fraction(abs(e)) < X ** n


# ---------------------------------------------------------------------------
# the strict-local-inclusion test family


def diverges_family(p: int, n: int = 3, count: int = 30,
                    seed: int = DEFAULT_SEED):
    """Members c with f = x(x-r1)(x-r2) + (p*m)^2: distinct nonzero unit
    roots with square product, one root of even positive valuation, and
    p * f(p) a p-adic square."""
    if n != 3:
        raise UsageError("the test family is implemented for n = 3")
    if p % 2 == 0 or not _is_prime(p):
        raise UsageError("p must be an odd prime")
    rng = random.Random(seed ^ p)
    out = []
    tries = 0
    while len(out) < count and tries < 10000:
        tries += 1
        r1 = rng.randrange(1, p)
        r2 = rng.randrange(1, p)
        if r1 == r2:
            continue
        if pow(r1 * r2 % p, (p - 1) // 2, p) != 1:
            continue
        m = rng.randrange(1, 4)
        e = p * m
        a1 = -(r1 + r2)
        a2 = r1 * r2
        c = Invariants(QQ, (Fraction(a1), Fraction(a2)), Fraction(e))
        from .poly import discriminant
        if QQ.is_zero(discriminant(c.fpoly())):
            continue
        out.append(c)
    if len(out) < count:
        raise BudgetError("family generation budget exhausted")
    return out
