"""Generic exact matrix algebra over the package rings.

Characteristic polynomials use the division-free Berkowitz algorithm so
p-adic precision is never lost to pivoting; Gaussian routines pick
minimal-valuation pivots over Q_p.
"""

from __future__ import annotations

from .errors import PreconditionError
from .poly import Poly
from .rings import PadicField


class Mat:
    __slots__ = ("ring", "rows")

    def __init__(self, ring, rows):
        rows = [tuple(r) for r in rows]
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise PreconditionError("ragged matrix")
        self.ring = ring
        self.rows = tuple(rows)

    @staticmethod
    def identity(ring, n: int) -> "Mat":
        return Mat(ring, [[ring.one if i == j else ring.zero
                           for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(ring, m: int, n: int) -> "Mat":
        return Mat(ring, [[ring.zero] * n for _ in range(m)])

    @staticmethod
    def from_ints(ring, rows) -> "Mat":
        return Mat(ring, [[ring.from_int(c) for c in r] for r in rows])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __add__(self, other: "Mat") -> "Mat":
        R = self.ring
        return Mat(R, [[R.add(a, b) for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        R = self.ring
        return Mat(R, [[R.sub(a, b) for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        R = self.ring
        return Mat(R, [[R.neg(a) for a in r] for r in self.rows])

    def __mul__(self, other: "Mat") -> "Mat":
        R = self.ring
        if self.ncols != other.nrows:
            raise PreconditionError("matrix dimension mismatch")
        ot = other.transpose().rows
        out = []
        for r in self.rows:
            row = []
            for c in ot:
                acc = R.zero
                for a, b in zip(r, c):
                    acc = R.add(acc, R.mul(a, b))
                row.append(acc)
            out.append(row)
        return Mat(R, out)

    def scale(self, c) -> "Mat":
        R = self.ring
        return Mat(R, [[R.mul(c, a) for a in r] for r in self.rows])

    def transpose(self) -> "Mat":
        return Mat(self.ring, list(zip(*self.rows)) if self.rows else [])

    def apply(self, v):
        """Matrix times column vector (list)."""
        R = self.ring
        out = []
        for r in self.rows:
            acc = R.zero
            for a, b in zip(r, v):
                acc = R.add(acc, R.mul(a, b))
            out.append(acc)
        return out

    def trace(self):
        R = self.ring
        acc = R.zero
        for i in range(self.nrows):
            acc = R.add(acc, self.rows[i][i])
        return acc

    def col(self, j: int):
        return [r[j] for r in self.rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        if self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        R = self.ring
        return all(R.eq(a, b) for r1, r2 in zip(self.rows, other.rows)
                   for a, b in zip(r1, r2))

    def __hash__(self):
        return hash((self.ring, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(self.ring.scalar_str(c) for c in r)
                         for r in self.rows)
        return f"Mat[{body}]"

    def map_ring(self, ring, conv) -> "Mat":
        return Mat(ring, [[conv(c) for c in r] for r in self.rows])

    def is_symmetric(self) -> bool:
        R = self.ring
        n = self.nrows
        return all(R.eq(self.rows[i][j], self.rows[j][i])
                   for i in range(n) for j in range(i))


def block_matrix(ring, blocks) -> Mat:
    """Assemble from a 2D grid of Mat blocks."""
    rows = []
    for brow in blocks:
        for i in range(brow[0].nrows):
            rows.append([c for blk in brow for c in blk.rows[i]])
    return Mat(ring, rows)


def _pivot_key(ring, a):
    """Smaller is better; p-adic pivots prefer minimal valuation."""
    if isinstance(ring, PadicField):
        return a.valuation()
    return 0


def _best_pivot(ring, col_entries):
    """Index of the preferred nonzero pivot, or None."""
    best, best_key = None, None
    for idx, a in col_entries:
        if ring.is_zero(a):
            continue
        key = _pivot_key(ring, a)
        if best is None or key < best_key:
            best, best_key = idx, key
        if key == 0 and not isinstance(ring, PadicField):
            break
    return best


def rref(M: Mat):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = M.ring
    A = [list(r) for r in M.rows]
    m, n = len(A), (len(A[0]) if A else 0)
    piv_cols = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        sel = _best_pivot(R, [(i, A[i][c]) for i in range(r, m)])
        if sel is None:
            continue
        A[r], A[sel] = A[sel], A[r]
        inv = R.inv(A[r][c])
        A[r] = [R.mul(inv, a) for a in A[r]]
        for i in range(m):
            if i != r and not R.is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [R.sub(a, R.mul(f, b)) for a, b in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    return Mat(R, A), piv_cols


def rank(M: Mat) -> int:
    return len(rref(M)[1])


def solve(M: Mat, b):
    """One solution of M x = b, or raise if inconsistent."""
    R = M.ring
    aug = Mat(R, [list(r) + [bb] for r, bb in zip(M.rows, b)])
    E, piv = rref(aug)
    n = M.ncols
    for row in E.rows:
        if all(R.is_zero(a) for a in row[:n]) and not R.is_zero(row[n]):
            raise PreconditionError("inconsistent linear system")
    x = [R.zero] * n
    for r_idx, c in enumerate(piv):
        if c < n:
            x[c] = E.rows[r_idx][n]
    return x


def nullspace(M: Mat):
    """Basis (list of vectors) of the right nullspace."""
    R = M.ring
    E, piv = rref(M)
    n = M.ncols
    piv_set = set(piv)
    free = [j for j in range(n) if j not in piv_set]
    basis = []
    for f in free:
        v = [R.zero] * n
        v[f] = R.one
        for r_idx, c in enumerate(piv):
            v[c] = R.neg(E.rows[r_idx][f])
        basis.append(v)
    return basis


def inverse(M: Mat) -> Mat:
    R = M.ring
    n = M.nrows
    aug = Mat(R, [list(r) + list(Mat.identity(R, n).rows[i])
                  for i, r in enumerate(M.rows)])
    E, piv = rref(aug)
    if piv != list(range(n)):
        raise PreconditionError("matrix not invertible")
    return Mat(R, [row[n:] for row in E.rows])


def det(M: Mat):
    """Determinant via Berkowitz (division-free)."""
    cp = charpoly(M)
    R = M.ring
    n = M.nrows
    return R.mul(R.from_int((-1) ** n), cp.coeff(0))


def charpoly(M: Mat) -> Poly:
    """Monic characteristic polynomial det(xI - M), Berkowitz algorithm."""
    R = M.ring
    n = M.nrows
    if n == 0:
        return Poly(R, [R.one])
    # vectors of ascending charpoly coefficients, degree grows by 1 per step
    C = [R.neg(M.rows[0][0]), R.one]
    for k in range(1, n):
        # principal (k+1)x(k+1) top-left block; Berkowitz Toeplitz step
        a = M.rows[k][k]
        row = [M.rows[k][j] for j in range(k)]   # R vector
        colv = [M.rows[i][k] for i in range(k)]  # S vector
        sub = [[M.rows[i][j] for j in range(k)] for i in range(k)]
        # powers: t_0 = a, t_i = row * sub^{i-1} * colv
        t = [a]
        w = colv
        for _ in range(k):
            acc = R.zero
            for rr, ww in zip(row, w):
                acc = R.add(acc, R.mul(rr, ww))
            t.append(acc)
            w = [sum_prod(R, sub[i], w) for i in range(k)]
        # Toeplitz multiply: newC[d] = C[d-1] - sum_{i>=0} t[i]*C[d+i]... build
        newC = [R.zero] * (k + 2)
        for d in range(k + 1):
            # contribution of previous charpoly shifted by x
            newC[d + 1] = R.add(newC[d + 1], C[d])
        for i, ti in enumerate(t):
            for d in range(k + 1):
                if d + i <= k:
                    newC[d] = R.sub(newC[d], R.mul(ti, C[d + i]))
        C = newC
    return Poly(R, C)


def sum_prod(R, xs, ys):
    acc = R.zero
    for a, b in zip(xs, ys):
        acc = R.add(acc, R.mul(a, b))
    return acc


def pfaffian(M: Mat):
    """Pfaffian of an antisymmetric matrix by recursive expansion."""
    R = M.ring
    n = M.nrows
    if n % 2 != 0:
        raise PreconditionError("Pfaffian needs even size")
    if n == 0:
        return R.one

    def rec(idx):
        if not idx:
            return R.one
        i0 = idx[0]
        acc = R.zero
        for pos in range(1, len(idx)):
            j = idx[pos]
            a = M.rows[i0][j]
            if R.is_zero(a):
                continue
            rest = [k for k in idx[1:] if k != j]
            term = R.mul(a, rec(rest))
            if pos % 2 == 0:
                term = R.neg(term)
            acc = R.add(acc, term)
        return acc

    return rec(list(range(n)))
