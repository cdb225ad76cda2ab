"""Exact linear algebra over Q(zeta_M).

Dense helpers work on lists of rows of CycScalar.  Sparse vectors are dicts
mapping a column key (usually a monomial) to a nonzero CycScalar; they are
what the fixed-space and subalgebra-span computations use.
"""
from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence

from .cyclotomic import CycScalar

Matrix = list[list[CycScalar]]
SparseVec = dict


def identity(n: int, order: int) -> Matrix:
    one, zero = CycScalar.one(order), CycScalar.zero(order)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[CycScalar]], b: Sequence[Sequence[CycScalar]]) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            acc = None
            for t in range(k):
                x = ai[t]
                if x:
                    y = b[t][j]
                    if y:
                        acc = x * y if acc is None else acc + x * y
            row.append(acc if acc is not None else ai[0] * 0)
        out.append(row)
    return out


def _rref(rows: Matrix) -> tuple[Matrix, list[int]]:
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(mat: Matrix) -> int:
    return len(_rref(mat)[1])


def nullspace(mat: Matrix) -> list[list[CycScalar]]:
    """Basis of {v : mat v = 0} (column vectors as lists)."""
    if not mat:
        return []
    red, pivots = _rref(mat)
    ncols = len(mat[0])
    order = mat[0][0].order
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [CycScalar.zero(order)] * ncols
        v[f] = CycScalar.one(order)
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(v)
    return basis


def det(mat: Matrix) -> CycScalar:
    rows = [list(r) for r in mat]
    n = len(rows)
    order = rows[0][0].order
    result = CycScalar.one(order)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c]), None)
        if p is None:
            return CycScalar.zero(order)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            result = -result
        piv = rows[c][c]
        result = result * piv
        inv = piv.inverse()
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return result


def inverse(mat: Matrix) -> Matrix:
    n = len(mat)
    order = mat[0][0].order
    aug = [list(mat[i]) + identity(n, order)[i] for i in range(n)]
    red, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def charpoly(mat: Matrix) -> list[CycScalar]:
    """Coefficients of det(t I - mat), lowest degree first (Faddeev-LeVerrier)."""
    n = len(mat)
    order = mat[0][0].order
    coeffs = [CycScalar.zero(order)] * (n + 1)
    coeffs[n] = CycScalar.one(order)
    m_prev = [[CycScalar.zero(order)] * n for _ in range(n)]
    for k in range(1, n + 1):
        am = mat_mul(mat, m_prev)
        c_prev = coeffs[n - k + 1]
        mk = [[am[i][j] + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        amk = mat_mul(mat, mk)
        tr = sum((amk[i][i] for i in range(n)), CycScalar.zero(order))
        coeffs[n - k] = -tr / k
        m_prev = mk
    return coeffs


def poly_divide_linear(coeffs: list[CycScalar], root: CycScalar) -> tuple[list[CycScalar], CycScalar]:
    """Synthetic division by (t - root); returns (quotient, remainder)."""
    n = len(coeffs) - 1
    q = [CycScalar.zero(root.order)] * n
    acc = CycScalar.zero(root.order)
    for k in range(n, -1, -1):
        acc = acc * root + coeffs[k]
        if k > 0:
            q[k - 1] = acc
    return q, acc


def root_multiplicity(coeffs: list[CycScalar], root: CycScalar) -> tuple[int, list[CycScalar]]:
    mult = 0
    cur = list(coeffs)
    while len(cur) > 1:
        q, r = poly_divide_linear(cur, root)
        if r:
            break
        cur = q
        mult += 1
    return mult, cur


# ---------------------------------------------------------------------------
# sparse echelon forms


class Echelon:
    """Incrementally built row-echelon basis of a space of sparse vectors.

    Each stored row has a pivot key (its largest key under ``key``) and no
    other stored row shares that pivot.  ``reduce`` returns the residual of a
    vector modulo the span.
    """

    def __init__(self, key: Callable[[Hashable], object] | None = None):
        self.key = key or (lambda k: k)
        self.rows: dict[Hashable, SparseVec] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: SparseVec) -> SparseVec:
        v = dict(vec)
        rows = self.rows
        key = self.key
        while True:
            hits = [k for k in v if k in rows]
            if not hits:
                return v
            k = max(hits, key=key)
            f = v[k]
            for col, c in rows[k].items():
                nv = v.get(col)
                nv = -(f * c) if nv is None else nv - f * c
                if nv:
                    v[col] = nv
                else:
                    v.pop(col, None)

    def add(self, vec: SparseVec) -> SparseVec | None:
        """Insert vec; returns the normalized new row, or None if dependent."""
        v = self.reduce(vec)
        if not v:
            return None
        piv = max(v, key=self.key)
        inv = v[piv].inverse()
        row = {k: c * inv for k, c in v.items()}
        self.rows[piv] = row
        return row

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)


def sparse_kernel(rows: Iterable[SparseVec], columns: Sequence[Hashable], order: int) -> list[SparseVec]:
    """Basis of the vectors v (indexed by columns) with row . v = 0 for all rows.

    Columns are processed in the given order; the kernel basis has one vector
    per free column, in that order, normalized to 1 at its free column.
    """
    pos = {c: i for i, c in enumerate(columns)}
    ech: dict[Hashable, SparseVec] = {}  # pivot column -> fully reduced row
    for row in rows:
        v = {c: x for c, x in row.items() if x}
        # reduce by existing pivots
        for p in [c for c in v if c in ech]:
            if p not in v:
                continue
            f = v[p]
            for col, c in ech[p].items():
                nv = v.get(col)
                nv = -(f * c) if nv is None else nv - f * c
                if nv:
                    v[col] = nv
                else:
                    v.pop(col, None)
        # pivots may have been reintroduced? no: stored rows have zero at other pivots
        if not v:
            continue
        piv = min(v, key=pos.__getitem__)
        inv = v[piv].inverse()
        v = {c: x * inv for c, x in v.items()}
        # eliminate the new pivot from stored rows
        for p, r in ech.items():
            f = r.get(piv)
            if f:
                for col, c in v.items():
                    nv = r.get(col)
                    nv = -(f * c) if nv is None else nv - f * c
                    if nv:
                        r[col] = nv
                    else:
                        r.pop(col, None)
        ech[piv] = v
    one = CycScalar.one(order)
    basis = []
    for fcol in columns:
        if fcol in ech:
            continue
        vec = {fcol: one}
        for p, r in ech.items():
            c = r.get(fcol)
            if c:
                vec[p] = -c
        basis.append(vec)
    return basis
