"""Graded automorphisms, finite group closure and element orders.

A GradedMap stores an n x n matrix whose column j is the image of x_j in the
x-basis, so composition (g h)(x) = g(h(x)) is the matrix product g.matrix @
h.matrix.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .algebra import NCPoly, PBWPresentation, _accum, _add, _unit
from .cyclotomic import CycScalar, _into, embed_root
from .errors import GroupTooLargeError, NotAutomorphismError
from . import linalg

DEFAULT_CAP = 10_000


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class GradedMap:
    """A graded automorphism of a PBW algebra given by its degree-1 matrix."""

    __slots__ = ("ring", "matrix", "validated", "_order", "_img", "_mono", "_hash")

    def __init__(self, ring: PBWPresentation, matrix, validate: bool = True):
        n = ring.n
        mat = tuple(tuple(ring.scalar(c) for c in row) for row in matrix)
        if len(mat) != n or any(len(r) != n for r in mat):
            raise ValueError(f"matrix must be {n}x{n}")
        self.ring = ring
        self.matrix = mat
        self._order = None
        self._img: dict = {}
        self._mono = None
        self._hash = None
        self.validated = False
        if validate:
            if not is_graded_automorphism(self, ring):
                raise NotAutomorphismError("generator is not a graded automorphism")
            self.validated = True

    @classmethod
    def _trusted(cls, ring, mat) -> "GradedMap":
        g = cls.__new__(cls)
        g.ring = ring
        g.matrix = mat
        g._order = None
        g._img = {}
        g._mono = None
        g._hash = None
        g.validated = True
        return g

    # -- structure -----------------------------------------------------
    @property
    def n(self) -> int:
        return self.ring.n

    def __eq__(self, other):
        return isinstance(other, GradedMap) and self.matrix == other.matrix

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.matrix)
        return self._hash

    def __mul__(self, other: "GradedMap") -> "GradedMap":
        mat = linalg.mat_mul(self.matrix, other.matrix)
        return GradedMap._trusted(self.ring, tuple(tuple(r) for r in mat))

    def inverse(self) -> "GradedMap":
        inv = linalg.inverse([list(r) for r in self.matrix])
        return GradedMap._trusted(self.ring, tuple(tuple(r) for r in inv))

    def __pow__(self, k: int) -> "GradedMap":
        if k < 0:
            return self.inverse() ** (-k)
        out = identity_map(self.ring)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_identity(self) -> bool:
        return all((c == 1) if i == j else not c
                   for i, row in enumerate(self.matrix) for j, c in enumerate(row))

    def det(self) -> CycScalar:
        return linalg.det([list(r) for r in self.matrix])

    def trace(self) -> CycScalar:
        return sum((self.matrix[i][i] for i in range(self.n)), CycScalar.zero(self.ring.order))

    def image(self, j: int) -> NCPoly:
        """g(x_j), 1-based."""
        return self.ring.linear([self.matrix[i][j - 1] for i in range(self.n)])

    def monomial_data(self):
        """(sigma, c) with g(x_j) = c[j] x_{sigma[j]} (0-based), or None."""
        if self._mono is None:
            sigma, coeffs = [], []
            for j in range(self.n):
                nz = [i for i in range(self.n) if self.matrix[i][j]]
                if len(nz) != 1:
                    self._mono = False
                    return None
                sigma.append(nz[0])
                coeffs.append(self.matrix[nz[0]][j])
            self._mono = (tuple(sigma), tuple(coeffs))
        return self._mono or None

    def is_diagonal(self) -> bool:
        md = self.monomial_data()
        return md is not None and all(s == j for j, s in enumerate(md[0]))

    def order(self, cap: int = DEFAULT_CAP) -> int:
        if self._order is None:
            self._order = element_order(self, cap)
        return self._order

    def to_json(self) -> list:
        return [[c.to_json() for c in row] for row in self.matrix]

    def __repr__(self):
        rows = "; ".join(", ".join(str(c) for c in r) for r in self.matrix)
        return f"GradedMap([{rows}])"

    # -- action on polynomials -----------------------------------------
    def _image_mono(self, e) -> dict:
        hit = self._img.get(e)
        if hit is not None:
            return hit
        A = self.ring
        md = self.monomial_data()
        if md is not None:
            sigma, c = md
            coeff = CycScalar.one(A.order)
            cur = {(0,) * A.n: coeff}
            for j, a in enumerate(e):
                if not a:
                    continue
                coeff = c[j] ** a
                block = [0] * A.n
                block[sigma[j]] = a
                nxt: dict = {}
                for m, cm in cur.items():
                    for m2, c2 in A._mono_mul(m, tuple(block)).items():
                        _accum(nxt, m2, cm * c2 * coeff)
                cur = nxt
            res = cur
        else:
            j = max((i for i, a in enumerate(e) if a), default=None)
            if j is None:
                res = {e: CycScalar.one(A.order)}
            else:
                ep = list(e)
                ep[j] -= 1
                prev = self._image_mono(tuple(ep))
                col = {_unit(A.n, i): self.matrix[i][j] for i in range(A.n) if self.matrix[i][j]}
                res = {}
                for m, cm in prev.items():
                    for u, cu in col.items():
                        for m2, c2 in A._mono_mul(m, u).items():
                            _accum(res, m2, cm * cu * c2)
        self._img[e] = res
        return res

    def __call__(self, f: NCPoly) -> NCPoly:
        return apply(self, f)


def identity_map(A: PBWPresentation) -> GradedMap:
    return GradedMap._trusted(A, tuple(tuple(r) for r in linalg.identity(A.n, A.order)))


def is_graded_automorphism(g: GradedMap, A: PBWPresentation) -> bool:
    """Check that every defining relation is preserved in degree 2."""
    if len(g.matrix) != A.n:
        raise ValueError("matrix size does not match the number of generators")
    if not linalg.det([list(r) for r in g.matrix]):
        raise NotAutomorphismError("matrix is singular, so it cannot define an automorphism")
    imgs = [A.linear([g.matrix[i][j] for i in range(A.n)]) for j in range(A.n)]
    for (j, i), rhs in A.relation_words():
        lhs = imgs[j - 1] * imgs[i - 1]
        mapped = A.zero()
        for m, c in rhs.terms.items():
            a, b = [k for k, x in enumerate(m) for _ in range(x)]
            mapped = mapped + (imgs[a] * imgs[b]).scale(c)
        if lhs != mapped:
            return False
    return True


def apply(g: GradedMap, f: NCPoly) -> NCPoly:
    """Image of f under the algebra automorphism extending g."""
    if not g.validated:
        raise NotAutomorphismError("map has not been validated against its presentation")
    out: dict = {}
    for m, c in f.terms.items():
        for m2, c2 in g._image_mono(m).items():
            _accum(out, m2, c * c2)
    return NCPoly(f.ring, out)


# ---------------------------------------------------------------------------
# constructors (indices are 1-based)


def _matrix_from_columns(A: PBWPresentation, cols: dict) -> list[list[CycScalar]]:
    mat = [list(r) for r in linalg.identity(A.n, A.order)]
    for j, col in cols.items():
        for i in range(A.n):
            mat[i][j] = CycScalar.zero(A.order)
        for i, c in col.items():
            mat[i][j] = A.scalar(c)
    return mat


def root(A: PBWPresentation, m: int, e: int = 1) -> CycScalar:
    """zeta_m^e inside the working field of A."""
    try:
        return _into(embed_root(m, e), A.order)
    except ValueError:
        raise ValueError(f"zeta_{m} is not in Q(zeta_{A.order}); enlarge the root-of-unity order") from None


def theta(A: PBWPresentation, s: int, lam) -> GradedMap:
    lam = A.scalar(lam)
    if lam == 1:
        raise ValueError("theta_{s,lambda} needs lambda != 1")
    return GradedMap(A, _matrix_from_columns(A, {s - 1: {s - 1: lam}}))


def tau(A: PBWPresentation, s: int, t: int, lam=1) -> GradedMap:
    """x_s -> lam x_t, x_t -> -lam^{-1} x_s, other generators fixed."""
    if A.kind != "skew":
        raise ValueError("tau_{s,t,lambda} is defined on skew polynomial rings")
    if s == t:
        raise ValueError("tau needs s != t")
    if A.p(s, t) != -1:
        raise ValueError(f"tau_{{{s},{t}}} requires p_{s}{t} = -1")
    for j in range(1, A.n + 1):
        if j not in (s, t) and A.p(s, j) != A.p(t, j):
            raise ValueError(f"tau_{{{s},{t}}} requires p_{s}{j} = p_{t}{j}")
    lam = A.scalar(lam)
    cols = {s - 1: {t - 1: lam}, t - 1: {s - 1: -lam.inverse()}}
    return GradedMap(A, _matrix_from_columns(A, cols))


def s_map(A: PBWPresentation, i: int, j: int, lam) -> GradedMap:
    """x_i -> lam x_i, x_j -> lam^{-1} x_j."""
    if i == j:
        raise ValueError("s_{i,j,lambda} needs i != j")
    lam = A.scalar(lam)
    return GradedMap(A, _matrix_from_columns(A, {i - 1: {i - 1: lam}, j - 1: {j - 1: lam.inverse()}}))


def elementary(A: PBWPresentation, blocks: dict) -> GradedMap:
    """Block-respecting basis change; ``blocks`` maps a block (tuple of 1-based
    indices, as returned by block_decomposition) to a square matrix acting on
    the span of those generators.  Blocks not listed are left fixed."""
    from .structure import block_decomposition

    known = {tuple(b) for b in block_decomposition(A)}
    mat = [list(r) for r in linalg.identity(A.n, A.order)]
    for blk, sub in blocks.items():
        blk = tuple(sorted(blk))
        if blk not in known:
            raise ValueError(f"{list(blk)} is not a block of this ring")
        if len(sub) != len(blk) or any(len(r) != len(blk) for r in sub):
            raise ValueError("block matrix has the wrong size")
        for a, i in enumerate(blk):
            for b, j in enumerate(blk):
                mat[i - 1][j - 1] = A.scalar(sub[a][b])
    return GradedMap(A, mat)


def g_b(A: PBWPresentation, b) -> GradedMap:
    """On O_q(M_2): x12 -> b x21, x21 -> b^{-1} x12, x11 and x22 fixed."""
    if A.kind != "quantum_matrix":
        raise ValueError("g_b is defined on O_q(M_2)")
    b = A.scalar(b)
    return GradedMap(A, _matrix_from_columns(A, {1: {2: b}, 2: {1: b.inverse()}}))


def classical_family(A: PBWPresentation, m: int, p: int) -> list[GradedMap]:
    """Generators of G(m,p,n), n = A.n: diag(z, 1.., z^{-1} at i), diag(z^p, 1, ...)
    and the adjacent transpositions, z a primitive m-th root of unity."""
    if m < 1 or p < 1 or m % p:
        raise ValueError("G(m,p,n) needs p | m")
    n = A.n
    z = root(A, m)
    gens = []
    if m > 1:
        for i in range(1, n):
            gens.append(GradedMap(A, _matrix_from_columns(A, {0: {0: z}, i: {i: z.inverse()}})))
        if p < m:
            gens.append(GradedMap(A, _matrix_from_columns(A, {0: {0: z ** p}})))
    for i in range(n - 1):
        gens.append(GradedMap(A, _matrix_from_columns(A, {i: {i + 1: 1}, i + 1: {i: 1}})))
    return gens


# ---------------------------------------------------------------------------
# finite groups


@dataclass
class FiniteGroup:
    """An explicitly enumerated matrix group (elements in discovery order)."""

    ring: PBWPresentation
    elements: list
    generators: list  # indices into elements
    words: list  # one word (tuple of generator positions) per element
    index: dict = field(default_factory=dict, repr=False)
    _dist: dict | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g.matrix in self.index

    def find(self, g: GradedMap) -> int | None:
        return self.index.get(g.matrix)

    def generator_maps(self) -> list[GradedMap]:
        return [self.elements[i] for i in self.generators]

    def is_abelian(self) -> bool:
        gens = self.generator_maps()
        return all(a * b == b * a for a in gens for b in gens)

    def element_order(self, g: GradedMap) -> int:
        return element_order(g, len(self) + 1)

    def to_json(self, full: bool = False) -> dict:
        out = {"order": len(self), "generators": [self.elements[i].to_json() for i in self.generators],
               "order_distribution": {str(k): v for k, v in order_distribution(self).items()}}
        if full:
            out["elements"] = [g.to_json() for g in self.elements]
        return out


def close_group(gens: Sequence[GradedMap], cap: int = DEFAULT_CAP, ring: PBWPresentation | None = None) -> FiniteGroup:
    """Breadth-first closure of the generated group; errors past ``cap`` elements."""
    gens = list(gens)
    if ring is None:
        if not gens:
            raise ValueError("need a ring when no generators are given")
        ring = gens[0].ring
    for g in gens:
        if not g.validated:
            raise NotAutomorphismError("generators must be validated automorphisms")
    e = identity_map(ring)
    elements = [e]
    words: list = [()]
    index = {e.matrix: 0}
    head = 0
    while head < len(elements):
        cur = elements[head]
        for k, g in enumerate(gens):
            h = cur * g
            pos = index.get(h.matrix)
            if pos is None:
                if len(elements) >= cap:
                    raise GroupTooLargeError(f"group order exceeds cap ({cap})")
                pos = len(elements)
                index[h.matrix] = pos
                elements.append(h)
                words.append(words[head] + (k,))
        head += 1
    gen_pos = [index[g.matrix] for g in gens]
    return FiniteGroup(ring, elements, gen_pos, words, index)


def subgroup(G: FiniteGroup, gens: Iterable[GradedMap]) -> FiniteGroup:
    return close_group(list(gens), cap=len(G) + 1, ring=G.ring)


def element_order(g: GradedMap, cap: int = DEFAULT_CAP) -> int:
    if g._order is not None:
        return g._order
    h = g
    k = 1
    while not h.is_identity():
        h = h * g
        k += 1
        if k > cap:
            raise GroupTooLargeError(f"element order exceeds cap ({cap})")
    g._order = k
    return k


def signed_permutation_order(g: GradedMap) -> int:
    """Order of a +-1 weighted permutation matrix from its weighted cycles."""
    md = g.monomial_data()
    if md is None or any(c != 1 and c != -1 for c in md[1]):
        raise ValueError("not a +-1 weighted permutation matrix")
    sigma, c = md
    seen = set()
    out = 1
    for start in range(g.n):
        if start in seen:
            continue
        length, neg, j = 0, 0, start
        while j not in seen:
            seen.add(j)
            length += 1
            neg += c[j] == -1
            j = sigma[j]
        out = _lcm(out, length * (2 if neg % 2 else 1))
    return out


def monomial_cycle_order(g: GradedMap) -> int:
    """t for a weighted t-cycle with an even number of -1 weights, 2t if odd.

    Fixed points with weight +1 are allowed; everything else must form one cycle.
    """
    md = g.monomial_data()
    if md is None or any(c != 1 and c != -1 for c in md[1]):
        raise ValueError("not a +-1 weighted permutation matrix")
    sigma, c = md
    moving = [j for j in range(g.n) if sigma[j] != j or c[j] != 1]
    if not moving:
        return 1
    cyc, j = [], moving[0]
    while True:
        cyc.append(j)
        j = sigma[j]
        if j == moving[0]:
            break
    if sorted(cyc) != sorted(moving):
        raise ValueError("permutation is not a single cycle")
    t = len(cyc)
    neg = sum(1 for j in cyc if c[j] == -1)
    return t if neg % 2 == 0 else 2 * t


def _orders(G: FiniteGroup) -> list[int]:
    """Element orders via the index table (no repeated matrix powers)."""
    out = [0] * len(G)
    for k, g in enumerate(G.elements):
        if out[k]:
            continue
        o = element_order(g, len(G) + 1)
        out[k] = o
        # powers g^j have order o / gcd(o, j)
        h = g
        for j in range(2, o):
            h = h * g
            pos = G.index.get(h.matrix)
            if pos is not None and not out[pos]:
                out[pos] = o // gcd(o, j)
                G.elements[pos]._order = out[pos]
    return out


def order_distribution(G: FiniteGroup) -> dict[int, int]:
    if G._dist is None:
        G._dist = dict(sorted(Counter(_orders(G)).items()))
    return G._dist


def compare_order_distributions(G1: FiniteGroup, G2: FiniteGroup) -> dict:
    """Side-by-side order statistics.

    ``first_differing_order`` scans element orders from the largest down,
    which is how non-isomorphism is detected for M(n,1,2) versus G(2,2,n).
    """
    d1, d2 = order_distribution(G1), order_distribution(G2)
    keys = sorted(set(d1) | set(d2))
    differ = [k for k in keys if d1.get(k, 0) != d2.get(k, 0)]
    return {
        "orders": [len(G1), len(G2)],
        "distribution_a": {str(k): d1.get(k, 0) for k in keys},
        "distribution_b": {str(k): d2.get(k, 0) for k in keys},
        "differing_orders": differ,
        "first_differing_order": max(differ) if differ else None,
        "same_distribution": not differ,
    }


def find_dicyclic_pair(G: FiniteGroup, m: int):
    """A pair (a, b) in G with a^{2m} = 1, b^{-1} a b = a^{-1}, b^2 = a^m and
    <a, b> = G, or None.  a is taken of exact order 2m."""
    if len(G) != 4 * m:
        return None
    orders = _orders(G)
    for ia, a in enumerate(G.elements):
        if orders[ia] != 2 * m:
            continue
        am = a ** m
        ainv = a.inverse()
        cyc = {(a ** k).matrix for k in range(2 * m)}
        for b in G.elements:
            if b.matrix in cyc:
                continue
            if b * b == am and b.inverse() * a * b == ainv:
                return a, b
    return None
