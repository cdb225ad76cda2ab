"""Quadratic PBW algebras: skew polynomial rings, O_q(M_2), general presentations.

Generators are numbered 1..n in the public API.  Internally a monomial is a
tuple of n exponents and represents the ordered word x_1^{e_1} ... x_n^{e_n}.
The term order is graded lexicographic with x_1 < x_2 < ... < x_n, so x_n is
the most significant variable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, Sequence

from .cyclotomic import CycScalar, _field, _into, root_exponent, scalar_from_json, sqrt_in_field
from .errors import SpecError
from .linalg import Echelon

Mono = tuple  # tuple[int, ...]

TERM_ORDER = "deglex, x1 < x2 < ... < xn"


def term_key(e: Mono):
    return (sum(e), e[::-1])


def monomials(n: int, d: int) -> list[Mono]:
    """All ordered monomials of degree d in n variables, increasing in term order."""
    out: list[Mono] = []

    def rec(prefix: list[int], i: int, left: int) -> None:
        if i == n - 1:
            out.append(tuple(prefix + [left]))
            return
        for a in range(left, -1, -1):
            rec(prefix + [a], i + 1, left - a)

    if n == 0:
        return [()] if d == 0 else []
    rec([], 0, d)
    out.sort(key=term_key)
    return out


def pbw_dimension(n: int, d: int) -> int:
    return comb(n + d - 1, d) if n else int(d == 0)


def _unit(n: int, i: int) -> Mono:
    e = [0] * n
    e[i] = 1
    return tuple(e)


def _add(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _accum(acc: dict, mono: Mono, c: CycScalar) -> None:
    old = acc.get(mono)
    new = c if old is None else old + c
    if new:
        acc[mono] = new
    elif old is not None:
        del acc[mono]


# ---------------------------------------------------------------------------
# presentations


class PBWPresentation:
    """Relations x_j x_i -> lead[i,j] x_i x_j + tail[i,j] for i < j (0-based here).

    Use :func:`skew`, :func:`quantum_matrix`, :func:`general` or
    :func:`make_presentation` to build one; construction validates.
    """

    def __init__(self, n: int, order: int, lead: dict, tail: dict, kind: str,
                 names: Sequence[str] | None = None, source: dict | None = None):
        self.n = n
        self.order = order
        self.lead = lead
        self.tail = {k: dict(v) for k, v in tail.items() if v}
        self.kind = kind
        self.names = list(names) if names else [f"x{i + 1}" for i in range(n)]
        self.source = source or {}
        self._mtg: dict = {}
        self._mm: dict = {}
        self._active: set = set()
        self._skew_exp = None
        if kind == "skew":
            self._prepare_skew()
        self._check_tails()
        if kind == "general":
            self._check_overlaps()

    # field_order is the name used in reports
    @property
    def field_order(self) -> int:
        return self.order

    def __repr__(self):
        return f"PBWPresentation(kind={self.kind!r}, n={self.n}, order={self.order})"

    def __eq__(self, other):
        return (isinstance(other, PBWPresentation) and self.n == other.n
                and self.order == other.order and self.lead == other.lead
                and self.tail == other.tail)

    def __hash__(self):
        return hash((self.n, self.order, self.kind))

    # -- parameters ----------------------------------------------------
    def p(self, i: int, j: int) -> CycScalar:
        """p_ij (1-based) for a skew ring, filled for i >= j as p_ii = 1, p_ji = 1/p_ij."""
        return self._p(i - 1, j - 1)

    def _p(self, i: int, j: int) -> CycScalar:
        if i == j:
            return CycScalar.one(self.order)
        if i < j:
            return self.lead[i, j]
        return self.lead[j, i].inverse()

    def param_matrix(self) -> list[list[CycScalar]]:
        return [[self._p(i, j) for j in range(self.n)] for i in range(self.n)]

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def one(self) -> "NCPoly":
        return NCPoly(self, {(0,) * self.n: CycScalar.one(self.order)})

    def gen(self, i: int) -> "NCPoly":
        return NCPoly(self, {_unit(self.n, i - 1): CycScalar.one(self.order)})

    def gens(self) -> list["NCPoly"]:
        return [self.gen(i) for i in range(1, self.n + 1)]

    def mono(self, exps: Sequence[int], coeff=1) -> "NCPoly":
        c = self.scalar(coeff)
        return NCPoly(self, {tuple(exps): c} if c else {})

    def scalar(self, c) -> CycScalar:
        if isinstance(c, CycScalar):
            return c if c.order == self.order else _into(c, self.order)
        return scalar_from_json(c, self.order)

    def linear(self, coeffs: Sequence) -> "NCPoly":
        terms = {}
        for i, c in enumerate(coeffs):
            c = self.scalar(c)
            if c:
                terms[_unit(self.n, i)] = c
        return NCPoly(self, terms)

    # -- validation ----------------------------------------------------
    def _prepare_skew(self) -> None:
        n = self.n
        exps = {}
        N = None
        for (i, j), c in self.lead.items():
            r = root_exponent(c)
            if r is None:
                return
            exps[i, j] = r[0]
            N = r[1]
        if N is None:
            N = _field(self.order).n_roots
        self._skew_exp = (N, [[exps.get((i, j), 0) if i < j else 0 for j in range(n)] for i in range(n)])

    def _check_tails(self) -> None:
        for (i, j), t in self.tail.items():
            top = term_key(_add(_unit(self.n, i), _unit(self.n, j)))
            for m in t:
                if sum(m) != 2:
                    raise SpecError(f"tail of relation ({j + 1},{i + 1}) is not quadratic")
                if term_key(m) >= top:
                    raise SpecError(
                        f"tail monomial {self.fmt_mono(m)} of relation ({j + 1},{i + 1}) is not below "
                        f"{self.fmt_mono(_add(_unit(self.n, i), _unit(self.n, j)))}")

    def _check_overlaps(self) -> None:
        bad = self.overlap_defects()
        if bad:
            k, j, i = bad[0]
            raise SpecError(f"not a PBW presentation: overlap x{k}x{j}x{i} is ambiguous")

    def overlap_defects(self) -> list[tuple[int, int, int]]:
        """Triples (k, j, i), k > j > i, where (x_k x_j) x_i and x_k (x_j x_i) differ."""
        n = self.n
        bad = []
        for i, j, k in combinations(range(n), 3):
            # word x_k x_j x_i reduced two ways
            left = self._word([k, j, i])
            right = {}
            for m, c in self._word([j, i]).items():
                for m2, c2 in self._mono_mul(_unit(n, k), m).items():
                    _accum(right, m2, c * c2)
            if left != right:
                bad.append((k + 1, j + 1, i + 1))
        return bad

    # -- multiplication ------------------------------------------------
    def _word(self, word: Iterable[int]) -> dict:
        cur = {(0,) * self.n: CycScalar.one(self.order)}
        for k in word:
            nxt: dict = {}
            for m, c in cur.items():
                for m2, c2 in self._times_gen(m, k).items():
                    _accum(nxt, m2, c * c2)
            cur = nxt
        return cur

    def _times_gen(self, e: Mono, k: int) -> dict:
        """Normal form of x^e * x_k."""
        if self._skew_exp is not None or self.kind == "skew":
            return self._mono_mul(e, _unit(self.n, k))
        key = (e, k)
        hit = self._mtg.get(key)
        if hit is not None:
            return hit
        if key in self._active:
            raise SpecError("rewriting does not terminate for this presentation")
        j = max((i for i, a in enumerate(e) if a), default=-1)
        if j <= k:
            res = {_add(e, _unit(self.n, k)): CycScalar.one(self.order)}
        else:
            self._active.add(key)
            try:
                res = {}
                ep = list(e)
                ep[j] -= 1
                ep = tuple(ep)
                lead = self.lead.get((k, j), CycScalar.one(self.order))
                for m, c in self._times_gen(ep, k).items():
                    for m2, c2 in self._times_gen(m, j).items():
                        _accum(res, m2, lead * c * c2)
                for tm, tc in self.tail.get((k, j), {}).items():
                    a, b = [i for i, x in enumerate(tm) for _ in range(x)]
                    for m, c in self._times_gen(ep, a).items():
                        for m2, c2 in self._times_gen(m, b).items():
                            _accum(res, m2, tc * c * c2)
            finally:
                self._active.discard(key)
        self._mtg[key] = res
        return res

    def _mono_mul(self, a: Mono, b: Mono) -> dict:
        """Normal form of x^a * x^b as {mono: coeff}."""
        if self._skew_exp is not None:
            N, K = self._skew_exp
            n = self.n
            s = 0
            for j in range(1, n):
                aj = a[j]
                if aj:
                    for i in range(j):
                        if b[i]:
                            s += K[i][j] * aj * b[i]
            return {_add(a, b): _field(self.order).roots()[s % N]}
        if self.kind == "skew":
            c = CycScalar.one(self.order)
            for j in range(1, self.n):
                for i in range(j):
                    if a[j] and b[i]:
                        c = c * self.lead[i, j] ** (a[j] * b[i])
            return {_add(a, b): c}
        key = (a, b)
        hit = self._mm.get(key)
        if hit is not None:
            return hit
        k = next((i for i, x in enumerate(b) if x), None)
        if k is None:
            res = {a: CycScalar.one(self.order)}
        else:
            bp = list(b)
            bp[k] -= 1
            bp = tuple(bp)
            res = {}
            for m, c in self._times_gen(a, k).items():
                for m2, c2 in self._mono_mul(m, bp).items():
                    _accum(res, m2, c * c2)
        self._mm[key] = res
        return res

    def multiply(self, f: "NCPoly", g: "NCPoly") -> "NCPoly":
        if (f.ring is not self and f.ring != self) or (g.ring is not self and g.ring != self):
            raise ValueError("polynomials belong to different presentations")
        out: dict = {}
        for a, ca in f.terms.items():
            for b, cb in g.terms.items():
                c = ca * cb
                for m, cm in self._mono_mul(a, b).items():
                    _accum(out, m, c * cm)
        return NCPoly(self, out)

    def normal_order(self, word: Sequence[int], coeff=1) -> "NCPoly":
        """Normal form of coeff * x_{w1} x_{w2} ... (1-based indices)."""
        for w in word:
            if not 1 <= w <= self.n:
                raise IndexError(f"generator index {w} out of range 1..{self.n}")
        c = self.scalar(coeff)
        terms = {m: c * v for m, v in self._word([w - 1 for w in word]).items()}
        return NCPoly(self, {m: v for m, v in terms.items() if v})

    # -- relations -------------------------------------------------------
    def relation_words(self) -> list[tuple[tuple[int, int], "NCPoly"]]:
        """Pairs ((j, i), rhs) meaning x_j x_i = rhs, 1-based, one per j > i."""
        out = []
        for j in range(self.n):
            for i in range(j):
                terms = {}
                lead = self.lead.get((i, j), CycScalar.one(self.order))
                terms[_add(_unit(self.n, i), _unit(self.n, j))] = lead
                for m, c in self.tail.get((i, j), {}).items():
                    _accum(terms, m, c)
                out.append(((j + 1, i + 1), NCPoly(self, terms)))
        return out

    # -- display -------------------------------------------------------
    def fmt_mono(self, e: Mono) -> str:
        parts = []
        for i, a in enumerate(e):
            if a == 1:
                parts.append(self.names[i])
            elif a > 1:
                parts.append(f"{self.names[i]}^{a}")
        return "*".join(parts) if parts else "1"

    def to_spec(self) -> dict:
        return dict(self.source)


# ---------------------------------------------------------------------------
# constructors


def _scalar(c, order: int) -> CycScalar:
    return c if isinstance(c, CycScalar) and c.order == order else scalar_from_json(c, order)


def skew(n: int, p, order: int = 4) -> PBWPresentation:
    """k_p[x1..xn].  ``p`` is a scalar (all p_ij equal), a dict {(i, j): p_ij}
    with 1-based i < j (missing pairs commute), or an n x n matrix whose strict
    upper triangle is read."""
    lead = {}
    if isinstance(p, Mapping) and all(isinstance(k, tuple) for k in p):
        for (i, j), c in p.items():
            if not (1 <= i < j <= n):
                raise SpecError(f"parameter index ({i},{j}) must satisfy 1 <= i < j <= {n}")
            lead[i - 1, j - 1] = _scalar(c, order)
    elif isinstance(p, (list, tuple)):
        for i in range(n):
            for j in range(i + 1, n):
                lead[i, j] = _scalar(p[i][j], order)
    else:
        c = _scalar(p, order)
        for i in range(n):
            for j in range(i + 1, n):
                lead[i, j] = c
    for i in range(n):
        for j in range(i + 1, n):
            lead.setdefault((i, j), CycScalar.one(order))
            if not lead[i, j]:
                raise SpecError(f"parameter must be nonzero (p_{i + 1}{j + 1} = 0)")
    src = {"kind": "skew", "n": n,
           "p": [[i + 1, j + 1, lead[i, j].to_json()] for i in range(n) for j in range(i + 1, n)]}
    return PBWPresentation(n, order, lead, {}, "skew", source=src)


def quantum_matrix(q, order: int = 12) -> PBWPresentation:
    """O_q(M_2) with generator order (x11, x12, x21, x22)."""
    q = _scalar(q, order)
    if not q:
        raise SpecError("parameter must be nonzero (q = 0)")
    one = CycScalar.one(order)
    lead = {(0, 1): q, (0, 2): q, (1, 3): q, (2, 3): q, (1, 2): one, (0, 3): one}
    tail = {(0, 3): {(0, 1, 1, 0): q.inverse() - q}}
    src = {"kind": "quantum_matrix", "q": q.to_json()}
    return PBWPresentation(4, order, lead, tail, "quantum_matrix",
                           names=["x11", "x12", "x21", "x22"], source=src)


def general(n: int, relations: Iterable, order: int = 4) -> PBWPresentation:
    """Relations given as (j, i, lead, tail) with 1-based j > i and tail a dict
    {(a, b): coeff} meaning coeff * x_a x_b, a <= b.  Unlisted pairs commute.
    The degree-3 overlap check runs at construction."""
    lead: dict = {}
    tail: dict = {}
    for rel in relations:
        j, i, c, t = rel
        if not (1 <= i < j <= n):
            raise SpecError(f"relation ({j},{i}) must have 1 <= i < j <= {n}")
        c = _scalar(c, order)
        if not c:
            raise SpecError(f"leading coefficient of relation ({j},{i}) must be nonzero")
        lead[i - 1, j - 1] = c
        tt = {}
        for (a, b), tc in (t or {}).items():
            a, b = sorted((a, b))
            tc = _scalar(tc, order)
            if tc:
                m = [0] * n
                m[a - 1] += 1
                m[b - 1] += 1
                _accum(tt, tuple(m), tc)
        if tt:
            tail[i - 1, j - 1] = tt
    for i in range(n):
        for j in range(i + 1, n):
            lead.setdefault((i, j), CycScalar.one(order))
    src = {"kind": "general", "n": n, "relations": [
        [j + 1, i + 1, lead[i, j].to_json(),
         [[a + 1, b + 1, c.to_json()] for m, c in tail.get((i, j), {}).items()
          for a, b in [tuple(x for x, y in enumerate(m) for _ in range(y))]]]
        for i in range(n) for j in range(i + 1, n)]}
    return PBWPresentation(n, order, lead, tail, "general", source=src)


def make_presentation(spec: Mapping, order: int | None = None) -> PBWPresentation:
    """Build from a JSON-style dict (the format produced by ``to_spec``)."""
    kind = spec.get("kind")
    order = order or int(spec.get("order", 4))
    if kind == "skew":
        n = int(spec["n"])
        if "p_matrix" in spec:
            return skew(n, spec["p_matrix"], order)
        p = spec.get("p", 1)
        if isinstance(p, list):
            # triples [i, j, p_ij]; unlisted pairs commute
            p = {(int(i), int(j)): c for i, j, c in p} if p else {}
        return skew(n, p, order)
    if kind == "quantum_matrix":
        return quantum_matrix(spec["q"], order)
    if kind == "general":
        rels = []
        for j, i, c, t in spec["relations"]:
            rels.append((int(j), int(i), c, {(int(a), int(b)): tc for a, b, tc in t}))
        return general(int(spec["n"]), rels, order)
    raise SpecError(f"unknown ring kind {kind!r}")


# ---------------------------------------------------------------------------
# polynomials


class NCPoly:
    """An element of a PBW algebra: a map ordered monomial -> nonzero scalar."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PBWPresentation, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- basic queries -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int | None:
        """Homogeneous degree, or None for zero / inhomogeneous elements."""
        ds = {sum(m) for m in self.terms}
        return ds.pop() if len(ds) == 1 else None

    def coeff(self, exps: Sequence[int]) -> CycScalar:
        return self.terms.get(tuple(exps), CycScalar.zero(self.ring.order))

    def leading(self) -> tuple[Mono, CycScalar]:
        m = max(self.terms, key=term_key)
        return m, self.terms[m]

    def sorted_terms(self) -> list[tuple[Mono, CycScalar]]:
        return sorted(self.terms.items(), key=lambda kv: term_key(kv[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------
    def _lift(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return other
        c = self.ring.scalar(other)
        return NCPoly(self.ring, {(0,) * self.ring.n: c} if c else {})

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _accum(out, m, c)
        return NCPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "NCPoly":
        c = self.ring.scalar(c)
        if not c:
            return self.ring.zero()
        return NCPoly(self.ring, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            return self.ring.multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, CycScalar)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"NCPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = self.ring.fmt_mono(m)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [{"exponents": list(m), "coeff": c.to_json()} for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, ring: PBWPresentation, data: list) -> "NCPoly":
        out: dict = {}
        for t in data:
            _accum(out, tuple(int(x) for x in t["exponents"]), ring.scalar(t["coeff"]))
        return cls(ring, out)


def multiply(f: NCPoly, g: NCPoly) -> NCPoly:
    return f.ring.multiply(f, g)


def normal_order(A: PBWPresentation, word: Sequence[int], coeff=1) -> NCPoly:
    return A.normal_order(word, coeff)


# ---------------------------------------------------------------------------
# normality and q-commutation


def _require_deg1(f: NCPoly) -> None:
    if f.terms and f.degree != 1:
        raise ValueError("expected a homogeneous element of degree 1")


def is_normal_deg1(f: NCPoly) -> bool:
    """True iff A_1 f = f A_1 inside A_2 (f of degree 1)."""
    _require_deg1(f)
    if not f.terms:
        return True
    A = f.ring
    right = Echelon(term_key)
    for x in A.gens():
        right.add((f * x).terms)
    if len(right) != A.n:
        # A is not a domain in degree 2; compare both spans fully
        left = Echelon(term_key)
        for x in A.gens():
            left.add((x * f).terms)
        if len(left) != len(right):
            return False
    return all(right.contains((x * f).terms) for x in A.gens())


def normal_deg1_space(A: PBWPresentation) -> list[list[NCPoly]]:
    """Maximal coordinate subspaces of A_1 consisting of normal elements.

    Each subspace is returned by its basis of generators.  A set S of
    variables qualifies when every x_i (i in S) is normal and the test
    combinations sum_{i in S} x_i and sum_{i in S} 2^k x_i are normal too.
    """
    gens = A.gens()
    normal = [i for i in range(A.n) if is_normal_deg1(gens[i])]
    found: list[tuple[int, ...]] = []
    for size in range(len(normal), 0, -1):
        for S in combinations(normal, size):
            if any(set(S) <= set(T) for T in found):
                continue
            if size > 1:
                f1 = A.linear([1 if i in S else 0 for i in range(A.n)])
                f2 = A.linear([2 ** S.index(i) if i in S else 0 for i in range(A.n)])
                if not (is_normal_deg1(f1) and is_normal_deg1(f2)):
                    continue
            found.append(S)
    found.sort()
    return [[gens[i] for i in S] for S in found]


def q_commutator(f: NCPoly, g: NCPoly) -> CycScalar | None:
    """The q with f g = q g f, or None when no such scalar exists."""
    _require_deg1(f)
    _require_deg1(g)
    fg, gf = f * g, g * f
    if not gf.terms:
        return None
    m, c = gf.leading()
    q = fg.coeff(m) / c
    return q if fg == gf.scale(q) else None


# ---------------------------------------------------------------------------
# graded twists


def _diagonal(phi, A: PBWPresentation) -> list[CycScalar]:
    mat = getattr(phi, "matrix", phi)
    if isinstance(mat[0], (list, tuple)):
        for i in range(A.n):
            for j in range(A.n):
                if i != j and mat[i][j]:
                    raise ValueError("twist maps must be diagonal (and hence commute)")
        return [A.scalar(mat[i][i]) for i in range(A.n)]
    return [A.scalar(c) for c in mat]


@dataclass(frozen=True)
class Twist:
    """A p-partition with one diagonal automorphism per part."""

    parts: tuple
    diagonals: tuple
    part_of: tuple = field(default=())

    def multidegree(self, e: Mono) -> tuple[int, ...]:
        d = [0] * len(self.parts)
        for i, a in enumerate(e):
            d[self.part_of[i]] += a
        return tuple(d)


def make_twist(A: PBWPresentation, partition: Sequence[Iterable[int]], maps: Sequence) -> Twist:
    from .structure import is_p_partition

    parts = tuple(tuple(sorted(P)) for P in partition)
    if not is_p_partition(A, parts):
        raise ValueError(f"{[list(P) for P in parts]} is not a p-partition")
    if len(maps) != len(parts):
        raise ValueError("need one twist map per part")
    part_of = [0] * A.n
    for w, P in enumerate(parts):
        for i in P:
            part_of[i - 1] = w
    diags = tuple(tuple(_diagonal(phi, A)) for phi in maps)
    return Twist(parts, diags, tuple(part_of))


def _sqrt_param(A: PBWPresentation, i: int, j: int) -> CycScalar:
    """q_ij = sqrt(p_ij) for 0-based i < j; q_ji = 1/q_ij; q_ii = 1."""
    if i == j:
        return CycScalar.one(A.order)
    if i < j:
        return sqrt_in_field(A._p(i, j), A.order)
    return _sqrt_param(A, j, i).inverse()


def standard_twist(A: PBWPresentation, partition: Sequence[Iterable[int]]) -> Twist:
    """phi_w: x_i -> q_{ji} x_i for i outside D_w, x_i fixed inside D_w,
    where j is the smallest index of D_w."""
    if A.kind != "skew":
        raise ValueError("the standard twist is defined for skew polynomial rings")
    parts = [tuple(sorted(P)) for P in partition]
    maps = []
    for P in parts:
        j = P[0] - 1
        inside = {i - 1 for i in P}
        maps.append([CycScalar.one(A.order) if i in inside else _sqrt_param(A, j, i)
                     for i in range(A.n)])
    return make_twist(A, parts, maps)


def twisted_multiply(f: NCPoly, g: NCPoly, twist: Twist) -> NCPoly:
    """a * b = a phi^{|a|}(b), extended bilinearly over the terms of f and g."""
    A = f.ring
    out: dict = {}
    for a, ca in f.terms.items():
        da = twist.multidegree(a)
        # diagonal entries of phi^{|a|}
        scale = []
        for i in range(A.n):
            s = CycScalar.one(A.order)
            for w, k in enumerate(da):
                if k:
                    s = s * twist.diagonals[w][i] ** k
            scale.append(s)
        for b, cb in g.terms.items():
            c = ca * cb
            for i, e in enumerate(b):
                if e:
                    c = c * scale[i] ** e
            for m, cm in A._mono_mul(a, b).items():
                _accum(out, m, c * cm)
    return NCPoly(A, out)
