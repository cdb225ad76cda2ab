"""Fixed subrings: Reynolds averaging, degreewise fixed spaces, generator
mining and verification, circle generators and the abelian free-module check.

Every "generated by" statement produced here is a finite computation and is
reported together with the degree it was checked to.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import linalg
from .algebra import NCPoly, PBWPresentation, monomials, pbw_dimension, quantum_matrix, skew, term_key
from .autgroup import FiniteGroup, GradedMap, _matrix_from_columns, apply, close_group
from .cyclotomic import CycScalar, embed_root, _into
from .errors import InternalConsistencyError
from .series import DEFAULT_D, TruncSeries, molien_fixed_hilbert
from .structure import classify_quasi_reflection, eigenvalues, make_M_group


def reynolds(G: FiniteGroup, f: NCPoly) -> NCPoly:
    """(1/|G|) sum_g g(f)."""
    acc = f.ring.zero()
    for g in G.elements:
        acc = acc + apply(g, f)
    return acc.scale(Fraction(1, len(G)))


def is_fixed(G: FiniteGroup, f: NCPoly) -> bool:
    return all(apply(g, f) == f for g in G.generator_maps())


def _as_vec(f: NCPoly) -> dict:
    return dict(f.terms)


def _echelon() -> linalg.Echelon:
    return linalg.Echelon(key=term_key)


def _reduced_basis(vecs: list[dict], A: PBWPresentation) -> list[NCPoly]:
    """Fully reduced echelon form, leading coefficients 1, highest leading monomial first."""
    ech = _echelon()
    for v in vecs:
        ech.add(v)
    pivots = sorted(ech.rows, key=term_key, reverse=True)
    rows = {p: dict(ech.rows[p]) for p in pivots}
    # back-substitute so no row contains another row's pivot
    for p in reversed(pivots):
        for q in pivots:
            if q == p:
                continue
            c = rows[q].get(p)
            if c:
                for k, x in rows[p].items():
                    nv = rows[q].get(k)
                    nv = -(c * x) if nv is None else nv - c * x
                    if nv:
                        rows[q][k] = nv
                    else:
                        rows[q].pop(k, None)
    return [NCPoly(A, rows[p]) for p in pivots]


_fixed_cache: dict = {}


def fixed_space_basis(A: PBWPresentation, G: FiniteGroup, d: int, check: bool = True) -> list[NCPoly]:
    """Basis of (A_d)^G from the kernel of g - 1 over the group generators."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    hit = _fixed_cache.get((id(G), d))
    if hit is not None and hit[0] is G:
        return hit[1]
    monos = monomials(A.n, d)
    rows = []
    for g in G.generator_maps():
        if g.is_identity():
            continue
        by_out: dict = {}
        for e in monos:
            img = dict(g._image_mono(e))
            img[e] = img.get(e, CycScalar.zero(A.order)) - 1
            for out, c in img.items():
                if c:
                    by_out.setdefault(out, {})[e] = c
        rows.extend(by_out.values())
    kernel = linalg.sparse_kernel(rows, list(reversed(monos)), A.order)
    basis = _reduced_basis(kernel, A)
    if check:
        expect = molien_fixed_hilbert(A, G, d)[d]
        if expect != len(basis):
            raise InternalConsistencyError(
                f"fixed space in degree {d} has dimension {len(basis)}, Molien coefficient is {expect}")
    _fixed_cache[(id(G), d)] = (G, basis)
    return basis


# ---------------------------------------------------------------------------
# subalgebra spans


class _SpanTable:
    """Degreewise spans of the subalgebra generated by a list of homogeneous elements."""

    def __init__(self, A: PBWPresentation):
        self.A = A
        self.gens: list[NCPoly] = []
        self.spans: dict[int, list[NCPoly]] = {0: [A.one()]}

    def add_generator(self, f: NCPoly) -> None:
        d = f.degree
        if any(k >= d for k in self.spans if k > 0):
            raise ValueError("generators must be added in non-decreasing degree before spans are extended")
        self.gens.append(f)

    def span(self, d: int) -> linalg.Echelon:
        """Echelon of all products of generators of total degree d (every order)."""
        ech = _echelon()
        if d in self.spans:
            for f in self.spans[d]:
                ech.add(_as_vec(f))
            return ech
        for g in self.gens:
            k = g.degree
            if k > d:
                continue
            for b in self.spans_at(d - k):
                ech.add(_as_vec(g * b))
        self.spans[d] = self._basis(ech)
        return ech

    def _basis(self, ech: linalg.Echelon) -> list[NCPoly]:
        return [NCPoly(self.A, r) for r in ech.rows.values()]

    def spans_at(self, d: int) -> list[NCPoly]:
        if d not in self.spans:
            self.span(d)
        return self.spans[d]


def subalgebra_span(gens: Sequence[NCPoly], d: int) -> list[NCPoly]:
    """Basis of the degree-d part of the subalgebra generated by ``gens``."""
    if not gens:
        return []
    A = gens[0].ring
    table = _SpanTable(A)
    for f in sorted(gens, key=lambda f: f.degree):
        table.add_generator(f)
    return _reduced_basis([_as_vec(f) for f in table.spans_at(d)], A)


# ---------------------------------------------------------------------------
# generator sets


@dataclass
class GeneratorSet:
    generators: list
    degrees: list
    verified_to: int
    status: dict = field(default_factory=dict)  # degree -> (fixed_dim, span_dim)
    label: str = ""
    redundant: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def deficits(self) -> dict[int, int]:
        return {d: a - b for d, (a, b) in self.status.items() if a != b}

    @property
    def ok(self) -> bool:
        return not self.deficits

    def __len__(self) -> int:
        return len(self.generators)

    def to_json(self) -> dict:
        return {"label": self.label, "generators": [str(f) for f in self.generators],
                "generator_terms": [f.to_json() for f in self.generators],
                "degrees": list(self.degrees), "verified_to": self.verified_to,
                "status": {str(d): {"fixed_dim": a, "span_dim": b, "deficit": a - b}
                           for d, (a, b) in sorted(self.status.items())},
                "redundant": list(self.redundant), "notes": list(self.notes)}


def generator_mining_and_verify(A: PBWPresentation, G: FiniteGroup, gens: GeneratorSet | Sequence[NCPoly] | None = None,
                                D: int = DEFAULT_D) -> GeneratorSet:
    """Mine generators of A^G degree by degree, or verify a given list to degree D."""
    if D < 1:
        raise ValueError("D must be at least 1")
    if gens is None:
        return _mine(A, G, D)
    if isinstance(gens, GeneratorSet):
        label, gens = gens.label, gens.generators
    else:
        label = "verification"
    return _verify(A, G, list(gens), D, label)


def _mine(A: PBWPresentation, G: FiniteGroup, D: int) -> GeneratorSet:
    table = _SpanTable(A)
    status = {}
    accepted: list[NCPoly] = []
    for d in range(1, D + 1):
        fixed = fixed_space_basis(A, G, d)
        ech = table.span(d) if table.gens else _echelon()
        have = len(ech)
        new = []
        for f in fixed:
            if ech.add(_as_vec(f)) is not None:
                new.append(f)
        if have + len(new) != len(fixed):
            raise InternalConsistencyError(f"products of invariants leave the fixed space in degree {d}")
        status[d] = (len(fixed), len(fixed))
        table.spans.pop(d, None)
        for f in new:
            accepted.append(f)
            table.add_generator(f)
    return GeneratorSet(accepted, [f.degree for f in accepted], D, status, "mined")


def _verify(A: PBWPresentation, G: FiniteGroup, gens: list[NCPoly], D: int, label: str) -> GeneratorSet:
    for f in gens:
        if f.degree is None or any(sum(e) != f.degree for e in f.terms):
            raise ValueError("generators must be nonzero homogeneous elements")
        if not is_fixed(G, f):
            raise ValueError(f"{f} is not fixed by the group")
    gens = sorted(gens, key=lambda f: f.degree)
    table = _SpanTable(A)
    for f in gens:
        table.add_generator(f)
    status = {}
    for d in range(1, D + 1):
        fixed = len(fixed_space_basis(A, G, d))
        status[d] = (fixed, len(table.spans_at(d)))
    redundant = []
    for idx, f in enumerate(gens):
        others = _SpanTable(A)
        for j, h in enumerate(gens):
            if j != idx:
                others.add_generator(h)
        if others.span(f.degree).contains(_as_vec(f)):
            redundant.append(idx)
    return GeneratorSet(gens, [f.degree for f in gens], D, status, label, redundant)


def mine_generators(A: PBWPresentation, G: FiniteGroup, D: int = DEFAULT_D) -> GeneratorSet:
    return generator_mining_and_verify(A, G, None, D)


def verify_generators(A: PBWPresentation, G: FiniteGroup, gens, D: int = DEFAULT_D) -> GeneratorSet:
    return generator_mining_and_verify(A, G, gens, D)


# ---------------------------------------------------------------------------
# circles


def power_sum(A: PBWPresentation, k: int) -> NCPoly:
    acc = A.zero()
    for i in range(A.n):
        e = [0] * A.n
        e[i] = k
        acc = acc + A.mono(e)
    return acc


def induced_group(G: FiniteGroup, alpha: int, B: PBWPresentation) -> FiniteGroup:
    """Action of a monomial group on z_i = x_i^alpha (alpha even, so the z_i commute)."""
    gens = []
    for g in G.generator_maps():
        md = g.monomial_data()
        if md is None:
            raise ValueError("the induced action needs monomial generators")
        sigma, c = md
        gens.append(GradedMap(B, _matrix_from_columns(B, {j: {sigma[j]: c[j] ** alpha} for j in range(B.n)})))
    return close_group(gens, ring=B)


def _substitute(f: NCPoly, A: PBWPresentation, alpha: int) -> NCPoly:
    return NCPoly(A, {tuple(alpha * a for a in e): A.scalar(c) for e, c in f.terms.items()})


def circle_invariant_generators(n: int, alpha: int, beta: int, D: int = DEFAULT_D,
                                A: PBWPresentation | None = None, G: FiniteGroup | None = None) -> GeneratorSet:
    """Generators of k_{-1}[x1..xn]^{M(n, alpha, beta)}.

    alpha odd: z1...zn and the power sums of z_i^{2tk}, k < n, with z_i = x_i^alpha
    and 2t = beta/alpha.  alpha even: the fixed ring is a classical invariant ring
    in the commuting z_i and is mined there.
    """
    if n < 2 or alpha < 1 or beta % alpha or beta % 2:
        raise ValueError("need n >= 2, alpha | beta and 2 | beta")
    if G is None:
        G = make_M_group(n, alpha, beta, A)
    A = G.ring
    if alpha % 2:
        two_t = beta // alpha
        gens = [A.mono([alpha] * n)]
        gens += [power_sum(A, two_t * k * alpha) for k in range(1, n)]
        out = GeneratorSet(gens, [f.degree for f in gens], 0, label="circle generators")
    else:
        B = skew(n, 1, order=A.order)
        GB = induced_group(G, alpha, B)
        # Noether's bound makes the mined list complete when it fits the budget
        DB = len(GB) if len(GB) * alpha <= max(D, 24) else max(1, D // alpha)
        mined = _mine(B, GB, DB)
        gens = [_substitute(f, A, alpha) for f in mined.generators]
        out = GeneratorSet(gens, [f.degree for f in gens], DB * alpha, label="mined (classical case)")
        out.notes.append(f"induced group of order {len(GB)} on z_i = x_i^{alpha}; mined to z-degree {DB}")
        if DB >= len(GB):
            out.notes.append("complete: mining reached the Noether bound for the induced group")
    for f in gens:
        if not is_fixed(G, f):
            raise InternalConsistencyError(f"circle generator {f} is not fixed")
    return out


# ---------------------------------------------------------------------------
# abelian groups: free-module decomposition


@dataclass
class FreeModuleReport:
    ok: bool
    basis: str  # "coordinate", "eigenbasis" or "basis change required"
    eigenbasis: list = field(default_factory=list)
    reflections: list = field(default_factory=list)  # (coordinate, order)
    mystic: list = field(default_factory=list)  # (coordinate, coordinate)
    cosets: list = field(default_factory=list)  # exponent tuples in the eigenbasis
    coset_polynomial: list = field(default_factory=list)
    fixed_series: TruncSeries | None = None
    checked_to: int = 0
    counterexample_degree: int | None = None
    message: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "basis": self.basis, "eigenbasis": [str(y) for y in self.eigenbasis],
                "reflections": [list(r) for r in self.reflections], "mystic": [list(m) for m in self.mystic],
                "cosets": [list(c) for c in self.cosets], "coset_polynomial": list(self.coset_polynomial),
                "fixed_series": None if self.fixed_series is None else self.fixed_series.integers(),
                "checked_to": self.checked_to, "counterexample_degree": self.counterexample_degree,
                "message": self.message}


def _joint_eigenbasis(A: PBWPresentation, gens: list[GradedMap]):
    """Common eigenvectors of commuting maps (columns), or None outside the field."""
    spectra = []
    for g in gens:
        ev = eigenvalues(g, strict=False)
        if ev is None:
            return None
        spectra.append(list(ev))
    n = A.n
    vecs = []
    if not gens:
        return linalg.identity(n, A.order)
    for lams in itertools.product(*spectra):
        stacked = []
        for g, lam in zip(gens, lams):
            stacked += [[g.matrix[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
        vecs += linalg.nullspace(stacked)
    if len(vecs) != n:
        return None
    return vecs


def _unit_index(v) -> int | None:
    nz = [i for i, c in enumerate(v) if c]
    return nz[0] if len(nz) == 1 else None


def free_module_check(A: PBWPresentation, G: FiniteGroup, D: int = 10) -> FreeModuleReport:
    """For abelian G generated by quasi-reflections, compare H_A with
    (sum over coset monomials of t^deg) * H_{A^G} through degree D."""
    if not G.is_abelian():
        raise ValueError("free_module_check needs an abelian group")
    n = A.n
    vecs = _joint_eigenbasis(A, G.generator_maps())
    if vecs is None:
        return FreeModuleReport(False, "basis change required",
                                message="no common eigenbasis over the working field")
    # sort so that coordinate vectors keep their index
    vecs = sorted(vecs, key=lambda v: (_unit_index(v) is None, _unit_index(v) or 0))
    coordinate = all(_unit_index(v) == k for k, v in enumerate(vecs))
    basis = [A.linear(v) for v in vecs]
    P = [[vecs[j][i] for j in range(n)] for i in range(n)]
    Pinv = linalg.inverse(P)

    def diag(g):
        M = linalg.mat_mul(Pinv, linalg.mat_mul(g.matrix, P))
        return [M[k][k] for k in range(n)]

    refl: dict[int, GradedMap] = {}
    myst: dict[tuple, GradedMap] = {}
    for g in G.elements:
        c = classify_quasi_reflection(A, g)
        if not c.is_qr:
            continue
        dg = diag(g)
        moved = tuple(k for k in range(n) if dg[k] != 1)
        if c.variant == "Reflection":
            k = moved[0]
            if k not in refl or c.order > refl[k].order():
                refl[k] = g
        elif moved not in myst:
            myst[moved] = g
    chosen = list(refl.values()) + list(myst.values())
    rep = FreeModuleReport(False, "coordinate" if coordinate else "eigenbasis", basis,
                           sorted((k + 1, g.order()) for k, g in refl.items()),
                           sorted(tuple(i + 1 for i in m) for m in myst))
    used = [k for k in refl] + [k for m in myst for k in m]
    if len(used) != len(set(used)):
        rep.message = "quasi-reflections overlap on an eigen-coordinate"
        return rep
    expected = 1
    for g in refl.values():
        expected *= g.order()
    expected *= 4 ** len(myst)
    R = close_group(chosen, cap=len(G) + 1, ring=A) if chosen else None
    got = len(R) if R is not None else 1
    if got != len(G) or expected != len(G):
        rep.message = (f"chosen quasi-reflections generate {got} of {len(G)} elements "
                       f"(direct product order {expected})")
        return rep

    factors = []
    for k, g in sorted(refl.items()):
        factors.append([(k, r) for r in range(g.order())])
    for m in sorted(myst):
        a, b = m
        factors.append([{a: s, b: t} for s, t in ((0, 0), (1, 0), (0, 1), (2, 0))])
    cosets = []
    for combo in itertools.product(*factors):
        e = [0] * n
        for part in combo:
            if isinstance(part, dict):
                for k, v in part.items():
                    e[k] += v
            else:
                e[part[0]] += part[1]
        cosets.append(tuple(e))
    cosets.sort(key=lambda e: (sum(e), tuple(reversed(e))))
    poly = [0] * (max(sum(e) for e in cosets) + 1)
    for e in cosets:
        poly[sum(e)] += 1
    rep.cosets, rep.coset_polynomial = cosets, poly
    HG = molien_fixed_hilbert(A, G, D)
    rep.fixed_series = HG
    vals = HG.integers()
    for d in range(D + 1):
        rhs = sum(poly[k] * vals[d - k] for k in range(min(d, len(poly) - 1) + 1))
        if rhs != pbw_dimension(n, d):
            rep.counterexample_degree = d
            rep.checked_to = d - 1
            rep.message = f"Hilbert identity fails in degree {d}: {rhs} != {pbw_dimension(n, d)}"
            return rep
    rep.checked_to = D
    rep.ok = True
    rep.message = f"H_A = coset polynomial * H_(A^G) through degree {D}"
    return rep


# ---------------------------------------------------------------------------
# O_q(M_2): relations among n-th powers


def quantum_power_relations(m: int, A: PBWPresentation | None = None) -> dict:
    """With q a primitive m-th root and n = m (m odd) or m/2 (m even), check the
    six relations of O_{q^{n^2}}(M_2) among X_ij = x_ij^n by exact multiplication."""
    if m < 2:
        raise ValueError("need m >= 2")
    if A is None:
        order = m * 4 // gcd(m, 4)
        A = quantum_matrix(_into(embed_root(m, 1), order), order)
    n = m if m % 2 else m // 2
    q = A.lead[0, 1]
    Q = q ** (n * n)
    X = [A.gen(i) ** n for i in range(1, 5)]
    x11, x12, x21, x22 = X
    rels = {
        "X12 X11 = Q X11 X12": (x12 * x11, (x11 * x12).scale(Q)),
        "X21 X11 = Q X11 X21": (x21 * x11, (x11 * x21).scale(Q)),
        "X22 X12 = Q X12 X22": (x22 * x12, (x12 * x22).scale(Q)),
        "X22 X21 = Q X21 X22": (x22 * x21, (x21 * x22).scale(Q)),
        "X21 X12 = X12 X21": (x21 * x12, x12 * x21),
        "X22 X11 = X11 X22 + (1/Q - Q) X12 X21": (x22 * x11, x11 * x22 + (x12 * x21).scale(Q.inverse() - Q)),
    }
    return {"m": m, "n": n, "q_n2": Q, "relations": {k: a == b for k, (a, b) in rels.items()}}


__all__ = [
    "reynolds", "is_fixed", "fixed_space_basis", "subalgebra_span", "GeneratorSet",
    "generator_mining_and_verify", "mine_generators", "verify_generators", "power_sum",
    "induced_group", "circle_invariant_generators", "FreeModuleReport", "free_module_check",
    "quantum_power_relations",
]
