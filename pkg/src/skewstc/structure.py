"""Blocks, circles, quasi-reflection classification and the STC decision."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

from .algebra import NCPoly, PBWPresentation, is_normal_deg1, skew
from .autgroup import (FiniteGroup, GradedMap, _matrix_from_columns, close_group, element_order,
                       root, subgroup, tau, theta)
from .cyclotomic import CycScalar, _field, embed_root, _into, sqrt_in_field
from .errors import InternalConsistencyError
from . import linalg
from .series import DEFAULT_D, matches_qr_form, qr_form, trace_series

HDET_NOTE = "hdet reported from the classification table, not computed homologically"


# ---------------------------------------------------------------------------
# blocks and p-partitions


def block_decomposition(A: PBWPresentation) -> list[tuple[int, ...]]:
    """Classes B(i) = {i' : p_ij = p_i'j for all j}, 1-based, ordered by smallest index."""
    P = A.param_matrix()
    n = A.n
    parts: list[list[int]] = []
    for i in range(n):
        for part in parts:
            if P[part[0]] == P[i]:
                part.append(i)
                break
        else:
            parts.append([i])
    for part in parts:
        for a in part:
            for b in part:
                if P[a][b] != 1:
                    raise InternalConsistencyError(f"indices {a + 1},{b + 1} share a block but do not commute")
    return [tuple(i + 1 for i in part) for part in parts]


def is_p_partition(A: PBWPresentation, parts: Sequence[Sequence[int]]) -> bool:
    seen = sorted(i for P in parts for i in P)
    if seen != list(range(1, A.n + 1)):
        return False
    for P in parts:
        inside = set(P)
        for j in range(1, A.n + 1):
            if j in inside:
                continue
            vals = {A.p(i, j) for i in P}
            if len(vals) > 1:
                return False
    return True


# ---------------------------------------------------------------------------
# eigenvalues


def eigenvalues(g: GradedMap, strict: bool = True) -> dict[CycScalar, int] | None:
    """Eigenvalue multiplicities on A_1, found among the roots of unity of the working field.

    When some eigenvalue lies outside the field this raises (strict) or
    returns None.
    """
    A = g.ring
    k = element_order(g)
    cp = linalg.charpoly([list(r) for r in g.matrix])
    F = _field(A.order)
    out: dict[CycScalar, int] = {}
    total = 0
    cur = cp
    for z in F.roots():
        if k % _root_order_in(F, z):
            continue
        mult, cur2 = linalg.root_multiplicity(cur, z)
        if mult:
            out[z] = mult
            total += mult
            cur = cur2
    if total != A.n:
        if not strict:
            return None
        raise ValueError(
            f"eigenvalues of an order-{k} map are not all in Q(zeta_{A.order}); "
            f"enlarge the root-of-unity order (to a multiple of {k})")
    return out


def _root_order_in(F, z) -> int:
    idx = F.root_index()[z]
    return F.n_roots // gcd(F.n_roots, idx)


def eigenvectors(g: GradedMap, lam: CycScalar) -> list[NCPoly]:
    A = g.ring
    mat = [[g.matrix[i][j] - (lam if i == j else 0) for j in range(A.n)] for i in range(A.n)]
    return [A.linear(v) for v in linalg.nullspace(mat)]


# ---------------------------------------------------------------------------
# classification


@dataclass
class QRClass:
    variant: str  # "NotQR" | "Reflection" | "Mystic"
    eigenvalues: dict | None  # None when some eigenvalue is outside the field
    det: CycScalar
    lam: CycScalar | None = None
    hdet: CycScalar | None = None
    eigenvector: NCPoly | None = None
    eigen_pair: tuple | None = None  # (u, v): eigenvalues i and -i
    pair: tuple | None = None  # standard (s, t) with g = tau_{s,t,lam}
    pair_lambda: CycScalar | None = None
    anticommuting: tuple | None = None  # (y1, y2) with y2 y1 = -y1 y2, g(y1) = y2
    order: int = 1
    trace_checked_to: int = 0

    @property
    def is_qr(self) -> bool:
        return self.variant != "NotQR"

    def to_json(self) -> dict:
        ev = None if self.eigenvalues is None else [[k.to_json(), v] for k, v in self.eigenvalues.items()]
        out = {"variant": self.variant, "order": self.order, "det": self.det.to_json(),
               "eigenvalues": ev,
               "trace_checked_to": self.trace_checked_to}
        if self.variant != "NotQR":
            out["lambda"] = self.lam.to_json()
            out["hdet"] = self.hdet.to_json()
            out["hdet_source"] = HDET_NOTE
        if self.eigenvector is not None:
            out["eigenvector"] = str(self.eigenvector)
        if self.pair is not None:
            out["pair"] = list(self.pair)
            out["pair_lambda"] = self.pair_lambda.to_json()
        if self.anticommuting is not None:
            out["anticommuting_pair"] = [str(y) for y in self.anticommuting]
        return out


def standard_tau_data(g: GradedMap):
    """(s, t, lam) with s < t when g equals tau_{s,t,lam} on a skew ring, else None."""
    A = g.ring
    md = g.monomial_data()
    if md is None or A.kind != "skew":
        return None
    sigma, c = md
    moved = [j for j in range(A.n) if sigma[j] != j or c[j] != 1]
    if len(moved) != 2:
        return None
    s, t = moved
    if sigma[s] != t or sigma[t] != s:
        return None
    lam = c[s]
    if c[t] != -lam.inverse() or A._p(s, t) != -1:
        return None
    return s + 1, t + 1, lam


def _exact_sqrt(r: CycScalar) -> CycScalar | None:
    order = r.order
    F = _field(order)
    for z in F.roots():
        rho = r / z
        if not rho.is_rational():
            continue
        q = rho.to_fraction()
        if q <= 0:
            continue
        a, b = isqrt(q.numerator), isqrt(q.denominator)
        if a * a != q.numerator or b * b != q.denominator:
            continue
        try:
            return sqrt_in_field(z, order) * Fraction(a, b)
        except ValueError:
            continue
    return None


def _anticommuting_pair(g: GradedMap, u: NCPoly, v: NCPoly):
    """y1 = u + c v with c^2 = u^2 / v^2, y2 = g(y1); returns (y1, y2) or None."""
    u2, v2 = u * u, v * v
    if not v2:
        return None
    m, cv = v2.leading()
    r = u2.coeff(m) / cv
    if u2 != v2.scale(r):
        raise InternalConsistencyError("squares of the mystic eigenvectors are not proportional")
    c = _exact_sqrt(r)
    if c is None:
        return None
    y1 = u + v.scale(c)
    y1 = y1.scale(y1.leading()[1].inverse())
    y2 = g(y1)
    if y2 * y1 != -(y1 * y2):
        raise InternalConsistencyError("constructed eigenplane elements do not anticommute")
    return y1, y2


_class_cache: dict = {}


def classify_quasi_reflection(A: PBWPresentation, g: GradedMap, D: int = DEFAULT_D) -> QRClass:
    """Classify g as a reflection, a mystic reflection or neither.

    The trace series through degree D decides; the eigenvalue pattern must be
    (1^{n-1}, lam) for a reflection and (1^{n-2}, i, -i) for a mystic
    reflection.  A trace of quasi-reflection shape with any other pattern is
    reported as an internal inconsistency.
    """
    key = (id(A), g.matrix, D)
    hit = _class_cache.get(key)
    if hit is not None and hit[0] is A:
        return hit[1]
    n = A.n
    order = element_order(g)
    det = g.det()
    one = CycScalar.one(A.order)
    ident = linalg.identity(n, A.order)
    rk = linalg.rank([[g.matrix[i][j] - ident[i][j] for j in range(n)] for i in range(n)])
    ev = eigenvalues(g, strict=False)
    res = QRClass("NotQR", ev, det, order=order)

    # finite order means diagonalizable, so rank(g - 1) counts eigenvalues != 1
    refl_lam = det if rk == 1 else None
    mystic = rk == 2 and order == 4 and det == 1 and g.trace() == n - 2
    if mystic and ev is None:
        raise ValueError(f"i is not in Q(zeta_{A.order}); enlarge the root-of-unity order to a multiple of 4")

    if refl_lam is not None or mystic:
        lam = refl_lam if refl_lam is not None else CycScalar.rational(A.order, -1)
        tr = trace_series(A, g, D)
        res.trace_checked_to = D
        if matches_qr_form(tr, n, lam):
            res.lam = lam
            if refl_lam is not None:
                res.variant = "Reflection"
                res.hdet = lam
                if det != lam:
                    raise InternalConsistencyError("reflection with det != lambda")
                vecs = eigenvectors(g, lam)
                res.eigenvector = vecs[0]
                if not is_normal_deg1(res.eigenvector):
                    raise InternalConsistencyError("non-invariant eigenvector of a reflection is not normal")
            else:
                res.variant = "Mystic"
                res.hdet = CycScalar.rational(A.order, -1)
                if det != 1:
                    raise InternalConsistencyError("mystic reflection with det != 1")
                i = _into(embed_root(4, 1), A.order)
                u = eigenvectors(g, i)[0]
                v = eigenvectors(g, -i)[0]
                res.eigen_pair = (u, v)
                res.anticommuting = _anticommuting_pair(g, u, v)
                data = standard_tau_data(g)
                if data is not None:
                    res.pair = data[:2]
                    res.pair_lambda = data[2]
    else:
        # not a candidate: its trace must not look like a quasi-reflection's
        tr1 = g.trace()
        lam = tr1 - (n - 1)
        if lam and lam != 1 and matches_qr_form(trace_series(A, g, min(D, 4)), n, lam):
            tr = trace_series(A, g, D)
            res.trace_checked_to = D
            if matches_qr_form(tr, n, lam):
                raise InternalConsistencyError(
                    "trace series has quasi-reflection form but the eigenvalue pattern does not")
        else:
            res.trace_checked_to = min(D, 4)
    _class_cache[key] = (A, res)
    return res


def classify_group(A: PBWPresentation, G: FiniteGroup, D: int = DEFAULT_D) -> list[QRClass]:
    return [classify_quasi_reflection(A, g, D) for g in G.elements]


# ---------------------------------------------------------------------------
# block-circle decomposition


@dataclass
class Part:
    indices: tuple
    kind: str  # "block" | "circle"
    group: FiniteGroup
    circle_params: tuple | None = None

    def to_json(self) -> dict:
        out = {"indices": list(self.indices), "kind": self.kind, "group_order": len(self.group)}
        if self.circle_params is not None:
            out["alpha"], out["beta"] = self.circle_params
        return out


@dataclass
class BlockCircleDecomp:
    parts: list
    qr_generated: bool
    mystic_pairs: list = field(default_factory=list)

    def partition(self) -> list[tuple]:
        return [p.indices for p in self.parts]

    def to_json(self) -> dict:
        return {"parts": [p.to_json() for p in self.parts], "qr_generated": self.qr_generated}


def part_subgroup(G: FiniteGroup, part: Sequence[int]) -> FiniteGroup:
    """G_v: elements fixing every x_j outside the part and preserving the span of the part."""
    inside = {i - 1 for i in part}
    n = G.ring.n
    keep = []
    for g in G.elements:
        ok = True
        for j in range(n):
            for i in range(n):
                c = g.matrix[i][j]
                if j in inside:
                    if i not in inside and c:
                        ok = False
                        break
                elif (c != 1) if i == j else bool(c):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            keep.append(g)
    # keep is closed (intersection with a subgroup); wrap it as a FiniteGroup
    index = {g.matrix: k for k, g in enumerate(keep)}
    return FiniteGroup(G.ring, keep, list(range(len(keep))), [(k,) for k in range(len(keep))], index)


def qr_subgroup(A: PBWPresentation, G: FiniteGroup, D: int = DEFAULT_D) -> tuple[FiniteGroup, list[GradedMap]]:
    qrs = [g for g in G.elements if classify_quasi_reflection(A, g, D).is_qr]
    R = close_group(qrs, cap=len(G) + 1, ring=A)
    return R, qrs


def block_circle_decomposition(A: PBWPresentation, G: FiniteGroup, D: int = DEFAULT_D) -> BlockCircleDecomp:
    if A.kind != "skew":
        raise ValueError("block-circle decomposition is defined for skew polynomial rings")
    parent = list(range(A.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    pairs = []
    for g in G.elements:
        c = classify_quasi_reflection(A, g, D)
        if c.variant != "Mystic":
            continue
        data = standard_tau_data(g)
        if data is None:
            raise InternalConsistencyError(f"mystic reflection {g} is not a standard tau in the x-basis")
        s, t, _ = data
        pairs.append((s, t))
        a, b = find(s - 1), find(t - 1)
        if a != b:
            parent[max(a, b)] = min(a, b)
    comps: dict[int, list[int]] = {}
    for i in range(A.n):
        comps.setdefault(find(i), []).append(i + 1)
    blocks = block_decomposition(A)
    block_of = {i: b for b in blocks for i in b}
    parts: list[tuple[tuple, str]] = []
    in_circle: set[int] = set()
    for comp in comps.values():
        if len(comp) >= 2:
            for i in comp:
                if block_of[i] != (i,):
                    raise InternalConsistencyError(f"circle index {i} is not a singleton block")
            for a in comp:
                for b in comp:
                    if a < b and A.p(a, b) != -1:
                        raise InternalConsistencyError(f"circle indices {a},{b} have p != -1")
            parts.append((tuple(comp), "circle"))
            in_circle.update(comp)
    for b in blocks:
        if not in_circle.intersection(b):
            parts.append((b, "block"))
    parts.sort(key=lambda p: p[0][0])
    if not is_p_partition(A, [p[0] for p in parts]):
        raise InternalConsistencyError("block-circle decomposition is not a p-partition")

    R, _ = qr_subgroup(A, G, D)
    qr_gen = len(R) == len(G)
    out_parts = []
    prod = 1
    for idx, kind in parts:
        Gv = part_subgroup(G, idx)
        prod *= len(Gv)
        params = None
        if kind == "circle" and qr_gen:
            params = circle_parameters(A, Gv, idx)
        out_parts.append(Part(idx, kind, Gv, params))
    if qr_gen and prod != len(G):
        raise InternalConsistencyError(
            f"|G| = {len(G)} but the part subgroups multiply to {prod}")
    return BlockCircleDecomp(out_parts, qr_gen, sorted(set(pairs)))


def circle_parameters(A: PBWPresentation, Gv: FiniteGroup, circle: Sequence[int]) -> tuple[int, int]:
    """(alpha, beta) = (|Theta_i|, |T_{i,j}|), checked independent of i, j."""
    F = _field(A.order)
    roots = [z for z in F.roots() if len(Gv) % _root_order_in(F, z) == 0]
    idx = [i - 1 for i in circle]
    alphas, betas = set(), set()
    for i in idx:
        count = 0
        for z in roots:
            mat = _matrix_from_columns(A, {i: {i: z}})
            if tuple(tuple(r) for r in mat) in Gv.index:
                count += 1
        alphas.add(count)
    for s in idx:
        for t in idx:
            if s == t:
                continue
            count = 0
            for z in roots:
                mat = _matrix_from_columns(A, {s: {t: z}, t: {s: -z.inverse()}})
                if tuple(tuple(r) for r in mat) in Gv.index:
                    count += 1
            betas.add(count)
    if len(alphas) != 1 or len(betas) != 1:
        raise InternalConsistencyError("circle parameters depend on the chosen indices")
    alpha, beta = alphas.pop(), betas.pop()
    if beta == 0 or beta % alpha or beta % 2:
        raise InternalConsistencyError(f"circle parameters alpha={alpha}, beta={beta} violate alpha | beta, 2 | beta")
    return alpha, beta


# ---------------------------------------------------------------------------
# M(n, alpha, beta)


def make_M_group(n: int, alpha: int, beta: int, A: PBWPresentation | None = None, cap: int = 10_000) -> FiniteGroup:
    """Closure of tau_{i,i+1,1}, tau_{1,2,zeta_beta} and theta_{1,zeta_alpha} on k_{-1}[x1..xn]."""
    if n < 2:
        raise ValueError("M(n, alpha, beta) needs n >= 2")
    if alpha < 1 or beta % alpha or beta % 2:
        raise ValueError("M(n, alpha, beta) needs alpha | beta and 2 | beta")
    if A is None:
        order = beta * 4 // gcd(beta, 4)
        A = skew(n, -1, order=order)
    if A.kind != "skew" or any(A.p(i, j) != -1 for i in range(1, n + 1) for j in range(i + 1, n + 1)):
        raise ValueError("M(n, alpha, beta) acts on k_{-1}[x1..xn]")
    gens = [tau(A, i, i + 1) for i in range(1, n)]
    if beta > 2:
        gens.append(tau(A, 1, 2, root(A, beta)))
    if alpha > 1:
        gens.append(theta(A, 1, root(A, alpha)))
    G = close_group(gens, cap=cap, ring=A)
    got = circle_parameters(A, G, list(range(1, n + 1)))
    if got != (alpha, beta):
        raise InternalConsistencyError(f"M({n},{alpha},{beta}) closure has parameters {got}")
    return G


# ---------------------------------------------------------------------------
# the decision


@dataclass
class STCReport:
    generated_by_qr: bool
    group_order: int
    qr_subgroup_order: int
    n_reflections: int
    n_mystic: int
    decomposition: BlockCircleDecomp | None
    structure: str
    verdict: str
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"generated_by_qr": self.generated_by_qr, "group_order": self.group_order,
                "qr_subgroup_order": self.qr_subgroup_order, "reflections": self.n_reflections,
                "mystic_reflections": self.n_mystic,
                "decomposition": self.decomposition.to_json() if self.decomposition else None,
                "structure": self.structure, "verdict": self.verdict, "notes": list(self.notes)}


def decide_stc(A: PBWPresentation, G: FiniteGroup, D: int = DEFAULT_D) -> STCReport:
    classes = classify_group(A, G, D)
    R, qrs = qr_subgroup(A, G, D)
    for g in G.generator_maps():
        ginv = g.inverse()
        for q in qrs:
            if (g * q * ginv) not in R:
                raise InternalConsistencyError("subgroup generated by quasi-reflections is not normal")
    gen = len(R) == len(G)
    n_refl = sum(c.variant == "Reflection" for c in classes)
    n_myst = sum(c.variant == "Mystic" for c in classes)
    notes = []
    decomp = None
    if A.kind == "skew":
        decomp = block_circle_decomposition(A, G, D)
        pieces = []
        for p in decomp.parts:
            if len(p.group) == 1:
                continue
            if p.kind == "circle" and p.circle_params is not None:
                a, b = p.circle_params
                pieces.append(f"M({len(p.indices)},{a},{b})")
            else:
                label = ",".join(str(i) for i in p.indices)
                pieces.append(f"G[{label}] (order {len(p.group)}, classical)")
        structure = " x ".join(pieces) if pieces else "1"
    else:
        notes.append("block-circle decomposition skipped for a non-skew presentation")
        if len(G) == 1:
            structure = "1"
        elif gen and len(G) == 2:
            structure = "Z/2"
        elif gen:
            structure = f"dihedral of order {len(G)}"
        else:
            structure = f"order {len(G)}, not generated by quasi-reflections"
    if not gen and A.kind == "skew":
        structure = f"order {len(G)}, not generated by quasi-reflections"
    if gen:
        verdict = "generated by quasi-reflections: fixed ring has finite global dimension"
    else:
        verdict = (f"not generated by quasi-reflections (|R| = {len(R)} < |G| = {len(G)}): "
                   "fixed ring has infinite global dimension")
    return STCReport(gen, len(G), len(R), n_refl, n_myst, decomp, structure, verdict, notes)


# ---------------------------------------------------------------------------
# graded twists of skew rings


def twist_check(A: PBWPresentation, G: FiniteGroup | None = None, D: int = DEFAULT_D) -> dict:
    """Commutativity report for the standard twists of a skew ring.

    ``singletons``: with every index its own part the twisted generators commute
    pairwise.  ``partition``: for the block-circle partition (blocks when G is
    None) generators from distinct parts commute, and inside a part the
    product is unchanged, so circles keep x_j * x_i = -x_i * x_j.
    """
    from .algebra import standard_twist, twisted_multiply

    if A.kind != "skew":
        raise ValueError("twist checks are defined for skew polynomial rings")
    n = A.n
    xs = A.gens()
    single = standard_twist(A, [(i,) for i in range(1, n + 1)])
    failing = [(s, t) for s in range(1, n + 1) for t in range(1, n + 1)
               if twisted_multiply(xs[s - 1], xs[t - 1], single) != twisted_multiply(xs[t - 1], xs[s - 1], single)]
    report = {"singletons": {"pairs_checked": n * n, "failing": [list(p) for p in failing], "ok": not failing}}

    if G is not None:
        decomp = block_circle_decomposition(A, G, D)
        parts = [(p.indices, p.kind) for p in decomp.parts]
    else:
        parts = [(b, "block") for b in block_decomposition(A)]
    tw = standard_twist(A, [p for p, _ in parts])
    part_of = {i: k for k, (p, _) in enumerate(parts) for i in p}
    cross, inner = [], []
    for s in range(1, n + 1):
        for t in range(1, n + 1):
            if s == t:
                continue
            st = twisted_multiply(xs[s - 1], xs[t - 1], tw)
            ts = twisted_multiply(xs[t - 1], xs[s - 1], tw)
            if part_of[s] != part_of[t]:
                if st != ts:
                    cross.append((s, t))
            elif s > t:
                # x_s * x_t must equal p_ts x_t * x_s, the untwisted relation
                if st != ts.scale(A.p(t, s)) or st != xs[s - 1] * xs[t - 1]:
                    inner.append((s, t))
    report["partition"] = {"parts": [{"indices": list(p), "kind": k} for p, k in parts],
                           "cross_part_failing": [list(p) for p in cross],
                           "inner_failing": [list(p) for p in inner],
                           "ok": not cross and not inner}
    report["ok"] = report["singletons"]["ok"] and report["partition"]["ok"]
    return report
