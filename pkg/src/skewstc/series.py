"""Trace series, Molien averaging and exact rational-form matching."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import PBWPresentation, monomials, pbw_dimension
from .autgroup import FiniteGroup, GradedMap
from .cyclotomic import CycScalar
from .errors import InternalConsistencyError

DEFAULT_D = 12


@dataclass(frozen=True)
class TruncSeries:
    """Power series known through t^D; coeffs[k] is the coefficient of t^k."""

    coeffs: tuple
    order: int

    @classmethod
    def of(cls, values: Sequence, order: int) -> "TruncSeries":
        return cls(tuple(v if isinstance(v, CycScalar) else CycScalar.rational(order, v)
                         for v in values), order)

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def truncate(self, D: int) -> "TruncSeries":
        return TruncSeries(self.coeffs[: D + 1], self.order)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        D = min(self.D, other.D)
        return TruncSeries(tuple(self.coeffs[k] + other.coeffs[k] for k in range(D + 1)), self.order)

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return TruncSeries(tuple(c * other for c in self.coeffs), self.order)
        D = min(self.D, other.D)
        out = []
        for k in range(D + 1):
            acc = CycScalar.zero(self.order)
            for i in range(k + 1):
                a = self.coeffs[i]
                if a:
                    b = other.coeffs[k - i]
                    if b:
                        acc = acc + a * b
            out.append(acc)
        return TruncSeries(tuple(out), self.order)

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.coeffs == other.coeffs
        return tuple(self.coeffs) == tuple(other)

    def __hash__(self):
        return hash(self.coeffs)

    def integers(self) -> list[int] | None:
        out = []
        for c in self.coeffs:
            if not c.is_rational():
                return None
            f = c.to_fraction()
            if f.denominator != 1:
                return None
            out.append(f.numerator)
        return out

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __str__(self):
        ints = self.integers()
        vals = ints if ints is not None else [str(c) for c in self.coeffs]
        return "(" + ", ".join(str(v) for v in vals) + ")"


def _poly_to_str(p: Sequence) -> str:
    parts = []
    for k, c in enumerate(p):
        if not c:
            continue
        t = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
        cs = str(c)
        if t and cs == "1":
            parts.append(t)
        elif t and cs == "-1":
            parts.append("-" + t)
        else:
            parts.append(cs + ("*" + t if t else ""))
    return " + ".join(parts).replace("+ -", "- ") or "0"


@dataclass(frozen=True)
class RationalSeries:
    """numerator / denominator with denominator(0) = 1 (coefficient lists, low first)."""

    numerator: tuple
    denominator: tuple
    order: int
    label: str = ""

    def expand(self, D: int) -> TruncSeries:
        return expand(self, D)

    def __str__(self):
        if self.label:
            return self.label
        return f"({_poly_to_str(self.numerator)})/({_poly_to_str(self.denominator)})"


def _pmul(a: Sequence, b: Sequence, order: int) -> list:
    out = [CycScalar.zero(order)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def _qpoly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = trim(list(a)), trim(list(b))
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            f = r[-1] / b[-1]
            s = len(r) - len(b)
            for i, c in enumerate(b):
                r[s + i] -= f * c
            trim(r)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def _qpoly_div(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    r = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(r) >= len(b) and any(r):
        f = r[-1] / b[-1]
        s = len(r) - len(b)
        q[s] = f
        for i, c in enumerate(b):
            r[s + i] -= f * c
        r.pop()
    return q


def rational(num: Sequence, den: Sequence, order: int, label: str = "") -> RationalSeries:
    num = [c if isinstance(c, CycScalar) else CycScalar.rational(order, c) for c in num]
    den = [c if isinstance(c, CycScalar) else CycScalar.rational(order, c) for c in den]
    if not den or not den[0]:
        raise ValueError("denominator must have a nonzero constant term")
    if all(c.is_rational() for c in num + den) and len(den) > 1 and len(num) > 1:
        qn = [c.to_fraction() for c in num]
        qd = [c.to_fraction() for c in den]
        g = _qpoly_gcd(qn, qd)
        if len(g) > 1:
            qn, qd = _qpoly_div(qn, g), _qpoly_div(qd, g)
            num = [CycScalar.rational(order, c) for c in qn]
            den = [CycScalar.rational(order, c) for c in qd]
    c0 = den[0].inverse()
    return RationalSeries(tuple(c * c0 for c in num), tuple(c * c0 for c in den), order, label)


def expand(r: RationalSeries, D: int) -> TruncSeries:
    num, den, order = r.numerator, r.denominator, r.order
    out = []
    for k in range(D + 1):
        acc = num[k] if k < len(num) else CycScalar.zero(order)
        for i in range(1, min(k, len(den) - 1) + 1):
            if den[i]:
                acc = acc - den[i] * out[k - i]
        out.append(acc)
    return TruncSeries(tuple(out), order)


def format_product_form(degrees: Sequence[int]) -> str:
    fac = "".join("(1-t)" if d == 1 else f"(1-t^{d})" for d in sorted(degrees))
    return f"1/({fac})" if len(degrees) > 1 else f"1/{fac}"


def product_form(degrees: Sequence[int], order: int) -> RationalSeries:
    den = [CycScalar.one(order)]
    for d in degrees:
        f = [CycScalar.zero(order)] * (d + 1)
        f[0] = CycScalar.one(order)
        f[d] = CycScalar.rational(order, -1)
        den = _pmul(den, f, order)
    return RationalSeries((CycScalar.one(order),), tuple(den), order, format_product_form(degrees))


def qr_form(n: int, lam: CycScalar) -> RationalSeries:
    """1/((1-t)^{n-1}(1-lam t))."""
    order = lam.order
    den = [CycScalar.one(order)]
    for _ in range(n - 1):
        den = _pmul(den, [CycScalar.one(order), CycScalar.rational(order, -1)], order)
    den = _pmul(den, [CycScalar.one(order), -lam], order)
    pw = "" if n - 1 == 1 else f"^{n - 1}"
    label = f"1/((1-t){pw}(1-({lam})t))" if n > 1 else f"1/(1-({lam})t)"
    return RationalSeries((CycScalar.one(order),), tuple(den), order, label)


def matches_qr_form(s: TruncSeries, n: int, lam: CycScalar, D: int | None = None) -> bool:
    D = s.D if D is None else min(D, s.D)
    return s.truncate(D) == expand(qr_form(n, lam), D)


def recognize_product_form(s: TruncSeries, n: int | None = None, D: int | None = None) -> list[int] | None:
    """Greedy peeling of factors (1 - t^d); returns the degree multiset or None.

    The result is sound through degree D: the product expansion is re-checked.
    When n is given, exactly n factors must be used.
    """
    D = s.D if D is None else min(D, s.D)
    vals = s.integers()
    if vals is None or vals[0] != 1:
        return None
    r = vals[: D + 1]
    degrees: list[int] = []
    limit = n if n is not None else D
    while True:
        d = next((k for k in range(1, D + 1) if r[k]), None)
        if d is None:
            break
        if r[d] < 0 or len(degrees) >= limit:
            return None
        # multiply by (1 - t^d)
        r = [r[k] - (r[k - d] if k >= d else 0) for k in range(D + 1)]
        degrees.append(d)
    if n is not None and len(degrees) != n:
        return None
    check = expand(product_form(degrees, s.order), D).integers()
    return degrees if check == vals[: D + 1] else None


# ---------------------------------------------------------------------------
# traces


def hilbert_series(A: PBWPresentation, D: int = DEFAULT_D) -> TruncSeries:
    return TruncSeries.of([pbw_dimension(A.n, d) for d in range(D + 1)], A.order)


def trace_in_degree(g: GradedMap, d: int) -> CycScalar:
    A = g.ring
    acc = CycScalar.zero(A.order)
    md = g.monomial_data()
    for e in monomials(A.n, d):
        if md is not None:
            sigma = md[0]
            # only monomials fixed by the permutation can contribute
            if any(e[sigma[j]] != e[j] for j in range(A.n)):
                continue
        c = g._image_mono(e).get(e)
        if c:
            acc = acc + c
    return acc


def trace_series(A: PBWPresentation, g: GradedMap, D: int = DEFAULT_D) -> TruncSeries:
    """Tr_A(g, t) through t^D, computed degreewise on the ordered monomial basis."""
    if g.ring is not A and g.ring != A:
        raise ValueError("map belongs to a different presentation")
    return TruncSeries(tuple(trace_in_degree(g, d) for d in range(D + 1)), A.order)


_molien_cache: dict = {}


def molien_fixed_hilbert(A: PBWPresentation, G: FiniteGroup, D: int = DEFAULT_D) -> TruncSeries:
    """(1/|G|) sum_h Tr_A(h, t); every coefficient must be a non-negative integer."""
    hit = _molien_cache.get(id(G))
    if hit is not None and hit[0] is G and hit[1].D >= D:
        return hit[1].truncate(D)
    total = [CycScalar.zero(A.order)] * (D + 1)
    for h in G.elements:
        s = trace_series(A, h, D)
        total = [a + b for a, b in zip(total, s.coeffs)]
    inv = Fraction(1, len(G))
    out = TruncSeries(tuple(c * inv for c in total), A.order)
    vals = out.integers()
    if vals is None or any(v < 0 for v in vals):
        raise InternalConsistencyError(
            f"Molien average is not a non-negative integer series: {out}")
    _molien_cache[id(G)] = (G, out)
    return out
