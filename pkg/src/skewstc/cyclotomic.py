"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Elements are stored in the power basis 1, z, ..., z^(phi(M)-1) of Q(z) with
z = exp(2 pi i / M), reduced modulo the M-th cyclotomic polynomial.  The
coefficients are kept as integer numerators over one common positive
denominator, which is much faster than a tuple of Fractions.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Union

from .errors import FieldMismatchError

Rational = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise ValueError("cyclotomic order must be positive")
    # x^m - 1 divided by Phi_d for every proper divisor d
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1] // lead
        out[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    return out


class _Field:
    """Per-order tables: degree, reduction of high powers, roots of unity."""

    def __init__(self, m: int):
        self.m = m
        phi = cyclotomic_poly(m)
        self.phi = len(phi) - 1
        self.poly = phi
        # red[k] = z^k in the power basis, for 0 <= k < 2*phi - 1 and k < m too
        top = max(2 * self.phi - 1, m + 1)
        red: list[tuple[int, ...]] = []
        cur = [0] * self.phi
        cur[0] = 1
        for _ in range(top):
            red.append(tuple(cur))
            # multiply by z
            carry = cur[-1]
            cur = [0] + cur[:-1]
            if carry:
                for i in range(self.phi):
                    cur[i] -= carry * phi[i]
        self.red = red
        # group of roots of unity in Q(z): cyclic of order N = lcm(2, m)
        self.n_roots = _lcm(2, m)
        self._roots: list[CycScalar] | None = None
        self._root_index: dict[CycScalar, int] | None = None

    def roots(self) -> list["CycScalar"]:
        if self._roots is None:
            m = self.m
            if m % 2 == 0:
                gen = CycScalar._raw(m, self.red[1], 1)
            else:
                gen = -CycScalar._raw(m, self.red[(m + 1) // 2], 1)
            one = CycScalar._raw(m, self.red[0], 1)
            roots = [one]
            for _ in range(self.n_roots - 1):
                roots.append(roots[-1] * gen)
            self._roots = roots
            self._root_index = {r: k for k, r in enumerate(roots)}
        return self._roots

    def root_index(self) -> dict["CycScalar", int]:
        self.roots()
        assert self._root_index is not None
        return self._root_index


@lru_cache(maxsize=None)
def _field(m: int) -> _Field:
    return _Field(m)


def field_degree(m: int) -> int:
    return _field(m).phi


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


class CycScalar:
    """An element of Q(zeta_M); immutable and hashable."""

    __slots__ = ("order", "_nums", "_den", "_hash")

    def __init__(self, order: int, coeffs: Iterable = (0,)):
        fracs = [_to_fraction(c) for c in coeffs]
        den = 1
        for f in fracs:
            den = _lcm(den, f.denominator)
        nums = [f.numerator * (den // f.denominator) for f in fracs]
        F = _field(order)
        if len(nums) > F.phi:
            nums = _reduce(F, nums)
        else:
            nums = nums + [0] * (F.phi - len(nums))
        self._set(order, nums, den)

    def _set(self, order: int, nums, den: int) -> None:
        g = den
        for a in nums:
            if a:
                g = gcd(g, a)
                if g == 1:
                    break
        if g != 1:
            nums = [a // g for a in nums]
            den //= g
        self.order = order
        self._nums = tuple(nums)
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, order: int, nums, den: int) -> "CycScalar":
        obj = cls.__new__(cls)
        obj._set(order, nums, den)
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def rational(cls, order: int, value) -> "CycScalar":
        f = _to_fraction(value)
        nums = [0] * _field(order).phi
        nums[0] = f.numerator
        return cls._raw(order, nums, f.denominator)

    @classmethod
    def zero(cls, order: int) -> "CycScalar":
        return cls.rational(order, 0)

    @classmethod
    def one(cls, order: int) -> "CycScalar":
        return cls.rational(order, 1)

    # -- accessors ----------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self._den) for a in self._nums)

    def is_zero(self) -> bool:
        return not any(self._nums)

    def is_rational(self) -> bool:
        return not any(self._nums[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self._nums[0], self._den)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "CycScalar":
        if isinstance(other, CycScalar):
            if other.order != self.order:
                raise FieldMismatchError(
                    f"Q(zeta_{self.order}) and Q(zeta_{other.order}) mixed; lift explicitly"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycScalar.rational(self.order, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d1, d2 = self._den, o._den
        if d1 == d2:
            return CycScalar._raw(self.order, [a + b for a, b in zip(self._nums, o._nums)], d1)
        den = _lcm(d1, d2)
        f1, f2 = den // d1, den // d2
        return CycScalar._raw(self.order, [a * f1 + b * f2 for a, b in zip(self._nums, o._nums)], den)

    __radd__ = __add__

    def __neg__(self):
        return CycScalar._raw(self.order, [-a for a in self._nums], self._den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self._nums, o._nums
        den = self._den * o._den
        if not any(b[1:]):
            c = b[0]
            return CycScalar._raw(self.order, [x * c for x in a], den)
        if not any(a[1:]):
            c = a[0]
            return CycScalar._raw(self.order, [x * c for x in b], den)
        F = _field(self.order)
        conv = [0] * (2 * F.phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        return CycScalar._raw(self.order, _reduce(F, conv), den)

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        return _inverse(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        idx = _field(self.order).root_index().get(self)
        if idx is not None:
            F = _field(self.order)
            return F.roots()[(idx * k) % F.n_roots]
        result = CycScalar.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycScalar):
            return self.order == other.order and self._den == other._den and self._nums == other._nums
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return self.is_rational() and Fraction(self._nums[0], self._den) == f
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self._nums[0], self._den))
            else:
                self._hash = hash((self.order, self._nums, self._den))
        return self._hash

    def __repr__(self):
        return f"CycScalar({self.order}, {[str(c) for c in self.coeffs]})"

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
                continue
            z = f"z{self.order}" + (f"^{k}" if k > 1 else "")
            if c == 1:
                parts.append(z)
            elif c == -1:
                parts.append("-" + z)
            else:
                parts.append(f"{c}*{z}")
        if not parts:
            return "0"
        s = " + ".join(parts).replace("+ -", "- ")
        return s if len(parts) == 1 else f"({s})"

    # -- serialization ------------------------------------------------
    def to_json(self):
        if self.is_rational():
            return str(self.to_fraction())
        idx = _field(self.order).root_index().get(self)
        if idx is not None and self.order % 2 == 0:
            return {"zeta_exp": idx, "order": self.order}
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}


def _reduce(F: _Field, conv) -> list[int]:
    phi = F.phi
    out = list(conv[:phi]) + [0] * max(0, phi - len(conv))
    red = F.red
    for k in range(phi, len(conv)):
        c = conv[k]
        if c:
            if k < len(red):
                r = red[k]
            else:
                r = red[k % F.m] if k % F.m < len(red) else None
                if r is None:
                    raise AssertionError("reduction table too short")
            for i in range(phi):
                if r[i]:
                    out[i] += c * r[i]
    return out


@lru_cache(maxsize=4096)
def _inverse(a: CycScalar) -> CycScalar:
    F = _field(a.order)
    idx = F.root_index().get(a)
    if idx is not None:
        return F.roots()[(-idx) % F.n_roots]
    if a.is_rational():
        return CycScalar.rational(a.order, 1 / a.to_fraction())
    # extended Euclid on a(x) and Phi_M(x) over Q
    r0 = [Fraction(c) for c in F.poly]
    r1 = list(a.coeffs)
    s0: list[Fraction] = [Fraction(0)]
    s1: list[Fraction] = [Fraction(1)]
    _trim(r1)
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if r1[0] == 0:
        raise ZeroDivisionError("element not invertible")
    c = r1[0]
    inv = CycScalar(a.order, [x / c for x in s1])
    return inv


def _trim(p: list) -> None:
    while len(p) > 1 and p[-1] == 0:
        p.pop()


def _poly_divmod(n: list[Fraction], d: list[Fraction]):
    n = list(n)
    _trim(n)
    d = list(d)
    _trim(d)
    if len(n) < len(d):
        return [Fraction(0)], n
    q = [Fraction(0)] * (len(n) - len(d) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = n[k + len(d) - 1] / d[-1]
        q[k] = c
        if c:
            for i, x in enumerate(d):
                n[k + i] -= c * x
    r = n[: len(d) - 1] or [Fraction(0)]
    _trim(r)
    return q, r


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


# ---------------------------------------------------------------------------
# root-of-unity utilities


def embed_root(m: int, e: int) -> CycScalar:
    """zeta_m^e as an element of Q(zeta_m)."""
    F = _field(m)
    e %= m
    step = F.n_roots // m
    return F.roots()[e * step]


def root_exponent(a: CycScalar) -> tuple[int, int] | None:
    """(k, N) with a = zeta_N^k, N = lcm(2, M), when a is a root of unity."""
    F = _field(a.order)
    idx = F.root_index().get(a)
    if idx is None:
        return None
    return idx, F.n_roots


def root_order(a: CycScalar) -> int | None:
    r = root_exponent(a)
    if r is None:
        return None
    k, n = r
    return n // gcd(n, k)


def lift(a: CycScalar, m2: int) -> CycScalar:
    """Re-express a in Q(zeta_m2); requires a.order | m2."""
    m = a.order
    if m2 % m:
        raise FieldMismatchError(f"cannot lift Q(zeta_{m}) into Q(zeta_{m2})")
    if m2 == m:
        return a
    step = m2 // m
    F2 = _field(m2)
    conv = [0] * (step * (len(a._nums) - 1) + 1)
    for k, c in enumerate(a._nums):
        conv[k * step] = c
    # positions may exceed the reduction table; reduce one power at a time
    out = [0] * F2.phi
    for k, c in enumerate(conv):
        if c:
            r = F2.red[k] if k < len(F2.red) else F2.red[k % m2]
            for i in range(F2.phi):
                out[i] += c * r[i]
    return CycScalar._raw(m2, out, a._den)


@lru_cache(maxsize=None)
def _lift_matrix(m: int, m2: int):
    basis = []
    for k in range(field_degree(m)):
        e = [0] * field_degree(m)
        e[k] = 1
        basis.append(lift(CycScalar(m, e), m2).coeffs)
    return basis


def lower(a: CycScalar, m: int) -> CycScalar | None:
    """The element of Q(zeta_m) whose lift is a, or None when a is not in it."""
    m2 = a.order
    if m == m2:
        return a
    if m2 % m:
        # try through the common field
        big = _lcm(m, m2)
        return lower(lift(a, big), m)
    basis = _lift_matrix(m, m2)
    # solve sum_k c_k basis[k] = a over Q (rows of basis are independent)
    target = list(a.coeffs)
    width = len(target)
    # gaussian elimination on the transposed system
    cols = len(basis)
    aug = [[basis[k][r] for k in range(cols)] + [target[r]] for r in range(width)]
    piv_row = 0
    pivots = []
    for c in range(cols):
        p = next((r for r in range(piv_row, width) if aug[r][c] != 0), None)
        if p is None:
            continue
        aug[piv_row], aug[p] = aug[p], aug[piv_row]
        inv = 1 / aug[piv_row][c]
        aug[piv_row] = [x * inv for x in aug[piv_row]]
        for r in range(width):
            if r != piv_row and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[piv_row])]
        pivots.append(c)
        piv_row += 1
    for r in range(piv_row, width):
        if aug[r][-1] != 0:
            return None
    sol = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        sol[c] = aug[r][-1]
    return CycScalar(m, sol)


def sqrt_root(a: CycScalar) -> CycScalar:
    """The fixed square root branch zeta_M^e -> zeta_{2M}^e, e in [0, M).

    For odd M and a = -zeta_M^e (a root of unity that is not a power of
    zeta_M) the root is returned in Q(zeta_{4M}) instead.
    """
    r = root_exponent(a)
    if r is None:
        raise ValueError(f"square root only provided for roots of unity, got {a}")
    k, n = r
    m = a.order
    if n == m:
        return embed_root(2 * m, k)
    # odd m: a = zeta_{2m}^k
    if k % 2 == 0:
        return embed_root(2 * m, k // 2)
    return embed_root(4 * m, k)


def sqrt_in_field(a: CycScalar, m: int | None = None) -> CycScalar:
    """sqrt_root(a) expressed back in Q(zeta_m) (default: a's own field)."""
    m = a.order if m is None else m
    r = sqrt_root(a)
    low = lower(r, m) if r.order % m == 0 else lower(lift(r, _lcm(r.order, m)), m)
    if low is None:
        raise ValueError(
            f"square root of {a} is not in Q(zeta_{m}); enlarge the root-of-unity order"
        )
    return low


def scalar_from_json(obj, order: int) -> CycScalar:
    """Read a scalar: "p/q", int, {"zeta_exp": e[, "order": k]}, {"order": M, "coeffs": [...]}."""
    if isinstance(obj, CycScalar):
        return obj if obj.order == order else _into(obj, order)
    if isinstance(obj, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(obj, (int, str, Fraction)):
        return CycScalar.rational(order, obj)
    if isinstance(obj, dict):
        if "zeta_exp" in obj:
            k = int(obj.get("order", order))
            z = embed_root(k, int(obj["zeta_exp"]))
            c = obj.get("coeff")
            if c is not None:
                z = z * CycScalar.rational(k, c)
            return _into(z, order)
        if "coeffs" in obj:
            k = int(obj["order"])
            return _into(CycScalar(k, obj["coeffs"]), order)
    raise ValueError(f"unreadable scalar {obj!r}")


def _into(a: CycScalar, order: int) -> CycScalar:
    if order % a.order == 0:
        return lift(a, order)
    low = lower(a, order)
    if low is None:
        raise FieldMismatchError(f"{a} does not lie in Q(zeta_{order})")
    return low
