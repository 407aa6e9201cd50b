"""Exact coefficient arithmetic: rationals and cyclotomic numbers.

Every identity checked by this package is an equality of exact values, never a
floating-point comparison.  Rationals are ``fractions.Fraction`` (always
reduced, positive denominator).  Cyclotomic numbers are elements of
Q[z]/Phi_e(z) stored as dense coordinate vectors of length phi(e); reduction
modulo the e-th cyclotomic polynomial is canonical, so two equal values at the
same order have identical coordinates.  Mixed-order arithmetic lifts both
operands to the lcm order, so callers never manage orders themselves.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd


Rational = Fraction


def rational_to_str(q: Fraction) -> str:
    """Serialize a rational as "p/q" ("p" when the denominator is 1)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(s) -> Fraction:
    return Fraction(s)


def euler_phi(e: int) -> int:
    if e < 1:
        raise ValueError(f"euler_phi needs a positive argument, got {e}")
    out = 0
    for k in range(1, e + 1):
        if gcd(k, e) == 1:
            out += 1
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(e: int) -> tuple:
    """Integer coefficients of Phi_e, ascending degree, computed by dividing
    x^e - 1 by the product of Phi_d over proper divisors d of e."""
    if e == 1:
        return (-1, 1)
    num = [0] * (e + 1)
    num[0], num[e] = -1, 1
    for d in range(1, e):
        if e % d == 0:
            num = _poly_divide_exact(num, cyclotomic_polynomial(d))
    return tuple(num)

def _poly_divide_exact(num, den):
    # Exact division of integer polynomials, den monic-or-unit leading coeff.
    num = list(num)
    den = list(den)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


def _reduce_mod_cyclotomic(coeffs, e):
    """Reduce a Fraction coefficient list modulo Phi_e; returns a tuple of
    length phi(e)."""
    phi = cyclotomic_polynomial(e)
    deg = len(phi) - 1
    work = list(coeffs)
    for i in range(len(work) - 1, deg - 1, -1):
        c = work[i]
        if c:
            # phi is monic: subtract c * x^(i-deg) * phi
            for j in range(deg + 1):
                work[i - deg + j] -= c * phi[j]
    work = work[:deg]
    work += [Fraction(0)] * (deg - len(work))
    return tuple(work)


class CyclotomicNumber:
    """Element of Q(zeta_e), zeta_e = exp(2*pi*i/e).

    ``coords[k]`` is the coefficient of zeta_e^k in the canonical basis
    1, zeta, ..., zeta^(phi(e)-1).  Instances are immutable; all operations
    return new values and are safe to share across workers.
    """

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords):
        if order < 1:
            raise ValueError(f"order must be positive, got {order}")
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != euler_phi(order):
            raise ValueError(
                f"need phi({order}) = {euler_phi(order)} coordinates, got {len(coords)}"
            )
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, *a):
        raise AttributeError("CyclotomicNumber is immutable")

    def __reduce__(self):
        return (CyclotomicNumber, (self.order, self.coords))

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, q) -> "CyclotomicNumber":
        return cls(1, (Fraction(q),))

    @classmethod
    def zero(cls) -> "CyclotomicNumber":
        return _ZERO

    @classmethod
    def one(cls) -> "CyclotomicNumber":
        return _ONE

    @classmethod
    def zeta(cls, e: int, k: int = 1) -> "CyclotomicNumber":
        """zeta_e^k."""
        k %= e
        raw = [Fraction(0)] * (k + 1)
        raw[k] = Fraction(1)
        return cls(e, _reduce_mod_cyclotomic(raw, e))

    # -- order management --------------------------------------------------

    def lift(self, e: int) -> "CyclotomicNumber":
        """Represent the same value at order e; requires self.order | e."""
        if e == self.order:
            return self
        if e % self.order != 0:
            raise ValueError(f"cannot lift order {self.order} to non-multiple {e}")
        step = e // self.order
        raw = [Fraction(0)] * ((len(self.coords) - 1) * step + 1)
        for k, c in enumerate(self.coords):
            raw[k * step] = c
        return CyclotomicNumber(e, _reduce_mod_cyclotomic(raw, e))

    def _common(self, other):
        if self.order == other.order:
            return self, other
        e = self.order * other.order // gcd(self.order, other.order)
        return self.lift(e), other.lift(e)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coords[0]

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, CyclotomicNumber):
            return x
        if isinstance(x, (int, Fraction)):
            return CyclotomicNumber(1, (Fraction(x),))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.order == 1 and other.order == 1:
            return CyclotomicNumber(1, (self.coords[0] + other.coords[0],))
        a, b = self._common(other)
        return CyclotomicNumber(a.order, tuple(x + y for x, y in zip(a.coords, b.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, tuple(-c for c in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.order == 1 and other.order == 1:
            return CyclotomicNumber(1, (self.coords[0] * other.coords[0],))
        a, b = self._common(other)
        n = len(a.coords)
        raw = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a.coords):
            if x:
                for j, y in enumerate(b.coords):
                    if y:
                        raw[i + j] += x * y
        return CyclotomicNumber(a.order, _reduce_mod_cyclotomic(raw, a.order))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return (self ** (-n)).inverse()
        out = _ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "CyclotomicNumber":
        """Complex conjugation: the Galois action zeta -> zeta^(-1)."""
        e = self.order
        raw = [Fraction(0)] * e
        for k, c in enumerate(self.coords):
            raw[(e - k) % e] += c
        return CyclotomicNumber(e, _reduce_mod_cyclotomic(raw, e))

    def inverse(self) -> "CyclotomicNumber":
        """Multiplicative inverse via extended Euclid against Phi_e in Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("cyclotomic inverse of zero")
        if self.order == 1:
            return CyclotomicNumber(1, (1 / self.coords[0],))
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        inv = _poly_modular_inverse(list(self.coords), phi)
        return CyclotomicNumber(self.order, _reduce_mod_cyclotomic(inv, self.order))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def multiplicative_order(self, bound: int = 10_000) -> int:
        """Smallest k >= 1 with self^k == 1 (for roots of unity)."""
        acc = self
        for k in range(1, bound + 1):
            if acc == _ONE:
                return k
            acc = acc * self
        raise ValueError("not a root of unity within bound")

    # -- comparison / hashing ----------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.order == other.order:
            return self.coords == other.coords
        a, b = self._common(other)
        return a.coords == b.coords

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0])
        return hash((self.order, self.coords))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_rational():
            return f"Cyc({rational_to_str(self.coords[0])})"
        terms = ", ".join(rational_to_str(c) for c in self.coords)
        return f"Cyc(order={self.order}, [{terms}])"


def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p

def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] / b[-1]
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return q, _poly_trim(a)

def _poly_modular_inverse(a, m):
    """Inverse of a modulo m in Q[x] (gcd must be a nonzero constant)."""
    a = _poly_trim([Fraction(c) for c in a])
    r0, r1 = [Fraction(c) for c in m], a
    s0, s1 = [], [Fraction(1)]
    while True:
        if not r1:
            raise ZeroDivisionError("not invertible modulo the cyclotomic polynomial")
        if len(r1) == 1:
            c = r1[0]
            return [x / c for x in s1]
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        qs1 = _poly_mul(q, s1)
        s0, s1 = s1, _poly_sub(s0, qs1)

def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)

def _poly_sub(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _poly_trim(out)


_ZERO = CyclotomicNumber(1, (Fraction(0),))
_ONE = CyclotomicNumber(1, (Fraction(1),))


def cyc(x) -> CyclotomicNumber:
    """Coerce an int / Fraction / CyclotomicNumber to CyclotomicNumber."""
    if isinstance(x, CyclotomicNumber):
        return x
    return CyclotomicNumber(1, (Fraction(x),))


# -- serialization (report-file format) -------------------------------------

def value_to_json(z: CyclotomicNumber):
    """Order-1 values serialize as the rational string "p/q", higher orders
    as {"order": e, "coords": ["p/q", ...]}."""
    if z.order == 1:
        return rational_to_str(z.coords[0])
    return {"order": z.order, "coords": [rational_to_str(c) for c in z.coords]}


def value_from_json(obj) -> CyclotomicNumber:
    if isinstance(obj, dict):
        return CyclotomicNumber(obj["order"], [Fraction(c) for c in obj["coords"]])
    return CyclotomicNumber(1, (Fraction(obj),))
