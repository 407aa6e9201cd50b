"""Truncated Laurent q-expansions over cyclotomic rationals.

A QSeries knows its coefficients exactly for exponents in [valuation,
truncation]; coefficients below the valuation are exactly zero and
coefficients above the truncation are unknown.  Every operation's output
range is a deterministic function of the input ranges, so reports can state
exactly which coefficients are certified.  Storage is dense over the window
(exponent ranges stay small, predictable memory beats sparse bookkeeping).
"""

from __future__ import annotations

from .rings import CyclotomicNumber, cyc, value_to_json, rational_to_str


class SeriesRangeError(ValueError):
    """Coefficient requested outside the certified exponent window."""


_ZERO = cyc(0)


class QSeries:
    __slots__ = ("valuation", "truncation", "_coeffs")

    def __init__(self, valuation: int, truncation: int, coeffs=None):
        if truncation < valuation:
            raise ValueError(f"empty window [{valuation}, {truncation}]")
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "truncation", truncation)
        data = [_ZERO] * (truncation - valuation + 1)
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else coeffs
            for e, v in items:
                if not valuation <= e <= truncation:
                    raise SeriesRangeError(
                        f"exponent {e} outside window [{valuation}, {truncation}]"
                    )
                data[e - valuation] = cyc(v)
        object.__setattr__(self, "_coeffs", data)

    def __setattr__(self, *a):
        raise AttributeError("QSeries is immutable")

    def __reduce__(self):
        return (QSeries, (self.valuation, self.truncation, tuple(self.nonzero_items())))

    # -- access --------------------------------------------------------------

    def coeff(self, e: int) -> CyclotomicNumber:
        """Coefficient of q^e; exact zero below the valuation, error above the
        truncation (that coefficient is not certified)."""
        if e < self.valuation:
            return _ZERO
        if e > self.truncation:
            raise SeriesRangeError(
                f"coefficient of q^{e} not certified (window ends at {self.truncation})"
            )
        return self._coeffs[e - self.valuation]

    def nonzero_items(self):
        v = self.valuation
        for i, c in enumerate(self._coeffs):
            if not c.is_zero():
                yield v + i, c

    def min_nonzero_exponent(self) -> int:
        """Smallest exponent with a nonzero stored coefficient (the series
        valuation in the strict sense)."""
        for e, _ in self.nonzero_items():
            return e
        raise ValueError("series is zero on its entire certified window")

    def is_zero_on_window(self) -> bool:
        return all(c.is_zero() for c in self._coeffs)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, valuation: int, truncation: int) -> "QSeries":
        return cls(valuation, truncation)

    @classmethod
    def one(cls, truncation: int) -> "QSeries":
        return cls(0, truncation, {0: 1})

    @classmethod
    def monomial(cls, value, exponent: int, truncation: int) -> "QSeries":
        return cls(exponent, truncation, {exponent: value})

    # -- ring operations -------------------------------------------------------

    def __add__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        v = min(self.valuation, other.valuation)
        n = min(self.truncation, other.truncation)
        out = QSeries(v, n)
        data = out._coeffs
        for e, c in self.nonzero_items():
            if e <= n:
                data[e - v] = data[e - v] + c
        for e, c in other.nonzero_items():
            if e <= n:
                data[e - v] = data[e - v] + c
        return out

    def __neg__(self) -> "QSeries":
        out = QSeries(self.valuation, self.truncation)
        data = out._coeffs
        for e, c in self.nonzero_items():
            data[e - self.valuation] = -c
        return out

    def __sub__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, factor) -> "QSeries":
        factor = cyc(factor)
        out = QSeries(self.valuation, self.truncation)
        data = out._coeffs
        if not factor.is_zero():
            for e, c in self.nonzero_items():
                data[e - self.valuation] = factor * c
        return out

    def __mul__(self, other: "QSeries") -> "QSeries":
        """Exact Cauchy convolution; output window
        [v_a + v_b, min(N_a + v_b, N_b + v_a)]."""
        if not isinstance(other, QSeries):
            return NotImplemented
        v = self.valuation + other.valuation
        n = min(self.truncation + other.valuation, other.truncation + self.valuation)
        out = QSeries(v, n)
        data = out._coeffs
        terms_a = list(self.nonzero_items())
        terms_b = list(other.nonzero_items())
        for ea, ca in terms_a:
            for eb, cb in terms_b:
                e = ea + eb
                if e > n:
                    break
                data[e - v] = data[e - v] + ca * cb
        return out

    def pow(self, exponent: int) -> "QSeries":
        """Repeated-squaring exact power, exponent >= 1."""
        if exponent < 1:
            raise ValueError(f"power must be >= 1, got {exponent}")
        base = self
        out = None
        k = exponent
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def divide(self, other: "QSeries") -> "QSeries":
        """Laurent quotient q with q * other == self on the certified window.

        Divisor leading coefficients are taken at its first nonzero exponent;
        a divisor that is zero on its whole window is an error.  The quotient
        window is [va - vb, min(Na - vb, Nb + va - 2*vb)] with va, vb the
        strict valuations.
        """
        if not isinstance(other, QSeries):
            raise TypeError("divide expects a QSeries")
        if other.is_zero_on_window():
            raise ZeroDivisionError("divisor is identically zero on its stored range")
        vb = other.min_nonzero_exponent()
        if self.is_zero_on_window():
            # 0 / b: zero quotient on the best-supported window
            v = self.valuation - vb
            return QSeries(v, self.truncation - vb)
        va = self.min_nonzero_exponent()
        lead = other.coeff(vb)
        lead_inv = lead.inverse()
        vq = va - vb
        nq = min(self.truncation - vb, other.truncation + va - 2 * vb)
        if nq < vq:
            raise SeriesRangeError("operand windows too narrow for any quotient term")
        q = [_ZERO] * (nq - vq + 1)
        for r in range(vq, nq + 1):
            acc = self.coeff(r + vb)
            for i in range(vq, r):
                qi = q[i - vq]
                if not qi.is_zero():
                    b = other.coeff(r + vb - i)
                    if not b.is_zero():
                        acc = acc - qi * b
            q[r - vq] = acc * lead_inv
        return QSeries(vq, nq, {vq + i: c for i, c in enumerate(q)})

    # -- comparison -------------------------------------------------------------

    def agrees_with(self, other: "QSeries", lo: int | None = None, hi: int | None = None) -> bool:
        """Exact coefficient-wise equality on the overlap of the certified
        windows (or on [lo, hi] if given)."""
        lo = max(self.valuation, other.valuation) if lo is None else lo
        hi = min(self.truncation, other.truncation) if hi is None else hi
        return all(self.coeff(e) == other.coeff(e) for e in range(lo, hi + 1))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.valuation == other.valuation
            and self.truncation == other.truncation
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self.valuation, self.truncation, tuple(self._coeffs)))

    def __repr__(self):
        head = ", ".join(f"q^{e}:{c!r}" for e, c in list(self.nonzero_items())[:6])
        return f"QSeries([{self.valuation},{self.truncation}], {head} ...)"

    # -- export ------------------------------------------------------------------

    def to_json_obj(self) -> dict:
        """JSON dump: certified window plus nonzero rows {exponent, value};
        absent exponents inside the window are exact zeros."""
        return {
            "valuation": self.valuation,
            "truncation": self.truncation,
            "rows": [
                {"exponent": e, "value": value_to_json(c)} for e, c in self.nonzero_items()
            ],
        }

    def to_csv_rows(self):
        for e, c in self.nonzero_items():
            if c.order == 1:
                yield (e, rational_to_str(c.coords[0]))
            else:
                yield (e, repr(c))
