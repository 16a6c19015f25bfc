"""Truncated power series with exact rational (or float) coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


class RationalSeries:
    """Coefficients ``c_0..c_N`` of a formal power series, truncated at order N.

    Arithmetic between series keeps the smaller order. With ``exact=False``
    the coefficients are floats.
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Iterable, order: int | None = None, exact: bool = True):
        cs = list(coeffs)
        conv = Fraction if exact else float
        cs = [conv(c) for c in cs]
        if order is not None:
            cs = (cs + [_zero(exact)] * (order + 1))[: order + 1]
        if not cs:
            raise ValueError("a series needs at least one coefficient")
        self.coeffs = cs
        self.exact = exact

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"RationalSeries({self.coeffs!r})"

    def __eq__(self, other):
        if isinstance(other, RationalSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def _like(self, coeffs) -> RationalSeries:
        return RationalSeries(coeffs, exact=self.exact)

    @classmethod
    def constant(cls, c, order: int, exact: bool = True) -> RationalSeries:
        return cls([c], order=order, exact=exact)

    @classmethod
    def binomial(cls, a, p, order: int, exact: bool = True) -> RationalSeries:
        """``(1 + a z)^p`` for rational ``p``."""
        a = Fraction(a) if exact else float(a)
        p = Fraction(p) if exact else float(p)
        out = [Fraction(1) if exact else 1.0]
        for m in range(1, order + 1):
            out.append(out[-1] * (p - (m - 1)) / m * a)
        return cls(out, exact=exact)

    def __add__(self, other):
        if not isinstance(other, RationalSeries):
            out = list(self.coeffs)
            out[0] += other
            return self._like(out)
        n = min(self.order, other.order)
        return self._like([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalSeries):
            return self._like([c * other for c in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for m in range(n + 1):
            s = _zero(self.exact)
            for i in range(m + 1):
                if a[i] and b[m - i]:
                    s += a[i] * b[m - i]
            out.append(s)
        return self._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, RationalSeries):
            return self * (1 / (Fraction(other) if self.exact else float(other)))
        return self * other.reciprocal()

    def __pow__(self, e: int):
        if int(e) != e or e < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = RationalSeries.constant(1, self.order, self.exact)
        for _ in range(int(e)):
            result = result * self
        return result

    def reciprocal(self) -> RationalSeries:
        a = self.coeffs
        if not a[0]:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        out = [1 / a[0]]
        for m in range(1, self.order + 1):
            s = sum((a[i] * out[m - i] for i in range(1, m + 1)), _zero(self.exact))
            out.append(-s / a[0])
        return self._like(out)

    def derivative(self) -> RationalSeries:
        cs = [i * c for i, c in enumerate(self.coeffs)][1:] or [_zero(self.exact)]
        return self._like(cs)

    def integral(self) -> RationalSeries:
        """Antiderivative with zero constant term; keeps the order."""
        cs = [_zero(self.exact)] + [c / (i + 1) for i, c in enumerate(self.coeffs[:-1])]
        return self._like(cs)

    def exp(self) -> RationalSeries:
        """``exp`` of a series with zero constant term, via ``E' = f' E``."""
        if self.coeffs[0]:
            raise ValueError("exp needs a zero constant term")
        a = self.coeffs
        out = [Fraction(1) if self.exact else 1.0]
        for m in range(1, self.order + 1):
            s = sum((i * a[i] * out[m - i] for i in range(1, m + 1)), _zero(self.exact))
            out.append(s / m)
        return self._like(out)

    def truncate(self, order: int) -> RationalSeries:
        return RationalSeries(self.coeffs, order=order, exact=self.exact)

    def to_float(self) -> RationalSeries:
        return RationalSeries([float(c) for c in self.coeffs], exact=False)

    def evaluate(self, x):
        acc = _zero(self.exact) if isinstance(x, Fraction) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

