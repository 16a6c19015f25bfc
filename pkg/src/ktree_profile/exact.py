"""Exact expected connectivity profile and the exact root-degree distribution.

The expected profile satisfies, for the normalized generating function
coefficients ``m[d][j][n]``,

    k(n+1) m[d][j][n+1] = (kn + k - j + 1) m[d][j][n] + j m[d][j-1][n] + [d == 1] t_n

with ``m[d][0] = m[d-1][k]``, ``m[0][k] = 0`` and ``t_n = [z^n](1 - z)^(-1/k)``.
Expectations are ``E = r_n m`` with ``r_n = n! k^n / T_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

import numpy as np

from . import _kernels
from .errors import ConfigError
from .ktree import count_ktrees
from .series import RationalSeries

Backend = Literal["rational", "float"]


def tcoeff(k: int, n: int) -> Fraction:
    """``[z^n] (1 - z)^(-1/k)``."""
    if k < 1 or n < 0:
        raise ConfigError("need k >= 1 and n >= 0")
    t = Fraction(1)
    for i in range(n):
        t = t * (i * k + 1) / (k * (i + 1))
    return t


def t_series(k: int, order: int) -> RationalSeries:
    return RationalSeries.binomial(-1, Fraction(-1, k), order)


def scale_factor(k: int, n: int) -> Fraction:
    """``r_n = n! k^n / T_n``; note ``r_n t_n = 1``."""
    r = Fraction(1)
    for i in range(n):
        r = r * (k * (i + 1)) / (i * k + 1)
    return r


def default_d_max(n_max: int) -> int:
    return max(1, math.ceil(4 * math.log(n_max))) if n_max > 1 else 1


@dataclass(frozen=True)
class ExpectedProfileTable:
    """Expected profile at the retained sizes ``ns``.

    ``E[i, d, j]`` is the expectation of ``X[d, j]`` at ``n = ns[i]``; ``m`` holds
    the generating function coefficients (rational backend only).
    """

    k: int
    ns: tuple[int, ...]
    d_max: int
    backend: str
    E: np.ndarray
    m: np.ndarray | None = None

    def _slot(self, n: int) -> int:
        try:
            return self.ns.index(n)
        except ValueError:
            raise KeyError(f"n = {n} was not retained") from None

    def expectation(self, d: int, j: int, n: int):
        if d > self.d_max:
            return Fraction(0) if self.backend == "rational" else 0.0
        return self.E[self._slot(n), d, j]

    def level_profile(self, n: int, j: int) -> np.ndarray:
        """Expectations over ``d = 0..d_max`` for fixed ``n`` and ``j``."""
        return self.E[self._slot(n), :, j]

    def rows(self):
        for i, n in enumerate(self.ns):
            for d in range(1, self.d_max + 1):
                for j in range(1, self.k + 1):
                    yield self.k, n, d, j, self.E[i, d, j]

    def to_csv(self, rational_format: Literal["fraction", "decimal"] = "fraction") -> str:
        lines = ["k,n,d,j,expectation"]
        for k, n, d, j, e in self.rows():
            if isinstance(e, Fraction) and rational_format == "fraction":
                val = f"{e.numerator}/{e.denominator}" if e.denominator != 1 else str(e.numerator)
            else:
                val = repr(float(e))
            lines.append(f"{k},{n},{d},{j},{val}")
        return "\n".join(lines) + "\n"


def _keep_list(n_max: int, keep: Iterable[int] | None) -> list[int]:
    if keep is None:
        return list(range(n_max + 1))
    ks = sorted(set(int(n) for n in keep))
    if ks and (ks[0] < 0 or ks[-1] > n_max):
        raise ConfigError(f"retained sizes must lie in [0, {n_max}]")
    return ks


def expected_profile_exact(
    k: int,
    n_max: int,
    d_max: int | None = None,
    backend: Backend = "rational",
    keep: Iterable[int] | None = None,
) -> ExpectedProfileTable:
    """Run the coefficient recurrence up to ``n_max``.

    The float backend iterates on ``E`` directly,
    ``E[n+1] = ((kn + k - j + 1) E[n] + j E_lower[n] + [d == 1]) / (kn + 1)``,
    which follows from ``r_{n+1} = r_n k(n+1)/(kn+1)`` and ``r_n t_n = 1``.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    if n_max < 0:
        raise ConfigError("n_max must be >= 0")
    d_max = default_d_max(n_max) if d_max is None else int(d_max)
    if d_max < 1:
        raise ConfigError("d_max must be >= 1")
    ns = _keep_list(n_max, keep)

    if backend == "float":
        E = _kernels.expected_profile_float(k, n_max, d_max, np.array(ns, dtype=np.int64))
        if not np.all(np.isfinite(E)):
            raise ArithmeticError("float recurrence overflowed")
        return ExpectedProfileTable(k, tuple(ns), d_max, "float", E)
    if backend != "rational":
        raise ConfigError(f"unknown backend {backend!r}")

    zero = Fraction(0)
    cur = [[zero] * (k + 1) for _ in range(d_max + 1)]
    E = np.empty((len(ns), d_max + 1, k + 1), dtype=object)
    M = np.empty_like(E)
    t = Fraction(1)
    r = Fraction(1)
    slot = 0
    for n in range(n_max + 1):
        if slot < len(ns) and ns[slot] == n:
            for d in range(d_max + 1):
                for j in range(k + 1):
                    M[slot, d, j] = cur[d][j]
                    E[slot, d, j] = r * cur[d][j]
            slot += 1
        if n == n_max:
            break
        nxt = [[zero] * (k + 1) for _ in range(d_max + 1)]
        for d in range(1, d_max + 1):
            for j in range(1, k + 1):
                lower = cur[d - 1][k] if j == 1 else cur[d][j - 1]
                acc = (k * n + k - j + 1) * cur[d][j] + j * lower
                if d == 1:
                    acc += t
                nxt[d][j] = acc / (k * (n + 1))
        cur = nxt
        t = t * (n * k + 1) / (k * (n + 1))
        r = r * (k * (n + 1)) / (n * k + 1)
    return ExpectedProfileTable(k, tuple(ns), d_max, "rational", E, M)


def expected_d1_closed_form(k: int, n: int) -> Fraction:
    """``E X[1, 1] = r_n (1 - t_n) / (k - 1)``."""
    if k < 2:
        raise ConfigError("closed form needs k >= 2")
    return scale_factor(k, n) * (1 - tcoeff(k, n)) / (k - 1)


def _rising_over_factorial(a: Fraction, ell: int) -> Fraction:
    # binom(a + ell - 1, ell)
    out = Fraction(1)
    for i in range(ell):
        out = out * (a + i) / (i + 1)
    return out


def root_degree_counts(k: int, n_max: int) -> list[list[int]]:
    """``counts[n][ell]``: trees of size ``n + k`` whose vertex 1 has ``ell`` added neighbours.

    Expands ``(1 - u g(z))^(-1/(k-1))`` with ``g = 1 - (1 - kz)^(1 - 1/k)``.
    Since ``g' = (k-1) T``, ``n! [z^n] g = (k-1) T_{n-1}`` is an integer and the
    powers of ``g`` can be convolved as exponential generating functions.
    """
    if k < 2:
        raise ConfigError("root-degree law needs k >= 2")
    T = [count_ktrees(k, i) for i in range(n_max + 1)]
    a = [0] + [(k - 1) * T[m - 1] for m in range(1, n_max + 1)]
    binom = [[math.comb(n, m) for m in range(n + 1)] for n in range(n_max + 1)]
    counts = [[0] * (n + 1) for n in range(n_max + 1)]
    counts[0][0] = 1
    power = [1] + [0] * n_max  # n! [z^n] g^ell
    expo = Fraction(1, k - 1)
    for ell in range(1, n_max + 1):
        nxt = [0] * (n_max + 1)
        for n in range(ell, n_max + 1):
            s = 0
            for m in range(1, n - ell + 2):
                s += binom[n][m] * a[m] * power[n - m]
            nxt[n] = s
        power = nxt
        c = _rising_over_factorial(expo, ell)
        for n in range(ell, n_max + 1):
            val = c * power[n]
            if val.denominator != 1:
                raise ArithmeticError(f"non-integral tree count at n={n}, ell={ell}")
            counts[n][ell] = val.numerator
    return counts


def root_degree_pmf(k: int, n: int) -> list[Fraction]:
    """``P(X[1, 1] = ell)`` for ``ell = 0..n``; the root degree is ``ell + k - 1``."""
    if n < 0:
        raise ConfigError("n must be >= 0")
    total = count_ktrees(k, n)
    return [Fraction(c, total) for c in root_degree_counts(k, n)[n]]


def root_degree_pmf_table(k: int, n_max: int) -> list[list[Fraction]]:
    counts = root_degree_counts(k, n_max)
    out = []
    for n, row in enumerate(counts):
        total = count_ktrees(k, n)
        out.append([Fraction(c, total) for c in row])
    return out
