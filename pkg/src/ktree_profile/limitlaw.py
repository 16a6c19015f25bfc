"""Limit laws of the normalized profile at bounded depth.

``C_{d,j}(u) = sum_m c_m u^m / m!`` is solved order by order from

    (k-1) u C' + C = C^(k+1-j) * L^j,      L = C_{d,j-1},  C_{d,0} = C_{d-1,k},  C_{0,k} = 1.

At order ``m`` the unknown ``c_m`` appears on both sides, with net factor
``(k-1)(m-1) + j - 1``. That factor vanishes only for ``j = 1, m = 1``:
there the equation fixes nothing and instead demands that the order-one
coefficient of ``L`` be zero. The free coefficient is set by the mean,
``c_1 = -1/(k-1)``. For ``d >= 2`` the demand fails because ``L = C_{d-1,k}``
has ``c_1 = -k/(k-1)``, so no series solution exists; ``lower="decoupled"``
instead takes ``C_{d,0} = 1`` for ``d >= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .errors import ConfigError, InconsistentSystemError, ResourceGuardError
from .ktree import DEFAULT_SEED, grow_random, make_rng
from .series import RationalSeries
from . import _kernels

Lower = Literal["coupled", "decoupled"]


@dataclass(frozen=True)
class LimitLawSeries:
    """``coeffs[m] = c_{d,j,m}``, i.e. ``m!`` times the ordinary coefficient."""

    k: int
    d: int
    j: int
    order: int
    coeffs: tuple[Fraction, ...]
    lower: str = "coupled"

    def ordinary(self) -> RationalSeries:
        return RationalSeries([c / math.factorial(m) for m, c in enumerate(self.coeffs)])


def _solve_chain(k: int, d_max: int, M: int, lower: Lower) -> dict[tuple[int, int], RationalSeries]:
    one = RationalSeries.constant(1, M)
    sols: dict[tuple[int, int], RationalSeries] = {(0, k): one}
    for d in range(1, d_max + 1):
        for j in range(1, k + 1):
            if j == 1:
                low = sols[(d - 1, k)] if (lower == "coupled" or d == 1) else one
            else:
                low = sols[(d, j - 1)]
            sols[(d, j)] = _solve_one(k, d, j, M, low)
    return sols


def _solve_one(k: int, d: int, j: int, M: int, low: RationalSeries) -> RationalSeries:
    low_pow = low**j
    a = [Fraction(1)] + [Fraction(0)] * M
    for m in range(1, M + 1):
        trial = RationalSeries(a[: m + 1])
        # order-m coefficient of the right side with c_m still set to zero
        rest = ((trial ** (k + 1 - j)) * low_pow.truncate(m))[m]
        factor = (k - 1) * (m - 1) + j - 1
        if factor == 0:
            if rest != 0:
                raise InconsistentSystemError(
                    f"C_{{{d},{j}}}: order-1 equation requires the lower series to have "
                    f"zero linear term, found {rest}"
                )
            a[m] = Fraction(-1, k - 1)  # mean normalization: E Xi_{d,1} = Gamma(1/k)/(k-1)
        else:
            a[m] = rest / factor
    return RationalSeries(a)


def limit_law_series(k: int, d: int, j: int, M: int, lower: Lower = "coupled") -> LimitLawSeries:
    if k < 2:
        raise ConfigError("k must be >= 2")
    if d < 1 or not 1 <= j <= k:
        raise ConfigError("need d >= 1 and 1 <= j <= k")
    if M < 0:
        raise ConfigError("order must be >= 0")
    if lower not in ("coupled", "decoupled"):
        raise ConfigError(f"unknown lower-level rule {lower!r}")
    sol = _solve_chain(k, d, M, lower)[(d, j)]
    coeffs = tuple(c * math.factorial(m) for m, c in enumerate(sol))
    return LimitLawSeries(k, d, j, M, coeffs, lower)


def ode_residual(k: int, C: RationalSeries, low: RationalSeries, j: int) -> RationalSeries:
    """``(k-1) u C' + C - C^(k+1-j) L^j`` through the order of ``C``."""
    M = C.order
    uc = RationalSeries([m * c for m, c in enumerate(C)])
    return (k - 1) * uc + C - (C ** (k + 1 - j)) * (low.truncate(M) ** j)


def series_residual(series: LimitLawSeries, lower_series: LimitLawSeries | None = None) -> RationalSeries:
    """Residual of ``series`` against the system, with each level coupled to the one below."""
    k, d, j, M = series.k, series.d, series.j, series.order
    if lower_series is None:
        if j > 1:
            lower_series = limit_law_series(k, d, j - 1, M, series.lower)
        elif d > 1 and series.lower == "coupled":
            lower_series = limit_law_series(k, d - 1, k, M, series.lower)
    low = lower_series.ordinary() if lower_series is not None else RationalSeries.constant(1, M)
    return ode_residual(k, series.ordinary(), low, j)


@dataclass(frozen=True)
class MomentVector:
    k: int
    d: int
    j: int
    moments: np.ndarray

    def log_convex(self) -> bool:
        mu = self.moments
        return bool(np.all(mu[1:-1] ** 2 <= mu[:-2] * mu[2:] * (1 + 1e-12)))


def moment_from_coeff(k: int, m: int, c: Fraction) -> float:
    """``Gamma(1/k) |c_m| / Gamma(m (1 - 1/k) + 1/k)``."""
    if c == 0:
        return 0.0
    log_c = math.log(abs(c.numerator)) - math.log(c.denominator)
    return math.exp(math.lgamma(1.0 / k) + log_c - math.lgamma(m * (1 - 1.0 / k) + 1.0 / k))


def limit_moments(k: int, d: int, j: int, M: int, lower: Lower = "coupled") -> MomentVector:
    series = limit_law_series(k, d, j, M, lower)
    mu = np.array([moment_from_coeff(k, m, c) for m, c in enumerate(series.coeffs)])
    return MomentVector(k, d, j, mu)


def closed_form_reference(k: int, d: int, j: int, M: int) -> RationalSeries | None:
    """Known closed forms, expanded to order ``M`` (ordinary coefficients).

    ``(1+u)^(-1/(k-1))`` for ``(d, j) = (1, 1)``; for ``(1, 2)``:
    ``exp(-u/(1+u))/(1+u)`` when ``k = 2`` and ``1/(1 + sqrt(u) arctan(sqrt(u)))``
    when ``k = 3``. Returns ``None`` when no closed form is known.
    """
    if d == 1 and j == 1:
        return RationalSeries.binomial(1, Fraction(-1, k - 1), M)
    if d == 1 and j == 2 and k == 2:
        inv = RationalSeries.binomial(1, -1, M)
        frac = RationalSeries([0] + [(-1) ** i for i in range(1, M + 1)])  # -u/(1+u)
        return frac.exp() * inv
    if d == 1 and j == 2 and k == 3:
        # sqrt(u) arctan(sqrt(u)) = sum_i (-1)^i u^(i+1) / (2i+1)
        at = RationalSeries([0] + [Fraction((-1) ** i, 2 * i + 1) for i in range(M)])
        return (1 + at).reciprocal()
    return None


# ---------------------------------------------------------------------------
# Monte Carlo comparison


def sample_root_degree(
    k: int, n: int, trials: int, seed: int = DEFAULT_SEED, bernoulli_ratio: int = 20
) -> np.ndarray:
    """Samples of ``X[1, 1]`` from the clique-count chain of vertex 1, one substream per trial."""
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        out[t] = _kernels.root_degree_urn(k, n, make_rng(seed, stream=t), bernoulli_ratio)
    return out


def sample_profile_cell(k: int, n: int, d: int, j: int, trials: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    from .profile import connectivity_profile

    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        out[t] = connectivity_profile(grow_random(k, n, make_rng(seed, stream=t)))[d, j]
    return out


@dataclass
class LimitCheckReport:
    k: int
    d: int
    j: int
    n: int
    trials: int
    empirical: list[float]
    limit: list[float]
    ks_statistic: float | None = None

    @property
    def relative_errors(self) -> list[float]:
        return [abs(e - m) / m for e, m in zip(self.empirical, self.limit)]

    def lines(self) -> list[str]:
        out = [f"k={self.k} d={self.d} j={self.j} n={self.n} trials={self.trials}"]
        for r, (e, m, rel) in enumerate(zip(self.empirical, self.limit, self.relative_errors), 1):
            out.append(f"moment {r}: empirical {e:.6g} limit {m:.6g} rel.err {rel:.3%}")
        if self.ks_statistic is not None:
            out.append(f"KS distance to Rayleigh(sqrt 2): {self.ks_statistic:.4f}")
        return out


def empirical_limit_check(
    k: int,
    d: int,
    j: int,
    n: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    lower: Lower = "coupled",
    max_cells: int = 10**9,
) -> LimitCheckReport:
    """Moments 1..3 of ``X[d, j] / (n^(1-1/k) (log n)^(d-1)/(d-1)!)`` against the limit.

    ``X[1, 1]`` is drawn from the clique-count chain of vertex 1; other cells
    grow full trees.
    """
    if trials < 1000:
        raise ConfigError("use at least 1000 trials")
    if (d, j) == (1, 1):
        x = sample_root_degree(k, n, trials, seed)
    else:
        if k * n * trials > max_cells:
            raise ResourceGuardError(f"k*n*trials = {k * n * trials} exceeds {max_cells}")
        x = sample_profile_cell(k, n, d, j, trials, seed)
    scale = n ** (1 - 1.0 / k) * math.log(n) ** (d - 1) / math.factorial(d - 1)
    y = x / scale
    empirical = [float(np.mean(y**r)) for r in (1, 2, 3)]
    limit = list(limit_moments(k, d, j, 3, lower).moments[1:4])
    ks = None
    if (k, d, j) == (2, 1, 1):
        from scipy import stats

        ks = float(stats.kstest(y, stats.rayleigh(scale=math.sqrt(2)).cdf).statistic)
    return LimitCheckReport(k, d, j, n, trials, empirical, limit, ks)
