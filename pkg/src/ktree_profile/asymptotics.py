"""Asymptotic estimates for the expected profile.

Everything is driven by the characteristic polynomial

    P_w(theta) = prod_{l=1..k} (theta - l/k) - k! w / k^k

whose largest real root ``lambda_1(w)`` controls the growth of level ``d``
through the saddle point equation ``rho * lambda_1'(rho) = d / log n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, NonConvergenceError

ITERATION_CAP = 200
LIMIT_STEP = 1e-5
LIMIT_FLAG = 1e-3


def _need_k(k: int, least: int = 1) -> None:
    if int(k) != k or k < least:
        raise ConfigError(f"k must be an integer >= {least}, got {k!r}")


def harmonic(k: int, power: int = 1) -> float:
    return math.fsum(1.0 / ell**power for ell in range(1, k + 1))


def spectral_constant(k: int) -> float:
    """``k! / k^k``."""
    return math.factorial(k) / k**k


def bisect_newton(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    coarse: float = 1e-3,
    tol: float = 1e-12,
    cap: int = ITERATION_CAP,
) -> float:
    """Root of ``f`` on a sign-changing bracket: bisect to ``coarse``, then Newton.

    Newton steps that leave the current bracket are replaced by bisection.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NonConvergenceError(f"no sign change on [{lo}, {hi}]")
    it = 0
    while hi - lo > coarse:
        it += 1
        if it > cap:
            raise NonConvergenceError("bisection exceeded the iteration cap")
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    while it < cap:
        it += 1
        fx = f(x)
        if fx == 0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi = x
        d = df(x)
        step = fx / d if d else math.inf
        if abs(step) <= tol * max(1.0, abs(x)):
            return x - step if lo <= x - step <= hi else x
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        x = nxt
    raise NonConvergenceError(f"Newton iteration did not reach {tol} within {cap} steps")


def _product_poly(k: int) -> np.polynomial.Polynomial:
    return np.polynomial.Polynomial.fromroots([ell / k for ell in range(1, k + 1)])


def lambda1(k: int, w: float) -> float:
    """Largest real root of ``P_w``; it lies in ``[1, 1 + (c w)^(1/k)]``."""
    _need_k(k)
    if w < 0:
        raise ConfigError("w must be positive")
    cw = spectral_constant(k) * w
    if cw == 0:
        return 1.0
    ls = [ell / k for ell in range(1, k + 1)]

    def f(t):
        return math.prod(t - q for q in ls) - cw

    def df(t):
        # t > 1 keeps every factor positive
        return math.prod(t - q for q in ls) * math.fsum(1.0 / (t - q) for q in ls)

    # for k = 1 the root sits on the upper end, so pad it against rounding
    return bisect_newton(f, df, 1.0, 1.0 + cw ** (1.0 / k) * (1 + 1e-9) + 1e-12)


@dataclass(frozen=True)
class SpectralData:
    """Roots of ``P_w`` (``roots[0]`` is ``lambda_1``) and derivatives of ``lambda_1``."""

    k: int
    w: float
    roots: np.ndarray
    dlambda1: float
    d2lambda1: float

    @property
    def lambda1(self) -> float:
        return float(self.roots[0].real)

    def residuals(self) -> np.ndarray:
        """``|prod(lambda_m - l/k) - k! w / k^k|`` for every root."""
        prod = np.ones_like(self.roots)
        for ell in range(1, self.k + 1):
            prod = prod * (self.roots - ell / self.k)
        return np.abs(prod - spectral_constant(self.k) * self.w)

    def h(self) -> np.ndarray:
        return h_coefficients(self.k, self.w, self)


def _polish(poly, dpoly, z: complex, steps: int = 50) -> complex:
    for _ in range(steps):
        d = dpoly(z)
        if d == 0:
            break
        step = poly(z) / d
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return z


def lambda_spectrum(k: int, w: float) -> SpectralData:
    """All ``k`` roots of ``P_w`` and ``lambda_1'``, ``lambda_1''`` at ``w``.

    ``lambda_1`` is bracketed on ``theta >= 1``; the other roots come from the
    deflated polynomial and are then polished on ``P_w`` itself.
    """
    _need_k(k)
    if not w > 0:
        raise ConfigError("w must be real and positive")
    c = spectral_constant(k)
    lam = lambda1(k, w)
    full = _product_poly(k) - c * w
    dfull = full.deriv()
    if k > 1:
        quotient, _ = divmod(full, np.polynomial.Polynomial([-lam, 1.0]))
        rest = [_polish(full, dfull, complex(z)) for z in quotient.roots()]
        rest.sort(key=lambda z: (-z.real, -z.imag))
    else:
        rest = []
    roots = np.array([complex(lam)] + rest)
    d1 = dfull(lam)
    d2 = dfull.deriv()(lam)
    lp = c / d1
    lpp = -c * c * d2 / d1**3
    return SpectralData(k, float(w), roots, float(lp), float(lpp))


def _h_entry(k: int, w: float, lam, j: int, ratio=None):
    x = k * lam
    s = sum(1.0 / (x - q) for q in range(1, k + 1))
    den = (x - 1) * s
    for q in range(k - j + 1, k + 1):
        den = den * (x - q)
    if ratio is None:
        ratio = (w - 1) / (x - (k + 1))
    return math.factorial(j) * w * ratio / den


def _limit_ratio(k: int, w: float, step: float = LIMIT_STEP) -> float:
    # (w - 1) / (k lambda_1(w) - (k + 1)) is 0/0 at w = 1; average the two neighbours.
    vals = []
    for ww in (1.0 + step, 1.0 - step):
        vals.append((ww - 1) / (k * lambda1(k, ww) - (k + 1)))
    return 0.5 * (vals[0] + vals[1])


def h_coefficients(k: int, w: float, spectrum: SpectralData | None = None) -> np.ndarray:
    """Matrix ``h[j-1, m-1] = h_{j,m}(w)`` (complex in general)."""
    spec = spectrum if spectrum is not None else lambda_spectrum(k, w)
    roots = spec.roots
    if k > 1:
        gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(k)
        if gaps.min() < 1e-8:
            raise NonConvergenceError(f"roots collide at w = {w}; h is undefined")
    out = np.empty((k, k), dtype=complex)
    near_one = abs(w - 1.0) < LIMIT_STEP
    lim = _limit_ratio(k, w) if near_one else None
    for j in range(1, k + 1):
        for m, lam in enumerate(roots):
            ratio = lim if (m == 0 and near_one) else None
            out[j - 1, m] = _h_entry(k, w, lam, j, ratio)
    return out


def h_j1(k: int, j: int, w: float) -> float:
    """``h_{j,1}(w)`` on the real branch, with the limit procedure near ``w = 1``."""
    lam = lambda1(k, w)
    ratio = _limit_ratio(k, w) if abs(w - 1.0) < LIMIT_STEP else None
    return float(_h_entry(k, w, lam, j, ratio))


def asym_fixed_d(k: int, n: float, d: int, j: int) -> float:
    """``Gamma(1/k) j/(k-1) (log n)^(d-1)/(d-1)! n^(1-1/k)``."""
    _need_k(k, 2)
    if d < 1 or not 1 <= j <= k:
        raise ConfigError("need d >= 1 and 1 <= j <= k")
    if n <= 1:
        raise ConfigError("n must exceed 1")
    L = math.log(n)
    log_val = (
        math.lgamma(1.0 / k) + math.log(j / (k - 1)) + (d - 1) * math.log(L)
        - math.lgamma(d) + (1 - 1.0 / k) * L
    )
    return math.exp(log_val)


@dataclass(frozen=True)
class SaddleSolution:
    k: int
    n: float
    d: float
    alpha: float
    rho: float
    lambda1: float
    dlambda1: float
    d2lambda1: float
    limit_evaluated: bool = False

    @property
    def variance_factor(self) -> float:
        return self.rho * self.dlambda1 + self.rho**2 * self.d2lambda1


def saddle_alpha_of_v(k: int, v: float) -> float:
    """``rho lambda_1'(rho)`` expressed through ``v = lambda_1(rho)``."""
    return 1.0 / math.fsum(1.0 / (v - ell / k) for ell in range(1, k + 1))


def solve_saddle(k: int, alpha: float, n: float = math.nan, d: float = math.nan) -> SaddleSolution:
    """Solve ``rho lambda_1'(rho) = alpha`` through ``1/alpha = sum 1/(v - l/k)``.

    ``v`` is bracketed by ``[1 + alpha, 1 + k alpha]``, then ``rho = prod(v - l/k) k^k / k!``.
    """
    _need_k(k, 1)
    if not alpha > 0 or not math.isfinite(alpha):
        raise ConfigError(f"alpha must be positive and finite, got {alpha}")
    ls = [ell / k for ell in range(1, k + 1)]
    inv = 1.0 / alpha

    def f(v):
        return math.fsum(1.0 / (v - q) for q in ls) - inv

    def df(v):
        return -math.fsum(1.0 / (v - q) ** 2 for q in ls)

    lo, hi = 1.0 + alpha, 1.0 + k * alpha
    v = lo if k == 1 else bisect_newton(f, df, lo, hi)
    prod = _product_poly(k)
    c = spectral_constant(k)
    rho = prod(v) / c
    d1 = prod.deriv()(v)
    d2 = prod.deriv(2)(v)
    lp = c / d1
    lpp = -c * c * d2 / d1**3
    return SaddleSolution(k, n, d, alpha, float(rho), float(v), float(lp), float(lpp),
                          abs(rho - 1.0) < LIMIT_FLAG)


def asym_large_d(k: int, n: float, d: int, j: int) -> tuple[SaddleSolution, float]:
    """Saddle point estimate of ``E X[d, j]`` at size ``n``."""
    _need_k(k, 2)
    if d < 1 or not 1 <= j <= k:
        raise ConfigError("need d >= 1 and 1 <= j <= k")
    if n <= 1:
        raise ConfigError("n must exceed 1")
    L = math.log(n)
    sol = solve_saddle(k, d / L, n, d)
    h = h_j1(k, j, sol.rho)
    var = sol.variance_factor
    if not h > 0 or not var > 0:
        raise NonConvergenceError(f"degenerate saddle data h={h}, variance={var}")
    log_est = (
        math.lgamma(1.0 / k) + math.log(h) - d * math.log(sol.rho) + (sol.lambda1 - 1.0 / k) * L
        - math.lgamma(sol.lambda1) - 0.5 * math.log(2 * math.pi * var * L)
    )
    return sol, math.exp(log_est)


def llt_sigma(k: int) -> float:
    """``sqrt(H_k^(2) / (k H_k^3))``."""
    return math.sqrt(harmonic(k, 2) / (k * harmonic(k) ** 3))


def llt_center(k: int, n: float) -> float:
    return math.log(n) / (k * harmonic(k))


def llt_x(k: int, n: float, d: float) -> float:
    return (d - llt_center(k, n)) / (llt_sigma(k) * math.sqrt(math.log(n)))


def llt_gaussian(k: int, n: float, d: float) -> float:
    """Gaussian approximation ``n exp(-x^2/2) / sqrt(2 pi sigma^2 log n)`` of level ``d``."""
    _need_k(k)
    if n < 3:
        raise ConfigError("n must be >= 3")
    x = llt_x(k, n, d)
    s2 = llt_sigma(k) ** 2
    return n * math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi * s2 * math.log(n))


@dataclass(frozen=True)
class HeightConstant:
    k: int
    alpha_plus: float
    v: float

    @property
    def correction(self) -> float:
        """Coefficient of ``-log log n`` in the height bound."""
        return self.alpha_plus / (2 * (self.v - 1.0 / self.k))

    def residuals(self) -> tuple[float, float]:
        k, a, v = self.k, self.alpha_plus, self.v
        r1 = 1.0 / a - math.fsum(1.0 / (v - ell / k) for ell in range(1, k + 1))
        r2 = v - 1.0 / k - a * math.fsum(math.log(k * v / ell - 1) for ell in range(1, k + 1))
        return r1, r2


def alpha_plus(k: int) -> HeightConstant:
    """Height constant: eliminate ``alpha`` and solve for ``v > 1``.

    With ``S(v) = sum log(kv/l - 1)`` and ``alpha(v) = 1 / sum 1/(v - l/k)`` the
    second equation reads ``g(v) = v - 1/k - alpha(v) S(v) = 0``; ``g`` is
    positive near ``v = 1`` and changes sign once.
    """
    _need_k(k, 2)
    ls = [ell / k for ell in range(1, k + 1)]

    def S(v):
        return math.fsum(math.log(v / q - 1) for q in ls)

    def g(v):
        return v - 1.0 / k - saddle_alpha_of_v(k, v) * S(v)

    def dg(v):
        a = saddle_alpha_of_v(k, v)
        da = a * a * math.fsum(1.0 / (v - q) ** 2 for q in ls)
        return -da * S(v)

    lo, hi = 1.0 + 1e-9, 2.0
    while g(hi) > 0:
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise NonConvergenceError(f"could not bracket alpha_plus for k={k}")
    v = bisect_newton(g, dg, lo, hi)
    return HeightConstant(k, saddle_alpha_of_v(k, v), v)


def height_bound(k: int, n: float) -> float:
    """``alpha_+ log n - alpha_+/(2(v - 1/k)) log log n``, without the O(1) term."""
    if n < 3:
        raise ConfigError("n must be >= 3")
    hc = alpha_plus(k)
    L = math.log(n)
    return hc.alpha_plus * L - hc.correction * math.log(L)


def width_order(k: int, n: float) -> float:
    """Peak of the Gaussian level approximation, ``n / sqrt(2 pi sigma^2 log n)``."""
    if n < 3:
        raise ConfigError("n must be >= 3")
    return n / math.sqrt(2 * math.pi * llt_sigma(k) ** 2 * math.log(n))
