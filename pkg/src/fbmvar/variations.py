"""Weighted Hermite and power variations, renormalisation, diagnostics.

The central statistic is

    V_n^(q)(f) = sum_{k=1}^{2^n} f(B_{(k-1)2^-n}) H_q(2^{nH} dB_{k2^-n}),

with the weight always evaluated at the left endpoint.  The centered
weighted power variation decomposes exactly through the monomial
expansion x**q - mu_q = sum_{p>=1} p! C(q,p) mu_{q-p} H_p(x), which the
tests exercise against ``hermite.monomial_in_hermite``.

Single-path entry points accumulate with ``math.fsum`` (exactly rounded
compensated summation; the sums mix 2**n terms of both signs).  The
batched kernels used by the Monte Carlo experiments accumulate with
numpy's pairwise summation instead, whose error O(eps log(2**n)) is ten
orders of magnitude below Monte Carlo noise; see the ledger note on this
trade-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import ScalingRegime, classify_regime, renorm_factor
from .errors import SizeLimitError
from .fbm import FbmPath, rho
from .hermite import gaussian_moment, hermite_eval
from .weights import WeightFunction

ALPHA_GAMMA_MAX_LEVEL = 14
BETA_MAX_LEVEL = 24


@dataclass(frozen=True)
class VariationStatistic:
    order: int
    level: int
    raw_value: float
    renormalized_value: float
    regime: ScalingRegime


@dataclass(frozen=True)
class DiagnosticSums:
    """The proof diagnostics alpha_n, beta_{r,n} (r = 1..q), gamma_n."""

    level: int
    alpha: float
    beta: dict[int, float]
    gamma: float


def weighted_hermite_variation(path: FbmPath, f: WeightFunction, q: int) -> float:
    """V_n^(q)(f) for one path, exactly accumulated."""
    if q < 1:
        raise ValueError(f"order must be >= 1, got {q}")
    scaled = 2.0 ** (path.level * path.hurst) * path.increments
    terms = f(path.values[:-1]) * hermite_eval(q, scaled)
    return math.fsum(terms)


def weighted_power_variation(
    path: FbmPath, f: WeightFunction, q: int, centered: bool = False
) -> float:
    """sum_k f(B_(k-1)2^-n) [ (2^{nH} dB)^q - (centered ? mu_q : 0) ]."""
    if q < 1:
        raise ValueError(f"order must be >= 1, got {q}")
    scaled = 2.0 ** (path.level * path.hurst) * path.increments
    powers = scaled**q
    if centered:
        powers = powers - gaussian_moment(q)
    return math.fsum(f(path.values[:-1]) * powers)


def renormalize(raw_value: float, hurst: float, q: int, level: int) -> VariationStatistic:
    """Apply the regime prefactor of (H, q) to a raw variation value."""
    regime = classify_regime(hurst, q)
    factor = renorm_factor(hurst, q, level)
    return VariationStatistic(
        order=q,
        level=level,
        raw_value=raw_value,
        renormalized_value=factor * raw_value,
        regime=regime,
    )


def beta_sums(hurst: float, level: int, q: int) -> dict[int, float]:
    """beta_{r,n} = sum_{k,l} |<delta_k, delta_l>|^r for r = 1..q.

    Uses the stationary reduction 2^(-2nrH - r) sum_{k,l} |rho_H(k-l)|^r,
    an O(2^n) computation allowed up to level 24.
    """
    if q < 1:
        raise ValueError(f"order must be >= 1, got {q}")
    if level > BETA_MAX_LEVEL:
        raise SizeLimitError(f"level {level} exceeds beta ceiling {BETA_MAX_LEVEL}")
    n_pts = 2**level
    lags = np.arange(n_pts)
    abs_rho = np.abs(rho(lags, hurst))
    # sum over k,l of |rho(k-l)|^r = sum over lags j of (N - |j|) |rho(j)|^r
    weights = np.concatenate(([float(n_pts)], 2.0 * (n_pts - lags[1:])))
    return {
        r: 2.0 ** (-2.0 * level * r * hurst - r) * float(np.dot(weights, abs_rho**r))
        for r in range(1, q + 1)
    }


def diagnostic_sums(hurst: float, level: int, q: int) -> DiagnosticSums:
    """Deterministic proof diagnostics at (H, n).

    alpha_n and gamma_n run over the full O(4^n) grid of inner products
    <eps_(k-1)2^-n, delta_l2^-n> = E[B_(k-1)2^-n dB_l2^-n], which caps the
    level at 14; the beta_{r,n} come from ``beta_sums`` (stationary O(2^n)
    reduction, available on its own up to level 24).
    """
    if level > ALPHA_GAMMA_MAX_LEVEL:
        raise SizeLimitError(
            f"level {level} exceeds alpha/gamma ceiling {ALPHA_GAMMA_MAX_LEVEL}; "
            "use beta_sums for the stationary diagnostics up to level "
            f"{BETA_MAX_LEVEL}"
        )
    beta = beta_sums(hurst, level, q)
    n_pts = 2**level
    # <eps_u, delta_l> = 2^(-2Hn-1) (l^2H - (l-1)^2H - |l-u|^2H + |l-u-1|^2H), u = k-1
    h2 = 2.0 * hurst
    pows = np.arange(n_pts + 1, dtype=float) ** h2  # |j|^2H for j = 0..N
    l_col = np.arange(1, n_pts + 1)
    base = pows[l_col] - pows[l_col - 1]
    alpha = 0.0
    gamma = 0.0
    chunk = max(1, (1 << 22) // n_pts)
    for lo in range(0, n_pts, chunk):
        u = np.arange(lo, min(lo + chunk, n_pts))
        d = l_col[None, :] - u[:, None]  # l - u in [1-N+1, N]
        inner = base[None, :] - pows[np.abs(d)] + pows[np.abs(d - 1)]
        np.abs(inner, out=inner)
        alpha = max(alpha, float(inner.max()))
        gamma += float(inner.sum())
    scale = 2.0 ** (-2.0 * hurst * level - 1.0)
    return DiagnosticSums(
        level=level, alpha=scale * alpha, beta=beta, gamma=scale * gamma
    )


def hermite_variation_rows(
    values: np.ndarray, hurst: float, level: int, f: WeightFunction, q: int
) -> np.ndarray:
    """V_n^(q)(f) per row of a (replicates, 2^n + 1) path-value matrix."""
    scaled = 2.0 ** (level * hurst) * np.diff(values, axis=1)
    return np.sum(f(values[:, :-1]) * hermite_eval(q, scaled), axis=1)


def power_variation_rows(
    values: np.ndarray,
    hurst: float,
    level: int,
    f: WeightFunction,
    q: int,
    centered: bool,
) -> np.ndarray:
    scaled = 2.0 ** (level * hurst) * np.diff(values, axis=1)
    powers = scaled**q
    if centered:
        powers = powers - gaussian_moment(q)
    return np.sum(f(values[:, :-1]) * powers, axis=1)


def riemann_sum_rows(
    values: np.ndarray, f: WeightFunction, order: int = 0
) -> np.ndarray:
    """Left-endpoint Riemann sum 2^-n sum_k f^(order)(B_(k-1)2^-n) per row."""
    n_inc = values.shape[1] - 1
    return np.sum(f.derivative(order, values[:, :-1]), axis=1) / n_inc


def unweighted_second_moment(hurst: float, q: int, level: int) -> float:
    """Exact E[(V_n^(q)(1))^2] = (1/q!) sum_{k,l} (rho_H(k-l)/2)^q.

    Uses stationarity: sum over lags j of (2^n - |j|) (rho(j)/2)^q, an
    O(2^n) computation; the normalised increments have correlation
    rho_H(k-l)/2 and E[H_q(X)H_q(Y)] = corr^q / q!.
    """
    n_pts = 2**level
    lags = np.arange(1, n_pts)
    corr = 0.5 * rho(lags, hurst)
    total = n_pts * 1.0 + 2.0 * math.fsum((n_pts - lags) * corr**q)
    return total / math.factorial(q)


def centered_power_second_moment(hurst: float, q: int, level: int) -> float:
    """Exact second moment of the centered unweighted power variation.

    Expanding (2^{nH} dB)^q - mu_q over Hermite components p = 1..q gives
    E[S_n^2] = sum_{k,l} sum_p (p! C(q,p) mu_{q-p})^2 (rho(k-l)/2)^p / p!.
    """
    n_pts = 2**level
    lags = np.arange(1, n_pts)
    corr = 0.5 * rho(lags, hurst)
    total = 0.0
    for p in range(1, q + 1):
        mu = gaussian_moment(q - p)
        if mu == 0.0:
            continue
        coef = (math.factorial(p) * math.comb(q, p) * mu) ** 2 / math.factorial(p)
        diag = n_pts * (0.5 * rho(0, hurst)) ** p
        total += coef * (diag + 2.0 * math.fsum((n_pts - lags) * corr**p))
    return total
