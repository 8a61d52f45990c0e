"""Hermite process simulation and pathwise Young-type integrals.

The order-q Hermite process is realised through its discrete
approximation from a concrete fine fBm path at level m:

    Z_m(t) = 2^{m(q(1-H)-1)} sum_{j <= 2^m t} H_q(2^{mH} dB_{j2^-m}),

which converges in L^2 to Z_t as m grows (H > 1 - 1/(2q)).  Working from
a path (rather than the abstract chaos kernel) couples Z to B on the same
probability space, which is what the L^2 verification experiments need.
At t = 1 the construction is, by definition, the renormalised unweighted
Hermite variation of the path.

Integrals of the form int f(B) dZ are left-endpoint Riemann-Young sums
on an aligned coarse grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import RegimeCase, classify_regime
from .errors import DomainError, GridAlignmentError, RegimeError
from .fbm import FbmPath
from .hermite import hermite_eval
from .weights import WeightFunction


@dataclass(frozen=True)
class HermiteApprox:
    """Discrete Hermite-process approximation on a coarse dyadic grid."""

    order: int
    hurst: float
    fine_level: int
    out_level: int
    values: np.ndarray  # Z at t_j = j 2^-out_level, values[0] == 0
    source: FbmPath | None = None

    @property
    def times(self) -> np.ndarray:
        return np.arange(2**self.out_level + 1) * 2.0**-self.out_level


def hermite_partial_sums(
    increments: np.ndarray, hurst: float, fine_level: int, q: int, out_level: int
) -> np.ndarray:
    """Z values on the coarse grid from (rows of) fine increments."""
    inc = np.atleast_2d(increments)
    scaled = 2.0 ** (fine_level * hurst) * inc
    prefactor = 2.0 ** (fine_level * (q * (1.0 - hurst) - 1.0))
    csum = np.cumsum(hermite_eval(q, scaled), axis=1)
    stride = 2 ** (fine_level - out_level)
    picks = np.arange(stride - 1, inc.shape[1], stride)
    out = np.zeros((inc.shape[0], 2**out_level + 1))
    out[:, 1:] = prefactor * csum[:, picks]
    if increments.ndim == 1:
        return out[0]
    return out


def simulate_hermite(path: FbmPath, q: int, out_level: int) -> HermiteApprox:
    """Approximate Z^(q) from a fine fBm path, sampled on a coarser grid.

    Requires the non-central regime H > 1 - 1/(2q) and out_level <= the
    path's level.  Deterministic given the path: same seed, same Z.
    """
    if classify_regime(path.hurst, q).case_id is not RegimeCase.NONCENTRAL:
        raise RegimeError(
            f"Hermite process of order {q} requires H > 1 - 1/(2q) = "
            f"{1.0 - 1.0 / (2 * q)}, got H={path.hurst}"
        )
    if not 1 <= out_level <= path.level:
        raise DomainError(
            f"out_level must be in [1, {path.level}], got {out_level}"
        )
    values = hermite_partial_sums(
        path.increments, path.hurst, path.level, q, out_level
    )
    return HermiteApprox(
        order=q,
        hurst=path.hurst,
        fine_level=path.level,
        out_level=out_level,
        values=values,
        source=path,
    )


def young_integral(
    f: WeightFunction, coarse_values: np.ndarray, z: HermiteApprox
) -> float:
    """Left-endpoint Riemann-Young sum sum_j f(B_(j-1)h) (Z_jh - Z_(j-1)h)."""
    coarse_values = np.asarray(coarse_values, dtype=float)
    if coarse_values.shape != z.values.shape:
        raise GridAlignmentError(
            f"grid mismatch: {len(coarse_values)} path points vs "
            f"{len(z.values)} Z points"
        )
    return math.fsum(f(coarse_values[:-1]) * np.diff(z.values))


def young_integral_rows(
    f: WeightFunction, coarse_values: np.ndarray, z_values: np.ndarray
) -> np.ndarray:
    """Batched Young sums for (replicates, grid) matrices."""
    if coarse_values.shape != z_values.shape:
        raise GridAlignmentError(
            f"grid mismatch: {coarse_values.shape} vs {z_values.shape}"
        )
    return np.sum(f(coarse_values[:, :-1]) * np.diff(z_values, axis=1), axis=1)
