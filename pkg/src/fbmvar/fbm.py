"""Exact sampling of fractional Brownian motion on dyadic grids.

A path lives on the grid t_k = k * 2**-n of [0, 1].  The covariance of the
process is

    R_H(t, s) = (s**(2H) + t**(2H) - |t - s|**(2H)) / 2,

so the unit-lag increment autocovariance at level n is

    E[dB_k dB_{k+r}] = 2**(-2Hn) * rho_H(r) / 2,
    rho_H(r) = |r+1|**(2H) + |r-1|**(2H) - 2|r|**(2H).

Two exact samplers are provided:

* ``sample_fbm_circulant`` embeds the increment autocovariance in a
  circulant of length 2**(n+1) and synthesises the stationary Gaussian
  increments through one FFT (Davies-Harte).  Cost O(n 2**n).
* ``sample_fbm_cholesky`` factorises the dense increment covariance;
  it is O(2**(3n)) and capped at n <= 12, and serves as the independent
  oracle for the circulant sampler in tests.

Randomness: each path consumes a fixed number of standard normals from a
Philox stream keyed by (seed, stream); the circulant sampler draws all
2**(n+1) normals in one call and the Cholesky sampler draws 2**n, so
identical (H, n, seed, stream) always give bit-identical paths.
Eigenvalues of the embedded circulant are mathematically non-negative for
fBm increments; values in [-eps, 0) with eps = 1e-9 * max eigenvalue are
clamped to zero with a logged warning and anything below that raises
``CirculantEmbeddingError``.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import IO

import numpy as np

from .errors import CirculantEmbeddingError, DomainError, SizeLimitError
from .rng import stream

logger = logging.getLogger(__name__)

EIG_REL_TOL = 1e-9
CHOLESKY_MAX_LEVEL = 12
CIRCULANT_MAX_LEVEL = 24

_BIN_MAGIC = b"FBM1"


@dataclass(frozen=True)
class FbmPath:
    """One fBm sample on the dyadic grid {k 2**-level}, values[0] == 0."""

    hurst: float
    level: int
    values: np.ndarray
    seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.hurst < 1.0:
            raise DomainError(f"hurst must be in (0,1), got {self.hurst}")
        if self.level < 1:
            raise DomainError(f"level must be >= 1, got {self.level}")
        if len(self.values) != 2**self.level + 1:
            raise DomainError(
                f"values must have 2**level+1 = {2**self.level + 1} entries, "
                f"got {len(self.values)}"
            )
        if self.values[0] != 0.0:
            raise DomainError("values[0] must be exactly 0")

    @property
    def times(self) -> np.ndarray:
        return np.arange(2**self.level + 1) * 2.0**-self.level

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def _check_h(hurst: float) -> None:
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"hurst must be in (0,1), got {hurst}")


def fbm_covariance(t: float, s: float, hurst: float) -> float:
    """Covariance R_H(t, s) of fBm on [0, 1]."""
    _check_h(hurst)
    if not (0.0 <= t <= 1.0 and 0.0 <= s <= 1.0):
        raise DomainError(f"t, s must lie in [0,1], got t={t}, s={s}")
    h2 = 2.0 * hurst
    return 0.5 * (abs(s) ** h2 + abs(t) ** h2 - abs(t - s) ** h2)


def rho(r, hurst: float):
    """Increment autocovariance kernel rho_H(r), vectorised over the lag.

    rho_H(0) = 2 for every H, and rho_H vanishes at nonzero lags for
    H = 1/2.  For large |r| it behaves as 2H(2H-1) |r|**(2H-2).
    """
    _check_h(hurst)
    r = np.abs(np.asarray(r, dtype=float))
    h2 = 2.0 * hurst
    out = (r + 1.0) ** h2 + np.abs(r - 1.0) ** h2 - 2.0 * r**h2
    if out.ndim == 0:
        return float(out)
    return out


def increment_autocovariance(hurst: float, level: int, lags) -> np.ndarray:
    """E[dB_k dB_{k+r}] at the given level: 2**(-2Hn) rho_H(r) / 2."""
    return 0.5 * 2.0 ** (-2.0 * hurst * level) * rho(lags, hurst)


@lru_cache(maxsize=64)
def _circulant_sqrt_eigs(hurst: float, level: int) -> np.ndarray:
    """sqrt of the eigenvalues of the length-2**(n+1) embedded circulant."""
    n_inc = 2**level
    m = 2 * n_inc
    row = np.empty(m)
    cov = increment_autocovariance(hurst, level, np.arange(n_inc + 1))
    row[: n_inc + 1] = cov
    row[n_inc + 1 :] = cov[1:n_inc][::-1]
    lam = np.fft.fft(row).real
    floor = -EIG_REL_TOL * lam.max()
    if lam.min() < floor:
        raise CirculantEmbeddingError(
            f"circulant eigenvalue {lam.min():.3e} below tolerance {floor:.3e} "
            f"for H={hurst}, n={level}"
        )
    if lam.min() < 0.0:
        logger.warning(
            "clamping %d tiny negative circulant eigenvalues (min %.3e) "
            "for H=%s, n=%d",
            int((lam < 0).sum()),
            lam.min(),
            hurst,
            level,
        )
        lam = np.maximum(lam, 0.0)
    return np.sqrt(lam)


def _increments_from_normals(sq: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Synthesise stationary increments from one row (or matrix) of normals.

    Draw order for a path at level n (m = 2**(n+1) normals): z[0] feeds
    frequency 0, z[1] feeds frequency m/2, and the pair (z[2k], z[2k+1])
    feeds frequency k for k = 1 .. m/2 - 1.
    """
    z = np.atleast_2d(z)
    b, m = z.shape
    half = m // 2
    spec = np.zeros((b, m), dtype=complex)
    spec[:, 0] = sq[0] * z[:, 0]
    spec[:, half] = sq[half] * z[:, 1]
    k = np.arange(1, half)
    w = (z[:, 2 * k] + 1j * z[:, 2 * k + 1]) * (sq[k] / np.sqrt(2.0))
    spec[:, 1:half] = w
    spec[:, half + 1 :] = np.conj(w[:, ::-1])
    x = np.fft.fft(spec, axis=1).real / np.sqrt(m)
    return x[:, :half]


def sample_fbm_circulant(
    hurst: float, level: int, seed: int, stream_index: int = 0
) -> FbmPath:
    """Exact fBm sample at `level` via circulant embedding of the increments."""
    _check_h(hurst)
    if not 1 <= level <= CIRCULANT_MAX_LEVEL:
        raise SizeLimitError(
            f"level must be in [1, {CIRCULANT_MAX_LEVEL}], got {level}"
        )
    inc = sample_increments_circulant(hurst, level, seed, stream_index, 1)[0]
    values = np.concatenate(([0.0], np.cumsum(inc)))
    return FbmPath(hurst, level, values, seed, stream_index)


def sample_increments_circulant(
    hurst: float, level: int, seed: int, first_stream: int, count: int
) -> np.ndarray:
    """Increment rows for streams first_stream .. first_stream+count-1.

    Row i is bit-identical to the increments of
    ``sample_fbm_circulant(hurst, level, seed, first_stream + i)``.
    """
    sq = _circulant_sqrt_eigs(hurst, level)
    m = 2 ** (level + 1)
    z = np.empty((count, m))
    for i in range(count):
        z[i] = stream(seed, first_stream + i).standard_normal(m)
    return _increments_from_normals(sq, z)


def sample_fbm_cholesky(
    hurst: float, level: int, seed: int, stream_index: int = 0
) -> FbmPath:
    """Exact fBm sample through a dense Cholesky factor of the increments.

    Same law as the circulant sampler (used as its oracle in tests); the
    O(2**(3n)) factorisation caps the level at 12.  The path consumes the
    first 2**n normals of the (seed, stream) Philox stream.
    """
    _check_h(hurst)
    if not 1 <= level <= CHOLESKY_MAX_LEVEL:
        raise SizeLimitError(
            f"cholesky sampler requires level <= {CHOLESKY_MAX_LEVEL}, got {level}"
        )
    chol = _cholesky_factor(hurst, level)
    z = stream(seed, stream_index).standard_normal(2**level)
    inc = chol @ z
    values = np.concatenate(([0.0], np.cumsum(inc)))
    return FbmPath(hurst, level, values, seed, stream_index)


@lru_cache(maxsize=16)
def _cholesky_factor(hurst: float, level: int) -> np.ndarray:
    n_inc = 2**level
    lag = np.abs(np.subtract.outer(np.arange(n_inc), np.arange(n_inc)))
    cov = increment_autocovariance(hurst, level, lag)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - should not occur
        raise CirculantEmbeddingError(
            f"increment covariance not positive definite for H={hurst}, n={level}"
        ) from exc


def coarsen(path: FbmPath, level: int) -> FbmPath:
    """Restriction of a path to a coarser dyadic grid (still exact fBm)."""
    if level > path.level or level < 1:
        raise DomainError(f"target level must be in [1, {path.level}]")
    step = 2 ** (path.level - level)
    return FbmPath(path.hurst, level, path.values[::step], path.seed, path.stream_index)


def write_csv(path: FbmPath, fh: IO[str]) -> None:
    """Write `k,t,B` rows in full precision."""
    fh.write("k,t,B\n")
    for k, (t, v) in enumerate(zip(path.times, path.values)):
        fh.write(f"{k},{float(t)!r},{float(v)!r}\n")


def write_binary(path: FbmPath, fh: IO[bytes]) -> None:
    """Binary layout: magic 'FBM1', H float64, n int32, seed uint64, values."""
    fh.write(_BIN_MAGIC)
    fh.write(struct.pack("<d", path.hurst))
    fh.write(struct.pack("<i", path.level))
    fh.write(struct.pack("<Q", path.seed & ((1 << 64) - 1)))
    fh.write(np.ascontiguousarray(path.values, dtype="<f8").tobytes())


def read_binary(fh: IO[bytes]) -> FbmPath:
    magic = fh.read(4)
    if magic != _BIN_MAGIC:
        raise DomainError(f"bad magic {magic!r}, expected {_BIN_MAGIC!r}")
    hurst = struct.unpack("<d", fh.read(8))[0]
    level = struct.unpack("<i", fh.read(4))[0]
    seed = struct.unpack("<Q", fh.read(8))[0]
    raw = fh.read(8 * (2**level + 1))
    values = np.frombuffer(raw, dtype="<f8").copy()
    return FbmPath(hurst, level, values, seed)
