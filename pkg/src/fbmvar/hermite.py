"""Hermite polynomial algebra, Gaussian moments, monomial expansions.

Normalisation convention (used everywhere in this package): H_q is the
probabilists' Hermite polynomial divided by q!, i.e.

    H_q(x) = ((-1)**q / q!) * exp(x**2/2) * d^q/dx^q exp(-x**2/2),

so H_0 = 1, H_1(x) = x, H_2(x) = (x**2 - 1)/2, H_3(x) = (x**3 - 3x)/6 and

    (q+1) H_{q+1}(x) = x H_q(x) - H_{q-1}(x).

Under this convention, for jointly standard Gaussian (X, Y) with
correlation c, E[H_p(X) H_q(Y)] = 0 for p != q and c**q / q! for p == q.
Evaluation goes through the recurrence (stable upward for the degrees and
arguments used here); no coefficient expansion is performed at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def hermite_eval(q: int, x):
    """Evaluate H_q (probabilists' Hermite / q!) at scalar or array x."""
    if q < 0:
        raise DomainError(f"degree must be >= 0, got {q}")
    scalar = np.isscalar(x)
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if q == 0:
        return float(prev) if scalar else prev
    cur = x.copy()
    for k in range(1, q):
        prev, cur = cur, (x * cur - prev) / (k + 1)
    return float(cur) if scalar else cur


def gaussian_moment(q: int) -> float:
    """q-th moment of a standard Gaussian: (q-1)!! for even q, 0 for odd."""
    if q < 0:
        raise DomainError(f"order must be >= 0, got {q}")
    if q % 2 == 1:
        return 0.0
    return float(_double_factorial_odd(q - 1))


def _double_factorial_odd(k: int) -> int:
    # (q-1)!! for even q, as an exact integer; (-1)!! == 1
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass(frozen=True)
class HermiteCoefficients:
    """Expansion x**degree = sum_p coeffs[p] * H_p(x).

    The coefficients p! * C(degree, p) * mu_{degree-p} are exact integers
    for every degree (mu is a double factorial), so they are stored as
    Python ints with no precision loss.
    """

    degree: int
    coeffs: tuple[int, ...]

    def as_dict(self) -> dict[int, int]:
        return {p: c for p, c in enumerate(self.coeffs) if c != 0}

    def evaluate(self, x):
        """Reconstruct x**degree from the Hermite basis (for testing)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for p, c in enumerate(self.coeffs):
            if c:
                out = out + c * hermite_eval(p, x)
        return out


def monomial_in_hermite(m: int) -> HermiteCoefficients:
    """Expand x**m in the basis {H_0, ..., H_m}.

    The p-th coefficient is p! * C(m, p) * mu_{m-p}; it vanishes when p
    and m have different parity, the leading coefficient is m!, and the
    H_0 coefficient equals mu_m (so x**m - mu_m has no constant part).
    """
    if m < 1:
        raise DomainError(f"monomial degree must be >= 1, got {m}")
    coeffs = []
    for p in range(m + 1):
        if (m - p) % 2 == 1:
            coeffs.append(0)
        else:
            coeffs.append(
                math.factorial(p)
                * math.comb(m, p)
                * _double_factorial_odd(m - p - 1)
            )
    return HermiteCoefficients(degree=m, coeffs=tuple(coeffs))
