"""Weight functions with exact derivatives of every order.

The experiments only admit weights whose derivatives are available in
closed form (numerical differentiation would contaminate the limit
targets, which involve f'', f^(q), ...).  Five families are provided,
selected by the grammar used on the command line:

    one            constant 1
    poly:c0,c1,... polynomial c0 + c1 x + ...
    cos:a          cos(a x)
    sin:a          sin(a x)
    exp:a          exp(a x), |a| <= 1

Each family also knows its antiderivative vanishing at 0 (used for
closed-form targets of the form integral of f from 0 to B_1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class WeightFunction:
    """Base weight; subclasses implement derivative() and antiderivative()."""

    def __call__(self, x):
        return self.derivative(0, x)

    def derivative(self, order: int, x):
        raise NotImplementedError

    def antiderivative(self, x):
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantOne(WeightFunction):
    def derivative(self, order: int, x):
        x = np.asarray(x, dtype=float)
        return np.ones_like(x) if order == 0 else np.zeros_like(x)

    def antiderivative(self, x):
        return np.asarray(x, dtype=float)

    @property
    def spec(self) -> str:
        return "one"


@dataclass(frozen=True)
class Polynomial(WeightFunction):
    coefficients: tuple[float, ...]

    def derivative(self, order: int, x):
        coeffs = np.asarray(self.coefficients, dtype=float)
        for _ in range(order):
            coeffs = coeffs[1:] * np.arange(1, len(coeffs))
            if len(coeffs) == 0:
                coeffs = np.zeros(1)
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)

    def antiderivative(self, x):
        coeffs = np.concatenate(
            ([0.0], np.asarray(self.coefficients, dtype=float)
             / np.arange(1, len(self.coefficients) + 1))
        )
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)

    @property
    def spec(self) -> str:
        return "poly:" + ",".join(repr(c) for c in self.coefficients)


@dataclass(frozen=True)
class Cosine(WeightFunction):
    frequency: float = 1.0

    def derivative(self, order: int, x):
        a = self.frequency
        return a**order * np.cos(a * np.asarray(x, dtype=float) + order * math.pi / 2)

    def antiderivative(self, x):
        a = self.frequency
        if a == 0.0:
            return np.asarray(x, dtype=float)
        return np.sin(a * np.asarray(x, dtype=float)) / a

    @property
    def spec(self) -> str:
        return f"cos:{self.frequency!r}"


@dataclass(frozen=True)
class Sine(WeightFunction):
    frequency: float = 1.0

    def derivative(self, order: int, x):
        a = self.frequency
        return a**order * np.sin(a * np.asarray(x, dtype=float) + order * math.pi / 2)

    def antiderivative(self, x):
        a = self.frequency
        if a == 0.0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return (1.0 - np.cos(a * np.asarray(x, dtype=float))) / a

    @property
    def spec(self) -> str:
        return f"sin:{self.frequency!r}"


@dataclass(frozen=True)
class Exponential(WeightFunction):
    rate: float = 1.0

    def __post_init__(self) -> None:
        if abs(self.rate) > 1.0:
            raise DomainError(f"exp weight requires |a| <= 1, got {self.rate}")

    def derivative(self, order: int, x):
        a = self.rate
        return a**order * np.exp(a * np.asarray(x, dtype=float))

    def antiderivative(self, x):
        a = self.rate
        if a == 0.0:
            return np.asarray(x, dtype=float)
        return (np.exp(a * np.asarray(x, dtype=float)) - 1.0) / a

    @property
    def spec(self) -> str:
        return f"exp:{self.rate!r}"


def parse_weight(spec: str) -> WeightFunction:
    """Parse the CLI weight grammar: one | poly:c0,c1,... | cos:a | sin:a | exp:a."""
    spec = spec.strip()
    if spec == "one":
        return ConstantOne()
    if ":" not in spec:
        raise DomainError(f"cannot parse weight spec {spec!r}")
    kind, _, args = spec.partition(":")
    try:
        if kind == "poly":
            return Polynomial(tuple(float(c) for c in args.split(",")))
        if kind == "cos":
            return Cosine(float(args))
        if kind == "sin":
            return Sine(float(args))
        if kind == "exp":
            return Exponential(float(args))
    except ValueError as exc:
        raise DomainError(f"cannot parse weight spec {spec!r}: {exc}") from exc
    raise DomainError(f"unknown weight kind {kind!r}")
