"""First-order jets over the four coordinates x1..x4.

A :class:`Jet` carries a value together with its four first partial
derivatives, and arithmetic on jets propagates the derivatives exactly
(forward-mode differentiation with dual numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

DIM = 4

_ZERO = (0.0, 0.0, 0.0, 0.0)


def _check(value: float, grad: tuple[float, ...], what: str) -> "Jet":
    if not math.isfinite(value) or not all(math.isfinite(g) for g in grad):
        raise DomainError(f"non-finite result in {what}")
    return Jet(value, grad)


@dataclass(frozen=True)
class Jet:
    """Value and gradient ``(d/dx1, ..., d/dx4)`` at a point."""

    value: float
    grad: tuple[float, float, float, float] = _ZERO

    @classmethod
    def constant(cls, value: float) -> "Jet":
        return cls(float(value), _ZERO)

    @classmethod
    def variable(cls, index: int, value: float) -> "Jet":
        """Seed jet for coordinate ``x{index}`` (1-based)."""
        grad = [0.0] * DIM
        grad[index - 1] = 1.0
        return cls(float(value), tuple(grad))

    @property
    def is_constant(self) -> bool:
        return all(g == 0.0 for g in self.grad)

    def partial(self, index: int) -> float:
        """Partial derivative with respect to ``x{index}`` (1-based)."""
        return self.grad[index - 1]

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.value + other.value,
                   tuple(a + b for a, b in zip(self.grad, other.grad)))

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(self.value - other.value,
                   tuple(a - b for a, b in zip(self.grad, other.grad)))

    def __neg__(self) -> "Jet":
        return Jet(-self.value, tuple(-g for g in self.grad))

    def __mul__(self, other: "Jet") -> "Jet":
        u, v = self.value, other.value
        return _check(u * v,
                      tuple(u * b + v * a for a, b in zip(self.grad, other.grad)),
                      "multiplication")

    def __truediv__(self, other: "Jet") -> "Jet":
        v = other.value
        if v == 0.0:
            raise DomainError("division by zero")
        q = self.value / v
        return _check(q, tuple((a - q * b) / v for a, b in zip(self.grad, other.grad)),
                      "division")

    def scale(self, factor: float) -> "Jet":
        return Jet(self.value * factor, tuple(g * factor for g in self.grad))

    def chain(self, value: float, slope: float, what: str) -> "Jet":
        """Apply a unary function with the given value and derivative at self."""
        return _check(value, tuple(slope * g for g in self.grad), what)

    def ipow(self, n: int) -> "Jet":
        """Integer power by binary exponentiation (products only)."""
        if n < 0:
            return Jet.constant(1.0) / self.ipow(-n)
        result = Jet.constant(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result


def exp(x: Jet) -> Jet:
    try:
        e = math.exp(x.value)
    except OverflowError:
        raise DomainError(f"exp overflow at {x.value!r}") from None
    return x.chain(e, e, "exp")


def ln(x: Jet) -> Jet:
    if x.value <= 0.0:
        raise DomainError(f"ln of non-positive value {x.value!r}")
    return x.chain(math.log(x.value), 1.0 / x.value, "ln")


def sqrt(x: Jet) -> Jet:
    if x.value < 0.0:
        raise DomainError(f"sqrt of negative value {x.value!r}")
    r = math.sqrt(x.value)
    if r == 0.0:
        if x.is_constant:
            return Jet.constant(0.0)
        raise DomainError("sqrt is not differentiable at 0")
    return x.chain(r, 0.5 / r, "sqrt")


def sinh(x: Jet) -> Jet:
    try:
        return x.chain(math.sinh(x.value), math.cosh(x.value), "sinh")
    except OverflowError:
        raise DomainError(f"sinh overflow at {x.value!r}") from None


def cosh(x: Jet) -> Jet:
    try:
        return x.chain(math.cosh(x.value), math.sinh(x.value), "cosh")
    except OverflowError:
        raise DomainError(f"cosh overflow at {x.value!r}") from None
