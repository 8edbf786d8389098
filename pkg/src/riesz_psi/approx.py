"""Complex values carrying an absolute error bound.

``ApproxComplex`` is the currency of every analytic evaluation in the
package. Arithmetic propagates the bound with first-order interval rules,
and the ``rigorous`` flag is the logical AND of the operands' flags.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

EPS = 2.0**-53


@dataclass(frozen=True)
class ApproxComplex:
    value: complex
    err: float = 0.0
    rigorous: bool = True

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        err = float(self.err)
        if not math.isfinite(err) or err < 0:
            raise ValueError(f"error bound must be finite and non-negative, got {err!r}")
        object.__setattr__(self, "err", err)

    @classmethod
    def exact(cls, value) -> "ApproxComplex":
        return cls(complex(value), 0.0, True)

    @staticmethod
    def _coerce(other):
        if isinstance(other, ApproxComplex):
            return other
        return ApproxComplex(complex(other), 0.0, True)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __abs__(self) -> float:
        return abs(self.value)

    def conjugate(self) -> "ApproxComplex":
        return ApproxComplex(self.value.conjugate(), self.err, self.rigorous)

    def __neg__(self):
        return ApproxComplex(-self.value, self.err, self.rigorous)

    def __add__(self, other):
        o = self._coerce(other)
        v = self.value + o.value
        return ApproxComplex(v, self.err + o.err + EPS * abs(v), self.rigorous and o.rigorous)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        v = self.value * o.value
        err = (abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err
               + 2 * EPS * abs(v))
        return ApproxComplex(v, err, self.rigorous and o.rigorous)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        denom = abs(o.value) - o.err
        if denom <= 0:
            raise ZeroDivisionError("divisor interval contains zero")
        v = self.value / o.value
        err = (self.err + abs(v) * o.err) / denom + 2 * EPS * abs(v)
        return ApproxComplex(v, err, self.rigorous and o.rigorous)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def contains(self, z, slack: float = 0.0) -> bool:
        return abs(complex(z) - self.value) <= self.err + slack

    def __repr__(self):
        tag = "" if self.rigorous else ", heuristic"
        return f"ApproxComplex({self.value!r} ± {self.err:.3g}{tag})"


def agree(a: ApproxComplex, b: ApproxComplex, slack: float = 0.0) -> bool:
    """True when the two enclosures overlap."""
    return abs(a.value - b.value) <= a.err + b.err + slack


@dataclass(frozen=True)
class ApproxReal:
    """Real value with an absolute error bound."""

    value: float
    err: float = 0.0
    rigorous: bool = True

    def __float__(self):
        return float(self.value)

    def contains(self, x, slack: float = 0.0) -> bool:
        return abs(float(x) - self.value) <= self.err + slack
