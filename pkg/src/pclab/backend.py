"""Numeric backends.

Two backends are supported:

* ``rational`` -- exact arithmetic with :class:`gmpy2.mpq`. Equality and
  order are exact and arithmetic never rounds.
* ``float`` -- IEEE doubles where two scalars are identified when they differ
  by at most ``eps`` (``1e-12`` by default).

All comparisons that feed endpoint-flag logic go through a :class:`Backend`
so the tolerance is applied in exactly one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational, Real
from typing import Union

from gmpy2 import mpq

from .errors import ValidationError

Scalar = Union[float, Fraction, "mpq"]

_MPQ = type(mpq(0))


@dataclass(frozen=True)
class Backend:
    """Arithmetic policy for coordinates, endpoints and map coefficients."""

    name: str
    eps: float = 0.0

    @property
    def exact(self) -> bool:
        return self.name == "rational"

    def __call__(self, value) -> Scalar:
        """Coerce ``value`` (number or string such as ``"3/10"``) to a scalar."""
        if self.exact:
            if isinstance(value, _MPQ):
                return value
            if isinstance(value, bool):
                raise ValidationError(f"not a number: {value!r}")
            if isinstance(value, Integral):
                return mpq(int(value))
            if isinstance(value, Rational):
                return mpq(int(value.numerator), int(value.denominator))
            if isinstance(value, float):
                if not math.isfinite(value):
                    raise ValidationError(f"non-finite scalar {value!r}")
                # decimal reading, so 0.3 means 3/10 rather than its binary expansion
                return mpq(repr(value))
            if isinstance(value, str):
                try:
                    return mpq(value.strip())
                except ValueError as exc:
                    raise ValidationError(f"cannot parse scalar {value!r}") from exc
            raise ValidationError(f"cannot coerce {value!r} to a rational scalar")
        if isinstance(value, str):
            try:
                out = float(Fraction(value.strip()))
            except ValueError as exc:
                raise ValidationError(f"cannot parse scalar {value!r}") from exc
        elif isinstance(value, Real):
            out = float(value)
        else:
            raise ValidationError(f"cannot coerce {value!r} to a float scalar")
        if not math.isfinite(out):
            raise ValidationError(f"non-finite scalar {value!r}")
        return out

    def cmp(self, a, b) -> int:
        d = a - b
        if self.eps and abs(d) <= self.eps:
            return 0
        return (d > 0) - (d < 0)

    def eq(self, a, b) -> bool:
        return self.cmp(a, b) == 0

    def lt(self, a, b) -> bool:
        return self.cmp(a, b) < 0

    def le(self, a, b) -> bool:
        return self.cmp(a, b) <= 0

    def format(self, value) -> str:
        """Render a scalar as a fraction string (exact) or a decimal."""
        if self.exact:
            q = mpq(value)
            if q.denominator == 1:
                return str(q.numerator)
            return f"{q.numerator}/{q.denominator}"
        return repr(float(value))

    def midpoint(self, a, b):
        return (a + b) / 2


RATIONAL = Backend("rational")
FLOAT = Backend("float", eps=1e-12)


def get_backend(name: str | Backend, eps: float | None = None) -> Backend:
    if isinstance(name, Backend):
        return name
    if name == "rational":
        return RATIONAL
    if name == "float":
        return FLOAT if eps is None else Backend("float", eps=eps)
    raise ValidationError(f"unknown backend {name!r}; expected 'rational' or 'float'")


def format_scalar(value) -> str:
    """Format without knowing the backend: exact types as fractions, floats as decimals."""
    if isinstance(value, float):
        return repr(value)
    return RATIONAL.format(value)
