"""Exact arithmetic on products of rational powers.

Quantities such as ``n**v * p**e`` with ``p = c * n**(-a/b)`` are products of
rational bases raised to rational exponents.  :class:`PowerProduct` keeps
them in that form so that ordering decisions never depend on rounding.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from fractions import Fraction
from numbers import Rational

__all__ = ["PowerProduct", "as_fraction"]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and decimal strings (``"1/3"``, ``"0.25"``) exactly.

    Floats are converted through their shortest decimal repr so that ``0.1``
    becomes ``1/10`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def _log_fraction(q: Fraction) -> float:
    # math.log accepts arbitrarily large ints, Fraction -> float may overflow
    return math.log(q.numerator) - math.log(q.denominator)


class PowerProduct:
    """A positive real ``prod(base ** exponent)`` with rational bases and exponents.

    Equality and ordering are exact: the ratio of two values is raised to the
    common denominator of its exponents and compared with 1 in integer
    arithmetic.  A floating-point pre-check settles comparisons that are not
    close, so the big-integer path runs only for genuine near-ties.
    """

    __slots__ = ("_factors",)

    def __init__(self, factors: Mapping | Iterable = ()):
        items = factors.items() if isinstance(factors, Mapping) else factors
        merged: dict[Fraction, Fraction] = {}
        for base, exponent in items:
            base = as_fraction(base)
            exponent = as_fraction(exponent)
            if base <= 0:
                raise ValueError(f"bases must be positive, got {base}")
            if base == 1 or exponent == 0:
                continue
            merged[base] = merged.get(base, Fraction(0)) + exponent
        self._factors = tuple(sorted((b, e) for b, e in merged.items() if e != 0))

    @classmethod
    def of(cls, value, exponent=1) -> PowerProduct:
        """``value ** exponent`` for a positive rational ``value``."""
        return cls([(value, exponent)])

    @property
    def factors(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return self._factors

    def _coerce(self, other) -> PowerProduct:
        if isinstance(other, PowerProduct):
            return other
        return PowerProduct.of(other)

    def __mul__(self, other) -> PowerProduct:
        other = self._coerce(other)
        return PowerProduct(self._factors + other._factors)

    __rmul__ = __mul__

    def __truediv__(self, other) -> PowerProduct:
        other = self._coerce(other)
        return PowerProduct(self._factors + tuple((b, -e) for b, e in other._factors))

    def __rtruediv__(self, other) -> PowerProduct:
        return self._coerce(other) / self

    def __pow__(self, exponent) -> PowerProduct:
        exponent = as_fraction(exponent)
        return PowerProduct((b, e * exponent) for b, e in self._factors)

    def log(self) -> float:
        """Natural logarithm as a float (for reporting only)."""
        return math.fsum(float(e) * _log_fraction(b) for b, e in self._factors)

    def __float__(self) -> float:
        return math.exp(self.log())

    def _sign_of_log(self) -> int:
        """Sign of ``log(self)``: -1, 0 or +1, decided exactly."""
        if not self._factors:
            return 0
        terms = [float(e) * _log_fraction(b) for b, e in self._factors]
        approx = math.fsum(terms)
        margin = 1e-9 * (1.0 + sum(abs(t) for t in terms))
        if approx > margin:
            return 1
        if approx < -margin:
            return -1
        denom = math.lcm(*(e.denominator for _, e in self._factors))
        num, den = 1, 1
        for base, exponent in self._factors:
            power = int(exponent * denom)
            if power > 0:
                num *= base ** power
            else:
                den *= base ** (-power)
        value = Fraction(num) / Fraction(den)
        return (value > 1) - (value < 1)

    def compare(self, other) -> int:
        """-1, 0 or +1 as ``self`` is below, equal to or above ``other``."""
        return (self / self._coerce(other))._sign_of_log()

    def __eq__(self, other):
        try:
            return self.compare(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    __hash__ = None

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __repr__(self):
        if not self._factors:
            return "PowerProduct(1)"
        body = " * ".join(f"({b})**({e})" for b, e in self._factors)
        return f"PowerProduct({body})"
