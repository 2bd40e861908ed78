"""Exact arithmetic in real quadratic fields Q(sqrt d)."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Any, Mapping

from .exactlin import to_scalar

__all__ = ["QuadraticNumber", "continued_fraction", "squarefree_part"]


def squarefree_part(d: int) -> tuple[int, int]:
    """Write ``d = k^2 m`` with ``m`` squarefree; return ``(k, m)``."""
    if d <= 0:
        raise ValueError("radicand must be positive")
    k, m = 1, d
    f = 2
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            k *= f
        f += 1
    return k, m


class QuadraticNumber:
    """``a + b*sqrt(d)`` with rational a, b and squarefree d > 1 (or d = 1 with b = 0).

    Numbers from different fields do not mix, except that rationals mix with anything.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Any = 0, b: Any = 0, d: int = 1):
        a, b = to_scalar(a), to_scalar(b)
        d = int(d)
        if d < 1:
            raise ValueError("only real quadratic fields are supported")
        k, m = squarefree_part(d)
        b *= k
        if m == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            m = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", m)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticNumber is immutable")

    # construction -----------------------------------------------------------

    @classmethod
    def coerce(cls, x: Any) -> "QuadraticNumber":
        if isinstance(x, QuadraticNumber):
            return x
        if isinstance(x, str):
            return cls.parse(x)
        if isinstance(x, Mapping):
            return cls.from_json(x)
        return cls(x)

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "QuadraticNumber":
        """``{"p": .., "q": .., "d": .., "r": ..}`` meaning ``(p + q sqrt d) / r``."""
        r = to_scalar(obj.get("r", 1))
        if r == 0:
            raise ValueError("zero denominator")
        return cls(to_scalar(obj.get("p", 0)) / r, to_scalar(obj.get("q", 0)) / r, int(obj.get("d", 1)))

    def to_json(self) -> dict:
        den = math.lcm(self.a.denominator, self.b.denominator)
        return {
            "p": int(self.a * den),
            "q": int(self.b * den),
            "d": self.d,
            "r": den,
        }

    _TERM = re.compile(r"^([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*(?:sqrt\(?(\d+)\)?)?$")

    @classmethod
    def parse(cls, text: str) -> "QuadraticNumber":
        """Parse sums like ``"1+sqrt2"``, ``"-3/2 + 5*sqrt(7)"``, ``"(1+sqrt5)/2"``."""
        s = text.replace(" ", "").replace("√", "sqrt")
        if not s:
            raise ValueError("empty number")
        grouped = re.fullmatch(r"\((.+)\)/(\d+)", s)
        if grouped:
            return cls.parse(grouped.group(1)) / int(grouped.group(2))
        parts = re.findall(r"[+-]?[^+-]+", s)
        if "".join(parts) != s:
            raise ValueError(f"cannot parse {text!r}")
        total = cls(0)
        for p in parts:
            m = cls._TERM.match(p)
            if not m or (m.group(2) is None and m.group(3) is None):
                raise ValueError(f"cannot parse term {p!r} in {text!r}")
            sign = -1 if m.group(1) == "-" else 1
            coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(3):
                total = total + cls(0, sign * coef, int(m.group(3)))
            else:
                total = total + cls(sign * coef)
        return total

    # arithmetic --------------------------------------------------------------

    def _field(self, other: "QuadraticNumber") -> int:
        if self.d == 1:
            return other.d
        if other.d == 1 or other.d == self.d:
            return self.d
        raise ValueError(f"cannot mix Q(sqrt {self.d}) and Q(sqrt {other.d})")

    def __add__(self, other: Any) -> "QuadraticNumber":
        o = QuadraticNumber.coerce(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self) -> "QuadraticNumber":
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other: Any) -> "QuadraticNumber":
        return self + (-QuadraticNumber.coerce(other))

    def __rsub__(self, other: Any) -> "QuadraticNumber":
        return QuadraticNumber.coerce(other) - self

    def __mul__(self, other: Any) -> "QuadraticNumber":
        o = QuadraticNumber.coerce(other)
        d = self._field(o)
        return QuadraticNumber(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other: Any) -> "QuadraticNumber":
        o = QuadraticNumber.coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return self * o.conjugate() * QuadraticNumber(1 / n)

    def __rtruediv__(self, other: Any) -> "QuadraticNumber":
        return QuadraticNumber.coerce(other) / self

    # order --------------------------------------------------------------------

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def __lt__(self, other: Any) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: Any) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: Any) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: Any) -> bool:
        return (self - other).sign() >= 0

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadraticNumber):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.d))

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __floor__(self) -> int:
        n = math.floor(float(self))
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def is_rational(self) -> bool:
        return self.b == 0

    def key(self) -> tuple:
        """Canonical hashable form."""
        return (self.a, self.b, self.d)

    def __repr__(self) -> str:
        if self.b == 0:
            return str(self.a)
        rad = f"sqrt{self.d}"
        b = "" if self.b == 1 else "-" if self.b == -1 else f"{self.b}*"
        if self.a == 0:
            return f"{b}{rad}"
        sep = "" if self.b < 0 else "+"
        return f"{self.a}{sep}{b}{rad}"


def continued_fraction(x: Any, max_terms: int = 10_000) -> tuple[list[int], list[int]]:
    """``(preperiod, period)`` of the regular continued fraction of ``x``.

    Rationals give a finite expansion with an empty period.  For quadratic
    irrationals the period is found by a repeated complete quotient.
    """
    x = QuadraticNumber.coerce(x)
    if x.is_rational():
        terms, q = [], x.a
        while True:
            a = math.floor(q)
            terms.append(a)
            if q == a:
                return terms, []
            q = 1 / (q - a)
    # write x = (P + sqrt D) / Q with integers and Q | D - P^2
    den = math.lcm(x.a.denominator, x.b.denominator)
    p, q, r = int(x.a * den), int(x.b * den), den
    if q < 0:
        p, q, r = -p, -q, -r
    big_d = q * q * x.d
    if (big_d - p * p) % r:
        p, big_d, r = p * abs(r), big_d * r * r, r * abs(r)
    s = math.isqrt(big_d)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    while len(terms) < max_terms:
        if (p, r) in seen:
            start = seen[(p, r)]
            return terms[:start], terms[start:]
        seen[(p, r)] = len(terms)
        a = (p + s) // r if r > 0 else (-p - s - 1) // (-r)
        terms.append(a)
        p = a * r - p
        r = (big_d - p * p) // r
    raise RuntimeError("continued fraction did not become periodic")
