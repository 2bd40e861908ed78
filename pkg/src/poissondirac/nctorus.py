"""Quantum tori and the SO(n,n|Z) fractional action on skew matrices.

Twisted product on finitely supported functions on Z^n::

    (f * g)(m) = sum_k f(k) g(m - k) exp(pi i hbar k^T pi (m - k))

so that with ``u_j = delta_{e_j}`` and hbar = 1 one has
``u_j * u_k = exp(2 pi i pi_jk) u_k * u_j``.

Generators of SO(n,n|Z) used for orbit search, as 2n x 2n block matrices
``[[A, B], [C, D]]`` acting by ``pi -> (A pi + B)(C pi + D)^-1``:

* ``rho(R) = [[R, 0], [0, R^-T]]`` for ``R`` in ``{1 + E_ij, 1 - E_ij (i != j), diag(-1, 1, ..)}``;
  acts as ``pi -> R pi R^T``.
* ``nu(+-ij) = [[1, +-(E_ij - E_ji)], [0, 1]]``; acts as ``pi -> pi +- (E_ij - E_ji)``.
* ``sigma(kl) = [[1 - P, P], [P, 1 - P]]`` with ``P = E_kk + E_ll``; a partial
  inversion on the coordinate pair ``(k, l)``.

For n = 2 and ``pi = [[0, t], [-t, 0]]`` these give ``t -> -t``, ``t -> t +- 1``
and ``t -> -1/t``, which generate the GL(2,Z) Moebius action.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .exactlin import InvariantViolation, Matrix, inverse
from .quadratic import QuadraticNumber, continued_fraction

__all__ = [
    "SkewParam",
    "TorusElement",
    "SOnnMatrix",
    "RelationReport",
    "OrbitResult",
    "Decision",
    "twisted_product",
    "generator_relation_check",
    "sonn_check",
    "fractional_action",
    "generators",
    "orbit_bfs",
    "replay",
    "n2_decide",
]

Lattice = tuple[int, ...]


# ---------------------------------------------------------------------------
# deformation parameters


@dataclass(frozen=True, eq=False)
class SkewParam:
    """Skew n x n matrix with exact quadratic-irrational entries, or floats with a tolerance."""

    n: int
    entries: tuple[tuple[Any, ...], ...]
    tol: float | None = None

    def __post_init__(self):
        rows = [list(r) for r in self.entries]
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise ValueError("entries must be n x n")
        if self.tol is None:
            rows = [[_exact(v) for v in r] for r in rows]
            fields = {v.d for r in rows for v in r if not v.is_rational()}
            if len(fields) > 1:
                raise ValueError(f"entries come from several quadratic fields: {sorted(fields)}")
            skew = all(rows[i][j] == -rows[j][i] for i in range(self.n) for j in range(self.n))
        else:
            if self.tol <= 0:
                raise ValueError("tolerance must be positive")
            if any(isinstance(v, (QuadraticNumber, Fraction, str)) for r in rows for v in r):
                raise ValueError("exact and floating entries cannot be mixed")
            rows = [[float(v) for v in r] for r in rows]
            skew = all(abs(rows[i][j] + rows[j][i]) <= self.tol for i in range(self.n) for j in range(self.n))
        if not skew:
            raise ValueError("parameter matrix is not skew-symmetric")
        object.__setattr__(self, "entries", tuple(tuple(r) for r in rows))

    @property
    def exact(self) -> bool:
        return self.tol is None

    @classmethod
    def from_theta(cls, theta: Any, tol: float | None = None) -> "SkewParam":
        """The n = 2 matrix ``[[0, theta], [-theta, 0]]``."""
        if tol is None:
            t = _exact(theta)
            return cls(2, ((QuadraticNumber(0), t), (-t, QuadraticNumber(0))))
        return cls(2, ((0.0, float(theta)), (-float(theta), 0.0)), tol)

    @classmethod
    def from_upper(cls, n: int, upper: Mapping[tuple[int, int], Any], tol: float | None = None) -> "SkewParam":
        zero = 0.0 if tol is not None else QuadraticNumber(0)
        rows = [[zero] * n for _ in range(n)]
        for (i, j), v in upper.items():
            v = float(v) if tol is not None else _exact(v)
            rows[i][j], rows[j][i] = v, -v
        return cls(n, tuple(tuple(r) for r in rows), tol)

    def theta(self) -> Any:
        if self.n != 2:
            raise ValueError("theta is defined for n = 2 only")
        return self.entries[0][1]

    def as_float(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.entries])

    def key(self) -> tuple:
        """Canonical key: exact entries, or floats rounded at tol / 10."""
        if self.exact:
            return tuple(v.key() for r in self.entries for v in r)
        step = self.tol / 10
        return tuple(round(v / step) for r in self.entries for v in r)

    def same_as(self, other: "SkewParam") -> bool:
        if self.n != other.n or self.exact != other.exact:
            return False
        if self.exact:
            return self.entries == other.entries
        tol = max(self.tol, other.tol)
        return bool(np.max(np.abs(self.as_float() - other.as_float()), initial=0.0) <= tol)

    def to_json(self) -> dict:
        if self.exact:
            return {"n": self.n, "entries": [[v.to_json() for v in r] for r in self.entries]}
        return {"n": self.n, "entries": [list(r) for r in self.entries], "tol": self.tol}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "SkewParam":
        entries = obj["entries"]
        tol = obj.get("tol")
        floats = any(isinstance(v, float) for r in entries for v in r)
        if floats and tol is None:
            raise ValueError("floating entries need a tolerance 'tol'")
        if tol is not None:
            return cls(int(obj["n"]), tuple(tuple(float(v) for v in r) for r in entries), float(tol))
        return cls(int(obj["n"]), tuple(tuple(_exact(v) for v in r) for r in entries))

    def __repr__(self) -> str:
        return f"SkewParam({[list(r) for r in self.entries]}{'' if self.exact else f', tol={self.tol}'})"


def _exact(v: Any) -> QuadraticNumber:
    if isinstance(v, float):
        raise ValueError("floating value in an exact parameter")
    return QuadraticNumber.coerce(v)


# ---------------------------------------------------------------------------
# twisted convolution


@dataclass(frozen=True)
class TorusElement:
    """Finitely supported complex function on Z^n."""

    n: int
    coeffs: Mapping[Lattice, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.coeffs.items():
            k = tuple(int(c) for c in k)
            if len(k) != self.n:
                raise ValueError("lattice point of the wrong dimension")
            if v != 0:
                clean[k] = complex(v)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def delta(cls, point: Sequence[int]) -> "TorusElement":
        return cls(len(point), {tuple(point): 1.0})

    @classmethod
    def unit(cls, n: int) -> "TorusElement":
        return cls.delta((0,) * n)

    @classmethod
    def generator(cls, n: int, j: int, power: int = 1) -> "TorusElement":
        e = [0] * n
        e[j] = power
        return cls.delta(e)

    def support(self) -> set[Lattice]:
        return set(self.coeffs)

    def __add__(self, other: "TorusElement") -> "TorusElement":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return TorusElement(self.n, out)

    def scale(self, c: complex) -> "TorusElement":
        return TorusElement(self.n, {k: c * v for k, v in self.coeffs.items()})

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return self + other.scale(-1)

    def sup_norm(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": [{"k": list(k), "re": v.real, "im": v.imag} for k, v in self.coeffs.items()]}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "TorusElement":
        return cls(int(obj["n"]), {tuple(c["k"]): complex(c.get("re", 0.0), c.get("im", 0.0)) for c in obj["coeffs"]})


def twisted_product(f: TorusElement, g: TorusElement, pi: SkewParam, hbar: float = 1.0) -> TorusElement:
    if not f.n == g.n == pi.n:
        raise ValueError("dimension mismatch")
    p = pi.as_float()
    out: dict[Lattice, complex] = {}
    for k, a in f.coeffs.items():
        pk = np.asarray(k) @ p
        for l, b in g.coeffs.items():
            m = tuple(x + y for x, y in zip(k, l))
            out[m] = out.get(m, 0) + a * b * cmath.exp(1j * math.pi * hbar * float(pk @ np.asarray(l)))
    return TorusElement(f.n, out)


@dataclass(frozen=True)
class RelationReport:
    max_deviation: float
    passed: bool
    worst: tuple[str, int, int]


def generator_relation_check(pi: SkewParam, tol: float = 1e-12) -> RelationReport:
    """Check ``u_j u_k = e^{2 pi i pi_jk} u_k u_j`` and unitarity of every ``u_j`` at hbar = 1."""
    n = pi.n
    p = pi.as_float()
    one = TorusElement.unit(n)
    worst = (0.0, ("commutation", 0, 0))
    for j in range(n):
        uj, uj_bar = TorusElement.generator(n, j), TorusElement.generator(n, j, -1)
        for what, val in (
            ("unitarity", twisted_product(uj, uj_bar, pi) - one),
            ("unitarity", twisted_product(uj_bar, uj, pi) - one),
        ):
            worst = max(worst, (val.sup_norm(), (what, j, j)))
        for k in range(n):
            uk = TorusElement.generator(n, k)
            lhs = twisted_product(uj, uk, pi)
            rhs = twisted_product(uk, uj, pi).scale(cmath.exp(2j * math.pi * p[j, k]))
            worst = max(worst, ((lhs - rhs).sup_norm(), ("commutation", j, k)))
    return RelationReport(worst[0], worst[0] < tol, worst[1])


# ---------------------------------------------------------------------------
# SO(n, n | Z)


@dataclass(frozen=True)
class SOnnMatrix:
    """Integer block matrix ``[[A, B], [C, D]]``; membership is checked by :func:`sonn_check`."""

    n: int
    a: Matrix
    b: Matrix
    c: Matrix
    d: Matrix
    name: str = ""

    def __post_init__(self):
        for blk in (self.a, self.b, self.c, self.d):
            if (blk.rows, blk.cols) != (self.n, self.n):
                raise ValueError("blocks must be n x n")

    @classmethod
    def from_full(cls, m: Matrix, name: str = "") -> "SOnnMatrix":
        if m.rows != m.cols or m.rows % 2:
            raise ValueError("full matrix must be 2n x 2n")
        n = m.rows // 2
        rows = m.tolist()
        blk = lambda r, c: Matrix.from_rows([row[c : c + n] for row in rows[r : r + n]], n)  # noqa: E731
        return cls(n, blk(0, 0), blk(0, n), blk(n, 0), blk(n, n), name)

    def full(self) -> Matrix:
        top = [ra + rb for ra, rb in zip(self.a.tolist(), self.b.tolist())]
        bottom = [rc + rd for rc, rd in zip(self.c.tolist(), self.d.tolist())]
        return Matrix.from_rows(top + bottom, 2 * self.n)

    def __matmul__(self, other: "SOnnMatrix") -> "SOnnMatrix":
        name = f"{self.name}*{other.name}" if self.name and other.name else ""
        return SOnnMatrix.from_full(self.full() @ other.full(), name)

    def to_json(self) -> dict:
        return {"n": self.n, "A": self.a.to_json(), "B": self.b.to_json(), "C": self.c.to_json(), "D": self.d.to_json()}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "SOnnMatrix":
        n = int(obj["n"])
        get = lambda k: Matrix.from_json(obj[k]) if isinstance(obj[k], Mapping) else Matrix.from_rows(obj[k], n)  # noqa: E731
        return cls(n, get("A"), get("B"), get("C"), get("D"))


def sonn_check(m: SOnnMatrix) -> bool:
    return _blocks_in_sonn(m.n, m.a, m.b, m.c, m.d)


@functools.lru_cache(maxsize=8192)
def _blocks_in_sonn(n: int, a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> bool:
    if any(v.denominator != 1 for blk in (a, b, c, d) for v in blk.entries):
        return False
    zero, one = Matrix.zeros(n, n), Matrix.identity(n)
    if a.T @ c + c.T @ a != zero or b.T @ d + d.T @ b != zero:
        return False
    if a.T @ d + c.T @ b != one:
        return False
    return SOnnMatrix(n, a, b, c, d).full().det() == 1


def _generic_matmul(x: list[list[Any]], y: list[list[Any]]) -> list[list[Any]]:
    return [[sum((x[i][k] * y[k][j] for k in range(len(y))), 0 * x[0][0]) for j in range(len(y[0]))] for i in range(len(x))]


def _integer_affine(m: Matrix, x: list[list[Any]], shift: Matrix) -> list[list[QuadraticNumber]]:
    """``m @ x + shift`` for integer ``m``; the blocks are sparse, so zero coefficients are skipped."""
    out = []
    for i in range(m.rows):
        row = [QuadraticNumber(v) for v in shift.row(i)]
        for k in range(m.cols):
            c = m[i, k]
            if c == 1:
                row = [r + v for r, v in zip(row, x[k])]
            elif c:
                row = [r + v * c for r, v in zip(row, x[k])]
        out.append(row)
    return out


def fractional_action(g: SOnnMatrix, pi: SkewParam) -> SkewParam | None:
    """``(A pi + B)(C pi + D)^-1``, or ``None`` where ``C pi + D`` is singular."""
    if not sonn_check(g):
        raise ValueError("matrix is not in SO(n,n|Z)")
    if g.n != pi.n:
        raise ValueError("dimension mismatch")
    n = pi.n
    if pi.exact:
        p = [list(r) for r in pi.entries]
        num = _integer_affine(g.a, p, g.b)
        den = _integer_affine(g.c, p, g.d)
        inv = inverse(den, QuadraticNumber(1))
        if inv is None:
            return None
        out = _generic_matmul(num, inv)
        if any(out[i][j] != -out[j][i] for i in range(n) for j in range(n)):
            raise InvariantViolation("fractional action produced a non-skew matrix")
        return SkewParam(n, tuple(tuple(r) for r in out))
    asf = lambda m: np.array([[float(v) for v in r] for r in m.tolist()])  # noqa: E731
    p = pi.as_float()
    den = asf(g.c) @ p + asf(g.d)
    if abs(np.linalg.det(den)) <= pi.tol:
        return None
    out = (asf(g.a) @ p + asf(g.b)) @ np.linalg.inv(den)
    if np.max(np.abs(out + out.T), initial=0.0) > pi.tol:
        raise InvariantViolation("fractional action produced a non-skew matrix")
    return SkewParam(n, tuple(tuple(float(v) for v in r) for r in out), pi.tol)


def _elementary(n: int, i: int, j: int, v: int) -> Matrix:
    m = [[int(r == c) for c in range(n)] for r in range(n)]
    m[i][j] += v
    return Matrix.from_rows(m, n)


def generators(n: int) -> list[SOnnMatrix]:
    """The fixed generator list used by :func:`orbit_bfs`, in search order."""
    one, zero = Matrix.identity(n), Matrix.zeros(n, n)
    out: list[SOnnMatrix] = []

    def rho(r: Matrix, name: str) -> SOnnMatrix:
        return SOnnMatrix(n, r, zero, zero, r.inverse().T, name)

    for i, j in itertools.permutations(range(n), 2):
        out.append(rho(_elementary(n, i, j, 1), f"rho(1+E{i + 1}{j + 1})"))
        out.append(rho(_elementary(n, i, j, -1), f"rho(1-E{i + 1}{j + 1})"))
    flip = [[int(r == c) for c in range(n)] for r in range(n)]
    flip[0][0] = -1
    out.append(rho(Matrix.from_rows(flip, n), "rho(diag(-1,1..))"))
    for i, j in itertools.combinations(range(n), 2):
        for s in (1, -1):
            nmat = [[0] * n for _ in range(n)]
            nmat[i][j], nmat[j][i] = s, -s
            out.append(SOnnMatrix(n, one, Matrix.from_rows(nmat, n), zero, one, f"nu({'+' if s > 0 else '-'}{i + 1}{j + 1})"))
    for k, l in itertools.combinations(range(n), 2):
        p = [[int(r == c and r in (k, l)) for c in range(n)] for r in range(n)]
        pm = Matrix.from_rows(p, n)
        out.append(SOnnMatrix(n, one - pm, pm, pm, one - pm, f"sigma({k + 1}{l + 1})"))
    for g in out:
        if not sonn_check(g):
            raise InvariantViolation(f"generator {g.name} is not in SO(n,n|Z)")
    return out


@dataclass(frozen=True)
class OrbitResult:
    status: str  # "equivalent" or "unknown"
    word: list[str] | None
    explored: int
    exhausted: bool = False


def orbit_bfs(pi: SkewParam, pi2: SkewParam, depth: int, max_nodes: int = 200_000) -> OrbitResult:
    """Breadth-first search for a generator word taking ``pi`` to ``pi2``.

    The word lists generators in application order (first applied first).
    Frontier points where an action is undefined are skipped, so "unknown"
    does not imply inequivalence.
    """
    if pi.n != pi2.n:
        raise ValueError("dimension mismatch")
    if pi.exact != pi2.exact:
        raise ValueError("exact and floating parameters cannot be compared")
    gens = generators(pi.n)
    if pi.same_as(pi2):
        return OrbitResult("equivalent", [], 1)
    parent: dict[tuple, tuple[tuple, str] | None] = {pi.key(): None}
    frontier = deque([pi])
    explored = 1
    for _ in range(depth):
        nxt: deque[SkewParam] = deque()
        while frontier:
            cur = frontier.popleft()
            for g in gens:
                res = fractional_action(g, cur)
                if res is None:
                    continue
                k = res.key()
                if k in parent:
                    continue
                parent[k] = (cur.key(), g.name)
                explored += 1
                if res.same_as(pi2):
                    return OrbitResult("equivalent", _unwind(parent, k), explored)
                if explored >= max_nodes:
                    return OrbitResult("unknown", None, explored)
                nxt.append(res)
        frontier = nxt
        if not frontier:
            return OrbitResult("unknown", None, explored, exhausted=True)
    return OrbitResult("unknown", None, explored)


def _unwind(parent: dict, key: tuple) -> list[str]:
    word = []
    while parent[key] is not None:
        key, name = parent[key]
        word.append(name)
    return word[::-1]


def replay(pi: SkewParam, word: Iterable[str]) -> SkewParam | None:
    """Apply the named generators in order; ``None`` if a step is undefined."""
    table = {g.name: g for g in generators(pi.n)}
    cur: SkewParam | None = pi
    for name in word:
        if name not in table:
            raise ValueError(f"unknown generator {name!r}")
        cur = fractional_action(table[name], cur)
        if cur is None:
            return None
    return cur


# ---------------------------------------------------------------------------
# n = 2 decision


@dataclass(frozen=True)
class Decision:
    equivalent: bool
    reason: str
    tail1: list[int] = field(default_factory=list)
    tail2: list[int] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "equivalent" if self.equivalent else "inequivalent"


def _is_rotation(p: list[int], q: list[int]) -> bool:
    return len(p) == len(q) and any(p[i:] + p[:i] == q for i in range(len(p)))


def n2_decide(theta1: Any, theta2: Any) -> Decision:
    """Decide GL(2,Z) Moebius equivalence of two exact real numbers.

    Every rational lies in the orbit of 0.  Two quadratic irrationals are
    equivalent iff their continued fractions have a common tail, i.e. their
    periods are cyclic rotations of each other.
    """
    t1, t2 = (_exact(t) for t in (theta1, theta2))
    r1, r2 = t1.is_rational(), t2.is_rational()
    if r1 and r2:
        return Decision(True, "both rational: each reduces to 0 by the Euclidean algorithm")
    if r1 != r2:
        return Decision(False, "one rational and one irrational")
    if t1.d != t2.d:
        return Decision(False, f"different quadratic fields Q(sqrt {t1.d}) and Q(sqrt {t2.d})")
    _, p1 = continued_fraction(t1)
    _, p2 = continued_fraction(t2)
    if _is_rotation(p1, p2):
        return Decision(True, "continued-fraction periods are cyclic rotations", p1, p2)
    return Decision(False, "continued-fraction periods differ up to rotation", p1, p2)
