"""Exact rational linear algebra.

Everything here works over :class:`fractions.Fraction`.  The row-reduction
helpers (:func:`rref`, :func:`nullspace`, :func:`inverse`, ...) only use field
operations, so they also accept other exact scalar types such as
:class:`poissondirac.quadratic.QuadraticNumber` or
:class:`poissondirac.diraclin.ComplexRational`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

__all__ = [
    "InvariantViolation",
    "Matrix",
    "ExactSubspace",
    "to_scalar",
    "scalar_to_json",
    "rref",
    "nullspace",
    "rank",
    "inverse",
    "determinant",
    "solve",
    "subspace_sum",
    "subspace_intersect",
    "annihilator",
    "quotient_map",
    "image",
    "preimage",
    "MAX_AMBIENT_DIM",
    "set_max_ambient_dim",
]

MAX_AMBIENT_DIM = 64


def set_max_ambient_dim(cap: int) -> None:
    global MAX_AMBIENT_DIM
    if cap <= 0:
        raise ValueError("ambient dimension cap must be positive")
    MAX_AMBIENT_DIM = int(cap)


class InvariantViolation(RuntimeError):
    """An internal cross-check failed; the inputs or the code are corrupt."""


def to_scalar(x: Any) -> Fraction:
    """Coerce ``x`` to a Fraction.  Strings use the ``"p/q"`` form."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; pass a string 'p/q'")
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def scalar_to_json(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# generic row reduction (any exact field)


def rref(rows: Sequence[Sequence[Any]], ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivots)`` where the zero rows are dropped and
    ``pivots`` lists the pivot column of each remaining row.
    """
    m = [list(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        if p != 1:
            inv = 1 / p
            m[r] = [v * inv if v != 0 else v for v in m[r]]
        pivot_row = m[r]
        # rows are mostly zeros, so only the pivot row's support is touched
        support = [k for k in range(c, ncols) if pivot_row[k] != 0]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    row_i = m[i]
                    for k in support:
                        row_i[k] = row_i[k] - f * pivot_row[k]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Any]], ncols: int, one: Any = 1) -> list[list[Any]]:
    """Basis of ``{v : rows @ v = 0}``, one vector per free column."""
    red, piv = rref(rows, ncols)
    zero = one - one
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for r, pc in enumerate(piv):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def rank(rows: Sequence[Sequence[Any]], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def inverse(rows: Sequence[Sequence[Any]], one: Any = 1) -> list[list[Any]] | None:
    """Inverse of a square matrix, or ``None`` if it is singular."""
    n = len(rows)
    zero = one - one
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        return None
    return [row[n:] for row in red[:n]]


def determinant(rows: Sequence[Sequence[Any]], one: Any = 1) -> Any:
    m = [list(r) for r in rows]
    n = len(m)
    det = one
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return one - one
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f != 0:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def solve(rows: Sequence[Sequence[Any]], rhs: Sequence[Any]) -> list[Any] | None:
    """One solution of ``rows @ x = rhs`` or ``None`` if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    zero = Fraction(0)
    x: list[Any] = [zero] * ncols
    for r, pc in enumerate(piv):
        x[pc] = red[r][ncols]
    return x


# ---------------------------------------------------------------------------
# Matrix


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix of Fractions, stored row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length does not match shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]], cols: int | None = None) -> "Matrix":
        rows = [[to_scalar(v) for v in r] for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(v for r in rows for v in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Fraction]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list[Fraction]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def tolist(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    @property
    def T(self) -> "Matrix":
        return Matrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: Any) -> "Matrix":
        c = to_scalar(c)
        return Matrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.extend(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in ocols)
        return Matrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence[Fraction]) -> list[Fraction]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum((a * b for a, b in zip(self.row(i), v) if a and b), Fraction(0)) for i in range(self.rows)]

    def _same_shape(self, other: "Matrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_skew(self) -> bool:
        return self.is_square and all(
            self[i, j] == -self[j, i] for i in range(self.rows) for j in range(i, self.cols)
        )

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def rank(self) -> int:
        return rank(self.tolist(), self.cols)

    def det(self) -> Fraction:
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        return determinant(self.tolist(), Fraction(1))

    def inverse(self) -> "Matrix | None":
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        inv = inverse(self.tolist(), Fraction(1))
        return None if inv is None else Matrix.from_rows(inv, self.cols)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": [scalar_to_json(v) for v in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "Matrix":
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
        if data and isinstance(data[0], list):
            data = [v for r in data for v in r]
        return cls(rows, cols, tuple(to_scalar(v) for v in data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(scalar_to_json(v) for v in self.row(i)) for i in range(self.rows))
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def hstack(*blocks: Matrix) -> Matrix:
    rows = blocks[0].rows
    return Matrix.from_rows(
        [sum((b.row(i) for b in blocks), []) for i in range(rows)], sum(b.cols for b in blocks)
    )


def vstack(*blocks: Matrix) -> Matrix:
    cols = blocks[0].cols
    return Matrix.from_rows([r for b in blocks for r in b.tolist()], cols)


# ---------------------------------------------------------------------------
# Subspaces


def _check_dim(n: int) -> None:
    if n < 0:
        raise ValueError("negative dimension")
    if n > MAX_AMBIENT_DIM:
        raise ValueError(f"ambient dimension {n} exceeds the cap {MAX_AMBIENT_DIM}")


@dataclass(frozen=True)
class ExactSubspace:
    """A subspace of Q^n held as the reduced row echelon basis of its span.

    Equal subspaces have equal ``basis`` matrices, so ``==`` is subspace
    equality.  Build instances with :meth:`span`.
    """

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        _check_dim(self.ambient_dim)
        if self.basis.cols != self.ambient_dim:
            raise ValueError("basis width does not match ambient dimension")
        red, piv = rref(self.basis.tolist(), self.ambient_dim)
        if len(piv) != self.basis.rows or Matrix.from_rows(red, self.ambient_dim) != self.basis:
            raise ValueError("basis is not in canonical reduced echelon form; use ExactSubspace.span")

    @classmethod
    def span(cls, vectors: Iterable[Sequence[Any]], ambient_dim: int) -> "ExactSubspace":
        _check_dim(ambient_dim)
        vecs = [[to_scalar(v) for v in vec] for vec in vectors]
        if any(len(v) != ambient_dim for v in vecs):
            raise ValueError("vector length does not match ambient dimension")
        red, _ = rref(vecs, ambient_dim)
        return cls._trusted(ambient_dim, Matrix.from_rows(red, ambient_dim))

    @classmethod
    def _trusted(cls, ambient_dim: int, basis: Matrix) -> "ExactSubspace":
        # basis already canonical; skip the re-reduction in __post_init__
        _check_dim(ambient_dim)
        obj = object.__new__(cls)
        object.__setattr__(obj, "ambient_dim", ambient_dim)
        object.__setattr__(obj, "basis", basis)
        return obj

    @classmethod
    def zero(cls, n: int) -> "ExactSubspace":
        return cls.span([], n)

    @classmethod
    def full(cls, n: int) -> "ExactSubspace":
        return cls._trusted(n, Matrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> list[list[Fraction]]:
        return self.basis.tolist()

    def contains(self, v: Sequence[Any]) -> bool:
        v = [to_scalar(a) for a in v]
        if len(v) != self.ambient_dim:
            raise ValueError("vector length mismatch")
        return rank(self.vectors() + [v], self.ambient_dim) == self.dim

    def issubspace(self, other: "ExactSubspace") -> bool:
        _same_ambient(self, other)
        return subspace_sum(self, other) == other

    def coordinates(self, v: Sequence[Any]) -> list[Fraction]:
        """Coefficients of ``v`` in the canonical basis (``v`` must lie in the span)."""
        cols = self.basis.T.tolist()
        x = solve(cols, [to_scalar(a) for a in v]) if self.dim else []
        if x is None or (self.dim == 0 and any(to_scalar(a) != 0 for a in v)):
            raise ValueError("vector is not in the subspace")
        return x

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "ExactSubspace":
        n = int(obj["ambient_dim"])
        b = Matrix.from_json(obj["basis"]) if obj.get("basis") else Matrix.zeros(0, n)
        return cls.span(b.tolist(), n)


def _same_ambient(a: ExactSubspace, b: ExactSubspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def subspace_sum(a: ExactSubspace, b: ExactSubspace) -> ExactSubspace:
    _same_ambient(a, b)
    return ExactSubspace.span(a.vectors() + b.vectors(), a.ambient_dim)


def subspace_intersect(a: ExactSubspace, b: ExactSubspace) -> ExactSubspace:
    """Solve ``sum_i s_i a_i = sum_j t_j b_j`` and map the solutions back."""
    _same_ambient(a, b)
    n = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return ExactSubspace.zero(n)
    av, bv = a.vectors(), b.vectors()
    # columns: a-coefficients then b-coefficients; one equation per coordinate
    system = [[av[i][k] for i in range(len(av))] + [-bv[j][k] for j in range(len(bv))] for k in range(n)]
    sols = nullspace(system, len(av) + len(bv), Fraction(1))
    vecs = []
    for s in sols:
        vecs.append([sum((s[i] * av[i][k] for i in range(len(av))), Fraction(0)) for k in range(n)])
    return ExactSubspace.span(vecs, n)


@functools.lru_cache(maxsize=4096)
def annihilator(w: ExactSubspace) -> ExactSubspace:
    """Covectors vanishing on ``w``, expressed in the dual basis."""
    n = w.ambient_dim
    return ExactSubspace.span(nullspace(w.vectors(), n, Fraction(1)), n)


def quotient_map(v_dim: int, k: ExactSubspace) -> tuple[Matrix, int]:
    """A surjection ``Q^v_dim -> Q^(v_dim - dim k)`` whose kernel is ``k``."""
    if k.ambient_dim != v_dim:
        raise ValueError("kernel does not live in Q^v_dim")
    ann = annihilator(k)
    return (ann.basis if ann.dim else Matrix.zeros(0, v_dim)), ann.dim


def image(f: Matrix, w: ExactSubspace) -> ExactSubspace:
    if f.cols != w.ambient_dim:
        raise ValueError("map does not act on this subspace")
    return ExactSubspace.span([f.apply(v) for v in w.vectors()], f.rows)


def preimage(f: Matrix, w: ExactSubspace) -> ExactSubspace:
    """``{x : f x in w}``."""
    if f.rows != w.ambient_dim:
        raise ValueError("subspace does not live in the target of the map")
    ann = annihilator(w).vectors()
    if not ann:
        return ExactSubspace.full(f.cols)
    eqs = [[sum((a[i] * f[i, j] for i in range(f.rows)), Fraction(0)) for j in range(f.cols)] for a in ann]
    return ExactSubspace.span(nullspace(eqs, f.cols, Fraction(1)), f.cols)
