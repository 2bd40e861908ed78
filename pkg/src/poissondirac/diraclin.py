"""Vector Dirac structures: maximal isotropic subspaces of V + V*.

Coordinates on V + V* put the vector part first and the covector part last,
so a Dirac subspace on V = Q^n lives in Q^(2n).  The pairing is
``<(X, a), (Y, b)> = a(Y) + b(X)``.

Sign conventions.  A two-form ``omega`` acts as ``omega~(X) = omega(X, .)``,
so its graph is spanned by the rows ``(e_i, omega[i, :])``.  A bivector
``pi`` is matched with the two-form ``(-pi)^-1``; to make the graphs of
matched data coincide, the graph of ``pi`` is ``{(pi @ a, a)}``.  With this
choice the leaf form of ``from_bivector(pi)`` is ``(-pi)^-1`` and
``from_pair(V, omega) == from_two_form(omega)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .exactlin import (
    ExactSubspace,
    InvariantViolation,
    Matrix,
    annihilator,
    nullspace,
    rank,
    rref,
    solve,
    subspace_intersect,
    to_scalar,
)

__all__ = [
    "DiracSubspace",
    "DiracPair",
    "ComplexRational",
    "ComplexDiracSubspace",
    "RoundtripReport",
    "pairing",
    "from_bivector",
    "from_two_form",
    "from_pair",
    "to_pair",
    "restrict",
    "restrict_via_pair",
    "pushforward",
    "pullback",
    "roundtrip_laws",
    "kernel",
    "gauge",
    "complexify",
    "complex_structure_eigenbundle",
    "symplectic_eigenbundle",
    "is_generalized_complex",
    "cartan_dirac_fiber",
    "ghjw_form",
    "certificate",
]

ZERO = Fraction(0)


def pairing(u: Sequence[Any], w: Sequence[Any], n: int) -> Any:
    total = ZERO
    for i in range(n):
        # most entries of a canonical basis vanish; skipping them avoids Fraction products
        if u[n + i] != 0 and w[i] != 0:
            total = total + u[n + i] * w[i]
        if w[n + i] != 0 and u[i] != 0:
            total = total + w[n + i] * u[i]
    return total


def _isotropy_defect(vectors: list[list[Any]], n: int) -> tuple[int, int] | None:
    for i, u in enumerate(vectors):
        for j in range(i, len(vectors)):
            if pairing(u, vectors[j], n) != 0:
                return i, j
    return None


@dataclass(frozen=True)
class DiracSubspace:
    """A maximal isotropic subspace of Q^n + (Q^n)*.

    Validity is checked on construction, so every instance is a vector
    Dirac structure.
    """

    v_dim: int
    space: ExactSubspace

    def __post_init__(self):
        n = self.v_dim
        if self.space.ambient_dim != 2 * n:
            raise ValueError("space must live in Q^(2 v_dim)")
        if self.space.dim != n:
            raise ValueError(f"not maximal: dimension {self.space.dim} != {n}")
        bad = _isotropy_defect(self.space.vectors(), n)
        if bad is not None:
            raise ValueError(f"not isotropic: basis vectors {bad} pair nontrivially")

    @classmethod
    def span(cls, v_dim: int, vectors: Sequence[Sequence[Any]]) -> "DiracSubspace":
        return cls(v_dim, ExactSubspace.span(vectors, 2 * v_dim))

    def vectors(self) -> list[list[Fraction]]:
        return self.space.vectors()

    def range(self) -> ExactSubspace:
        n = self.v_dim
        return ExactSubspace.span([v[:n] for v in self.vectors()], n)

    def covector_range(self) -> ExactSubspace:
        n = self.v_dim
        return ExactSubspace.span([v[n:] for v in self.vectors()], n)

    def contains(self, x: Sequence[Any], alpha: Sequence[Any]) -> bool:
        return self.space.contains(list(x) + list(alpha))

    def to_json(self) -> dict:
        return {"v_dim": self.v_dim, "basis": self.space.basis.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "DiracSubspace":
        n = int(obj["v_dim"])
        basis = Matrix.from_json(obj["basis"])
        return cls.span(n, basis.tolist())


@dataclass(frozen=True)
class DiracPair:
    """A subspace R of V with a skew form theta on R (in R's canonical basis)."""

    range: ExactSubspace
    theta: Matrix

    def __post_init__(self):
        k = self.range.dim
        if (self.theta.rows, self.theta.cols) != (k, k):
            raise ValueError(f"theta must be {k}x{k}")
        if not self.theta.is_skew():
            raise ValueError("theta is not skew-symmetric")

    def evaluate(self, x: Sequence[Any], y: Sequence[Any]) -> Fraction:
        """theta(x, y) for vectors of V lying in R."""
        a = self.range.coordinates(x)
        b = self.range.coordinates(y)
        return sum((a[i] * self.theta[i, j] * b[j] for i in range(len(a)) for j in range(len(b))), ZERO)


def _require_skew(m: Matrix, what: str) -> None:
    if not m.is_skew():
        raise ValueError(f"{what} is not skew-symmetric")


def from_bivector(pi: Matrix) -> DiracSubspace:
    _require_skew(pi, "bivector")
    n = pi.rows
    rows = [pi.col(i) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    return DiracSubspace.span(n, rows)


def from_two_form(omega: Matrix) -> DiracSubspace:
    _require_skew(omega, "two-form")
    n = omega.rows
    rows = [[Fraction(int(i == j)) for j in range(n)] + omega.row(i) for i in range(n)]
    return DiracSubspace.span(n, rows)


def from_pair(p: DiracPair, v_dim: int | None = None) -> DiracSubspace:
    """``L = {(X, a) : X in R, a|_R = theta(X, .)}``."""
    n = p.range.ambient_dim if v_dim is None else v_dim
    if p.range.ambient_dim != n:
        raise ValueError("range does not live in V")
    r = p.range.vectors()
    rows = []
    for a, ra in enumerate(r):
        # covector alpha with alpha(r_b) = theta[a, b] for every basis vector r_b
        alpha = solve(r, p.theta.row(a))
        if alpha is None:
            raise InvariantViolation("range basis is not independent")
        rows.append(ra + alpha)
    for beta in annihilator(p.range).vectors():
        rows.append([ZERO] * n + beta)
    return DiracSubspace.span(n, rows)


def _lift(l: DiracSubspace, x: Sequence[Fraction]) -> list[Fraction] | None:
    """Some covector alpha with (x, alpha) in l, or None if x is not in pr1(l)."""
    n = l.v_dim
    basis = l.vectors()
    coeffs = solve([[b[i] for b in basis] for i in range(n)], list(x))
    if coeffs is None:
        return None
    return [sum((c * b[n + i] for c, b in zip(coeffs, basis)), ZERO) for i in range(n)]


def to_pair(l: DiracSubspace) -> DiracPair:
    n = l.v_dim
    rng = l.range()
    r = rng.vectors()
    # covectors of l with zero vector part; adding one must not change theta
    pure = [v[n:] for v in subspace_intersect(l.space, _cotangent(n)).vectors()]
    shift = [sum((p[i] for p in pure), ZERO) for i in range(n)]
    theta_rows = []
    for ra in r:
        alpha = _lift(l, ra)
        if alpha is None:
            raise InvariantViolation("range vector without a lift")
        row = [sum((alpha[i] * rb[i] for i in range(n)), ZERO) for rb in r]
        alt = [alpha[i] + shift[i] for i in range(n)]
        if row != [sum((alt[i] * rb[i] for i in range(n)), ZERO) for rb in r]:
            raise InvariantViolation("theta depends on the choice of lift")
        theta_rows.append(row)
    k = len(r)
    return DiracPair(rng, Matrix.from_rows(theta_rows, k) if k else Matrix.zeros(0, 0))


def _tangent(n: int) -> ExactSubspace:
    return ExactSubspace.span([[Fraction(int(i == j)) for j in range(2 * n)] for i in range(n)], 2 * n)


def _cotangent(n: int) -> ExactSubspace:
    return ExactSubspace.span([[Fraction(int(i + n == j)) for j in range(2 * n)] for i in range(n)], 2 * n)


@functools.lru_cache(maxsize=4096)
def kernel(l: DiracSubspace) -> ExactSubspace:
    """``Ker(L) = V cap L``, cross-checked against the kernel of theta on R."""
    n = l.v_dim
    direct = ExactSubspace.span([v[:n] for v in subspace_intersect(l.space, _tangent(n)).vectors()], n)
    p = to_pair(l)
    k = p.range.dim
    r = p.range.vectors()
    null = nullspace(p.theta.tolist(), k, Fraction(1)) if k else []
    via_theta = ExactSubspace.span(
        [[sum((c[a] * r[a][i] for a in range(k)), ZERO) for i in range(n)] for c in null], n
    )
    if direct != via_theta:
        raise InvariantViolation("V cap L differs from ker(theta)")
    return direct


# ---------------------------------------------------------------------------
# restriction to subspaces


def _restriction_map(w: ExactSubspace, n: int):
    wv = w.vectors()

    def to_w(vec: Sequence[Fraction]) -> list[Fraction]:
        x, alpha = vec[:n], vec[n:]
        coords = w.coordinates(x)
        pulled = [sum((alpha[i] * wb[i] for i in range(n)), ZERO) for wb in wv]
        return coords + pulled

    return to_w


def restrict(l: DiracSubspace, w: ExactSubspace) -> DiracSubspace:
    """``L_W = (L cap (W + V*)) / (L cap W°)`` in the coordinates of W's canonical basis."""
    n = l.v_dim
    if w.ambient_dim != n:
        raise ValueError("W must be a subspace of V")
    k = w.dim
    w_plus_dual = ExactSubspace.span([v + [ZERO] * n for v in w.vectors()] + _cotangent(n).vectors(), 2 * n)
    ann_w = ExactSubspace.span([[ZERO] * n + a for a in annihilator(w).vectors()], 2 * n)
    numerator = subspace_intersect(l.space, w_plus_dual)
    denominator = subspace_intersect(l.space, ann_w)
    if numerator.dim - denominator.dim != k:
        raise InvariantViolation("quotient has the wrong dimension")
    to_w = _restriction_map(w, n)
    images = [to_w(v) for v in numerator.vectors()]
    if rank(images, 2 * k) != k:
        raise InvariantViolation("kernel of the restriction map is not L cap W°")
    return DiracSubspace.span(k, images)


def restrict_via_pair(l: DiracSubspace, w: ExactSubspace) -> DiracSubspace:
    """The same restriction computed as ``(R cap W, iota^* theta)``."""
    n = l.v_dim
    if w.ambient_dim != n:
        raise ValueError("W must be a subspace of V")
    p = to_pair(l)
    rw = subspace_intersect(p.range, w)
    wv = w.vectors()
    rw_in_w = ExactSubspace.span([w.coordinates(v) for v in rw.vectors()], w.dim)
    # canonical basis of R cap W, carried back into V
    back = [[sum((c[a] * wv[a][i] for a in range(w.dim)), ZERO) for i in range(n)] for c in rw_in_w.vectors()]
    k = len(back)
    theta = Matrix.from_rows([[p.evaluate(a, b) for b in back] for a in back], k) if k else Matrix.zeros(0, 0)
    return from_pair(DiracPair(rw_in_w, theta), w.dim)


# ---------------------------------------------------------------------------
# forward and backward maps


def pushforward(f: Matrix, l: DiracSubspace) -> DiracSubspace:
    """``f_* L = {(f X, b) : (X, f^T b) in L}``."""
    n1, n2 = f.cols, f.rows
    if l.v_dim != n1:
        raise ValueError("map source dimension does not match the Dirac structure")
    ann = annihilator(l.space).vectors()
    # unknowns (X, b) in Q^n1 + Q^n2; constraint: a . (X, f^T b) = 0 for a in L°
    eqs = []
    for a in ann:
        ax, aa = a[:n1], a[n1:]
        eqs.append(ax + [sum((aa[i] * f[j, i] for i in range(n1)), ZERO) for j in range(n2)])
    sols = nullspace(eqs, n1 + n2, Fraction(1)) if eqs else _identity_rows(n1 + n2)
    out = [f.apply(s[:n1]) + s[n1:] for s in sols]
    return DiracSubspace.span(n2, out)


def pullback(f: Matrix, l: DiracSubspace) -> DiracSubspace:
    """``f^* L = {(X, f^T b) : (f X, b) in L}``."""
    n1, n2 = f.cols, f.rows
    if l.v_dim != n2:
        raise ValueError("map target dimension does not match the Dirac structure")
    ann = annihilator(l.space).vectors()
    eqs = []
    for a in ann:
        ax, ab = a[:n2], a[n2:]
        eqs.append([sum((ax[i] * f[i, j] for i in range(n2)), ZERO) for j in range(n1)] + ab)
    sols = nullspace(eqs, n1 + n2, Fraction(1)) if eqs else _identity_rows(n1 + n2)
    ft = f.T
    out = [s[:n1] + ft.apply(s[n1:]) for s in sols]
    return DiracSubspace.span(n1, out)


def _identity_rows(m: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]


@dataclass(frozen=True)
class RoundtripReport:
    pull_push_identity: bool | None = None
    kernel_contained: bool | None = None
    push_pull_identity: bool | None = None
    range_in_image: bool | None = None


def roundtrip_laws(
    f: Matrix, l_source: DiracSubspace | None = None, l_target: DiracSubspace | None = None
) -> RoundtripReport:
    """Check ``f^* f_* L = L iff Ker f in Ker L`` and ``f_* f^* L = L iff R in im f``.

    Raises :class:`InvariantViolation` if either equivalence fails.
    """
    out: dict[str, bool] = {}
    if l_source is not None:
        pp = pullback(f, pushforward(f, l_source)) == l_source
        ker_f = ExactSubspace.span(nullspace(f.tolist(), f.cols, Fraction(1)), f.cols)
        kc = ker_f.issubspace(kernel(l_source))
        if pp != kc:
            raise InvariantViolation("f^* f_* L = L but Ker f is not in Ker L (or conversely)")
        out.update(pull_push_identity=pp, kernel_contained=kc)
    if l_target is not None:
        pp = pushforward(f, pullback(f, l_target)) == l_target
        im_f = ExactSubspace.span(f.T.tolist(), f.rows)
        ri = l_target.range().issubspace(im_f)
        if pp != ri:
            raise InvariantViolation("f_* f^* L = L but R is not in f(V1) (or conversely)")
        out.update(push_pull_identity=pp, range_in_image=ri)
    return RoundtripReport(**out)


# ---------------------------------------------------------------------------
# gauge transformations


def gauge(l: DiracSubspace, b: Matrix) -> DiracSubspace:
    """``tau_B(L) = {(X, a + B(X, .)) : (X, a) in L}``."""
    _require_skew(b, "gauge two-form")
    n = l.v_dim
    if b.rows != n:
        raise ValueError("gauge form has the wrong size")
    bt = b.T
    out = []
    for v in l.vectors():
        x = v[:n]
        shift = bt.apply(x)
        out.append(x + [v[n + i] + shift[i] for i in range(n)])
    return DiracSubspace.span(n, out)


# ---------------------------------------------------------------------------
# complex Dirac structures


class ComplexRational:
    """Gaussian rational ``re + i*im`` with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Any = 0, im: Any = 0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def _c(x: Any) -> "ComplexRational":
        return x if isinstance(x, ComplexRational) else ComplexRational(x)

    def __add__(self, o):
        o = self._c(o)
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._c(o)
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return self._c(o) - self

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __mul__(self, o):
        o = self._c(o)
        return ComplexRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._c(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("complex division by zero")
        return ComplexRational((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        return self._c(o) / self

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        if isinstance(o, ComplexRational):
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def __repr__(self):
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


I = ComplexRational(0, 1)
C_ONE = ComplexRational(1)


def _crref(vectors: list[list[ComplexRational]], m: int) -> list[list[ComplexRational]]:
    return rref([[ComplexRational._c(a) for a in v] for v in vectors], m)[0]


@dataclass(frozen=True, eq=False)
class ComplexDiracSubspace:
    """A maximal isotropic subspace of (V + V*) tensor C, in canonical echelon form.

    ``real`` and ``imag`` expose the basis as a pair of rational matrices.
    """

    v_dim: int
    basis: tuple[tuple[ComplexRational, ...], ...]

    def __post_init__(self):
        n = self.v_dim
        if len(self.basis) != n:
            raise ValueError(f"not maximal: dimension {len(self.basis)} != {n}")
        bad = _isotropy_defect([list(v) for v in self.basis], n)
        if bad is not None:
            raise ValueError(f"not isotropic: basis vectors {bad} pair nontrivially")

    @classmethod
    def span(cls, v_dim: int, vectors: Sequence[Sequence[Any]]) -> "ComplexDiracSubspace":
        red = _crref([list(v) for v in vectors], 2 * v_dim)
        return cls(v_dim, tuple(tuple(r) for r in red))

    @property
    def real(self) -> Matrix:
        return Matrix.from_rows([[a.re for a in r] for r in self.basis], 2 * self.v_dim)

    @property
    def imag(self) -> Matrix:
        return Matrix.from_rows([[a.im for a in r] for r in self.basis], 2 * self.v_dim)

    def conjugate(self) -> "ComplexDiracSubspace":
        return ComplexDiracSubspace.span(self.v_dim, [[a.conjugate() for a in r] for r in self.basis])

    def __eq__(self, other):
        if not isinstance(other, ComplexDiracSubspace):
            return NotImplemented
        return self.v_dim == other.v_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.v_dim, self.basis))


def complexify(l: DiracSubspace) -> ComplexDiracSubspace:
    return ComplexDiracSubspace.span(l.v_dim, l.vectors())


def _eigenspace_i(block: list[list[Fraction]], m: int) -> list[list[ComplexRational]]:
    shifted = [[ComplexRational(block[r][c]) - (I if r == c else 0) for c in range(m)] for r in range(m)]
    return nullspace(shifted, m, C_ONE)


def complex_structure_eigenbundle(j: Matrix) -> ComplexDiracSubspace:
    """The i-eigenspace of ``(X, a) -> (-J X, J^T a)`` for a complex structure J."""
    n = j.rows
    if not j.is_square or j @ j != -Matrix.identity(n):
        raise ValueError("J must satisfy J^2 = -1")
    m = 2 * n
    block = [[ZERO] * m for _ in range(m)]
    for r in range(n):
        for c in range(n):
            block[r][c] = -j[r, c]
            block[n + r][n + c] = j[c, r]
    return ComplexDiracSubspace.span(n, _eigenspace_i(block, m))


def symplectic_eigenbundle(omega: Matrix) -> ComplexDiracSubspace:
    """The i-eigenspace of ``(X, a) -> (-omega~^-1 a, omega~ X)``."""
    _require_skew(omega, "two-form")
    n = omega.rows
    w = omega.T  # matrix of omega~ : X -> omega(X, .)
    winv = w.inverse()
    if winv is None:
        raise ValueError("two-form is degenerate")
    m = 2 * n
    block = [[ZERO] * m for _ in range(m)]
    for r in range(n):
        for c in range(n):
            block[r][n + c] = -winv[r, c]
            block[n + r][c] = w[r, c]
    return ComplexDiracSubspace.span(n, _eigenspace_i(block, m))


def is_generalized_complex(lc: ComplexDiracSubspace) -> bool:
    """True iff ``L cap conj(L) = {0}``."""
    rows = [list(v) for v in lc.basis] + [list(v) for v in lc.conjugate().basis]
    return len(_crref(rows, 2 * lc.v_dim)) == 2 * lc.v_dim


# ---------------------------------------------------------------------------
# Cartan-Dirac fibres


def _check_invariant_form(ad: Matrix, beta: Matrix) -> None:
    if not ad.is_square or ad.rows != beta.rows or not beta.is_square:
        raise ValueError("shape mismatch")
    if not beta.is_symmetric():
        raise ValueError("beta must be symmetric")
    if beta.det() == 0:
        raise ValueError("beta must be nondegenerate")
    if ad.det() == 0:
        raise ValueError("ad must be invertible")
    if ad.T @ beta @ ad != beta:
        raise ValueError("beta is not invariant under ad")


def cartan_dirac_fiber(ad: Matrix, beta: Matrix) -> DiracSubspace:
    """Fibre ``{((A-1)w, beta((A+1)w, .)/2)}`` of the Cartan-Dirac structure at a group element.

    ``ad`` is the adjoint action A of the element; tangent vectors are
    identified with the Lie algebra by right translation, so
    ``v_r - v_l = (A - 1) w`` and ``(v_r + v_l)/2 = (A + 1) w / 2`` with ``w = A^-1 v``.
    """
    _check_invariant_form(ad, beta)
    n = ad.rows
    one = Matrix.identity(n)
    am, ap = ad - one, ad + one
    half = beta @ ap
    rows = [am.col(j) + [v / 2 for v in half.col(j)] for j in range(n)]
    return DiracSubspace.span(n, rows)


def ghjw_form(ad: Matrix, beta: Matrix) -> Matrix:
    """Matrix M with ``theta(v_G, w_G) = v^T M w = beta((A^-1 - A) v, w) / 2``."""
    _check_invariant_form(ad, beta)
    diff = ad.inverse() - ad
    return (diff.T @ beta).scale(Fraction(1, 2))


def certificate(l: DiracSubspace) -> dict:
    """Human and machine readable evidence that ``l`` is maximal isotropic."""
    vecs = l.vectors()
    n = l.v_dim
    pairs = [[pairing(u, w, n) for w in vecs] for u in vecs]
    iso = all(p == 0 for row in pairs for p in row)
    return {
        "v_dim": n,
        "dimension": len(vecs),
        "maximal": len(vecs) == n,
        "isotropic": iso,
        "max_abs_pairing": str(max((abs(p) for row in pairs for p in row), default=ZERO)),
        "text": (
            f"dim L = {len(vecs)} = dim V; all {len(vecs) * (len(vecs) + 1) // 2} basis pairings vanish"
            if iso and len(vecs) == n
            else "certificate failed"
        ),
    }


def to_matrix(obj: Any) -> Matrix:
    """Accept a Matrix, its JSON form, or a list of rows."""
    if isinstance(obj, Matrix):
        return obj
    if isinstance(obj, dict):
        return Matrix.from_json(obj)
    return Matrix.from_rows([[to_scalar(v) for v in r] for r in obj])
