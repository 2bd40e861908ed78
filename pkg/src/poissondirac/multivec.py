"""Polynomial multivector and form calculus on R^n with exact rational coefficients.

A bivector ``pi`` is stored by its components ``pi[i, j] = pi(dx_i, dx_j)`` for
``i < j``.  The bracket it defines is ``{f, g} = sum_ij pi_ij d_i f d_j g``
and the hamiltonian field is ``X_f = {f, .}``.  The map ``pi~`` sends a
covector ``a`` to the vector with components ``sum_i a_i pi_ij``, so that
``pi~(df) = X_f``.

Multivectors and forms are also viewed as polynomials in anticommuting
symbols ``xi_1 .. xi_n``; the Schouten square and the exterior derivative
are computed in that picture.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, ClassVar, Iterable, Mapping, Sequence

from .exactlin import InvariantViolation, Matrix, nullspace, rank, solve, to_scalar, scalar_to_json

__all__ = [
    "Poly",
    "SkewTensor",
    "PolyVectorField",
    "PolyOneForm",
    "PolyBivector",
    "PolyTwoForm",
    "PolyTrivector",
    "PolyThreeForm",
    "StructureConstants",
    "TwistedCheck",
    "NotAdmissible",
    "poisson_bracket",
    "hamiltonian_vf",
    "schouten_square",
    "exterior_derivative",
    "wedge3_pullback",
    "twisted_poisson_check",
    "courant_bracket",
    "graph_closure_check",
    "frame_closure_sampled",
    "lie_poisson",
    "one_form_bracket",
    "leaf_rank",
    "gauge_bivector_at",
    "admissible_bracket",
    "sample_points",
]

Exponent = tuple[int, ...]
ZERO = Fraction(0)
ONE = Fraction(1)


class Poly:
    """Multivariate polynomial over Q; immutable.

    ``terms`` maps exponent tuples to nonzero Fractions.
    """

    __slots__ = ("n_vars", "terms", "_hash")

    def __init__(self, n_vars: int, terms: Mapping[Exponent, Any] | None = None):
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            if len(e) != n_vars or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for {n_vars} variables")
            c = to_scalar(c)
            if c:
                clean[tuple(e)] = c
        object.__setattr__(self, "n_vars", n_vars)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def _raw(cls, n_vars: int, terms: dict[Exponent, Fraction]) -> "Poly":
        obj = object.__new__(cls)
        object.__setattr__(obj, "n_vars", n_vars)
        object.__setattr__(obj, "terms", {e: c for e, c in sorted(terms.items()) if c})
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def const(cls, n_vars: int, c: Any) -> "Poly":
        return cls(n_vars, {(0,) * n_vars: c})

    @classmethod
    def zero(cls, n_vars: int) -> "Poly":
        return cls._raw(n_vars, {})

    @classmethod
    def var(cls, n_vars: int, i: int) -> "Poly":
        e = [0] * n_vars
        e[i] = 1
        return cls._raw(n_vars, {tuple(e): ONE})

    @classmethod
    def variables(cls, n_vars: int) -> list["Poly"]:
        return [cls.var(n_vars, i) for i in range(n_vars)]

    def _coerce(self, other: Any) -> "Poly":
        if isinstance(other, Poly):
            if other.n_vars != self.n_vars:
                raise ValueError(f"variable count mismatch: {self.n_vars} vs {other.n_vars}")
            return other
        return Poly.const(self.n_vars, other)

    def __add__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, ZERO) + c
        return Poly._raw(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "Poly":
        if not isinstance(other, Poly):
            c = to_scalar(other)
            return Poly._raw(self.n_vars, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return Poly._raw(self.n_vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(self.n_vars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Poly):
            return self.n_vars == other.n_vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.n_vars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.n_vars, tuple(self.terms.items()))))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def diff(self, i: int) -> "Poly":
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return Poly._raw(self.n_vars, out)

    def gradient(self) -> list["Poly"]:
        return [self.diff(i) for i in range(self.n_vars)]

    def evaluate(self, point: Sequence[Any]) -> Fraction:
        if len(point) != self.n_vars:
            raise ValueError("point has the wrong dimension")
        pt = [to_scalar(p) for p in point]
        total = ZERO
        for e, c in self.terms.items():
            term = c
            for p, k in zip(pt, e):
                if k:
                    term *= p**k
            total += term
        return total

    def to_json(self) -> dict:
        return {
            "n_vars": self.n_vars,
            "terms": [{"exp": list(e), "coef": scalar_to_json(c)} for e, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "Poly":
        n = int(obj["n_vars"])
        terms: dict[Exponent, Fraction] = {}
        for t in obj.get("terms", []):
            e = tuple(int(k) for k in t["exp"])
            terms[e] = terms.get(e, ZERO) + to_scalar(t["coef"])
        return cls(n, terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _as_poly(n: int, v: Any) -> Poly:
    if isinstance(v, Poly):
        if v.n_vars != n:
            raise ValueError("variable count mismatch")
        return v
    return Poly.const(n, v)


# ---------------------------------------------------------------------------
# anticommuting symbols


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Sign of the permutation sorting the concatenation ``a + b`` (disjoint, each sorted)."""
    inv = sum(1 for x in a for y in b if x > y)
    return -1 if inv % 2 else 1


class _Super:
    """Polynomial in x with anticommuting symbols xi: {sorted odd index tuple: Poly}."""

    def __init__(self, n: int, comps: dict[tuple[int, ...], Poly] | None = None):
        self.n = n
        self.comps = {k: v for k, v in (comps or {}).items() if v}

    def __add__(self, other: "_Super") -> "_Super":
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return _Super(self.n, out)

    def scale(self, c: Any) -> "_Super":
        return _Super(self.n, {k: v * c for k, v in self.comps.items()})

    def __mul__(self, other: "_Super") -> "_Super":
        out: dict[tuple[int, ...], Poly] = {}
        for a, pa in self.comps.items():
            for b, pb in other.comps.items():
                if set(a) & set(b):
                    continue
                key = tuple(sorted(a + b))
                term = pa * pb
                if _merge_sign(a, b) < 0:
                    term = -term
                out[key] = out[key] + term if key in out else term
        return _Super(self.n, out)

    def odd_diff(self, i: int) -> "_Super":
        """Left derivative with respect to xi_i."""
        out = {}
        for k, v in self.comps.items():
            if i in k:
                pos = k.index(i)
                out[k[:pos] + k[pos + 1 :]] = -v if pos % 2 else v
        return _Super(self.n, out)

    def even_diff(self, i: int) -> "_Super":
        return _Super(self.n, {k: v.diff(i) for k, v in self.comps.items()})

    def odd_degree(self) -> int | None:
        degs = {len(k) for k in self.comps}
        if len(degs) > 1:
            raise ValueError("inhomogeneous element")
        return degs.pop() if degs else None


def _xi(n: int, i: int) -> _Super:
    return _Super(n, {(i,): Poly.const(n, 1)})


# ---------------------------------------------------------------------------
# skew tensors


@dataclass(frozen=True, eq=False)
class SkewTensor:
    """Skew tensor with polynomial components stored on strictly increasing indices."""

    n_vars: int
    comps: Mapping[tuple[int, ...], Poly] = field(default_factory=dict)

    degree: ClassVar[int] = 0
    kind: ClassVar[str] = "vector"

    def __post_init__(self):
        clean = {}
        for idx, p in self.comps.items():
            idx = tuple(idx)
            if len(idx) != self.degree or any(not 0 <= i < self.n_vars for i in idx):
                raise ValueError(f"bad index {idx}")
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"indices must be strictly increasing, got {idx}")
            p = _as_poly(self.n_vars, p)
            if p:
                clean[idx] = p
        object.__setattr__(self, "comps", dict(sorted(clean.items())))

    @classmethod
    def from_any(cls, n_vars: int, comps: Mapping[tuple[int, ...], Any]) -> "SkewTensor":
        """Build from components on arbitrary index orders, checking skew consistency."""
        out: dict[tuple[int, ...], Poly] = {}
        for idx, p in comps.items():
            if len(set(idx)) != len(idx):
                if _as_poly(n_vars, p):
                    raise ValueError(f"nonzero component on repeated index {idx}")
                continue
            key, sign = _sort_with_sign(idx)
            val = _as_poly(n_vars, p) * sign
            if key in out and out[key] != val:
                raise ValueError(f"components at {idx} are not skew-consistent")
            out[key] = val
        return cls(n_vars, out)

    def __call__(self, *idx: int) -> Poly:
        if len(set(idx)) != len(idx):
            return Poly.zero(self.n_vars)
        key, sign = _sort_with_sign(idx)
        p = self.comps.get(key)
        return Poly.zero(self.n_vars) if p is None else p * sign

    def _check(self, other: "SkewTensor") -> None:
        if type(self) is not type(other) or self.n_vars != other.n_vars:
            raise ValueError("tensor type or variable count mismatch")

    def __add__(self, other: "SkewTensor") -> "SkewTensor":
        self._check(other)
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return type(self)(self.n_vars, out)

    def __neg__(self) -> "SkewTensor":
        return type(self)(self.n_vars, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other: "SkewTensor") -> "SkewTensor":
        return self + (-other)

    def scale(self, c: Any) -> "SkewTensor":
        return type(self)(self.n_vars, {k: v * c for k, v in self.comps.items()})

    def __eq__(self, other: Any) -> bool:
        return type(self) is type(other) and self.n_vars == other.n_vars and self.comps == other.comps

    def __hash__(self):
        return hash((type(self).__name__, self.n_vars, tuple(self.comps.items())))

    def is_zero(self) -> bool:
        return not self.comps

    def max_degree(self) -> int:
        return max((p.degree() for p in self.comps.values()), default=-1)

    def _to_super(self) -> _Super:
        return _Super(self.n_vars, dict(self.comps))

    @classmethod
    def _from_super(cls, s: _Super) -> "SkewTensor":
        d = s.odd_degree()
        if d is not None and d != cls.degree:
            raise InvariantViolation(f"expected degree {cls.degree}, got {d}")
        return cls(s.n, s.comps)

    def to_json(self) -> dict:
        return {
            "type": type(self).__name__,
            "n_vars": self.n_vars,
            "components": [{"index": list(k), "poly": v.to_json()} for k, v in self.comps.items()],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "SkewTensor":
        n = int(obj["n_vars"])
        comps = {}
        for c in obj.get("components", []):
            comps[tuple(int(i) for i in c["index"])] = Poly.from_json(c["poly"]) if isinstance(c["poly"], Mapping) else c["poly"]
        return cls.from_any(n, comps)

    def __repr__(self) -> str:
        body = ", ".join(f"{list(k)}: {v!r}" for k, v in self.comps.items())
        return f"{type(self).__name__}(n={self.n_vars}, {{{body}}})"


def _sort_with_sign(idx: Sequence[int]) -> tuple[tuple[int, ...], int]:
    idx = list(idx)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


class _Rank1:
    @classmethod
    def from_list(cls, comps: Sequence[Any], n_vars: int | None = None):
        n = len(comps) if n_vars is None else n_vars
        return cls(n, {(i,): c for i, c in enumerate(comps)})

    def as_list(self) -> list[Poly]:
        return [self(i) for i in range(self.n_vars)]


class _Rank2:
    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[Any]]):
        """Build from a full skew matrix of polynomials or scalars."""
        n = len(rows)
        comps = {}
        for i in range(n):
            for j in range(n):
                a = _as_poly(n, rows[i][j])
                b = _as_poly(n, rows[j][i])
                if a + b:
                    raise ValueError(f"matrix is not skew at ({i}, {j})")
                if i < j:
                    comps[(i, j)] = a
        return cls(n, comps)

    def matrix_at(self, point: Sequence[Any]) -> Matrix:
        n = self.n_vars
        return Matrix.from_rows([[self(i, j).evaluate(point) for j in range(n)] for i in range(n)], n)

    def poly_matrix(self) -> list[list[Poly]]:
        return [[self(i, j) for j in range(self.n_vars)] for i in range(self.n_vars)]


class PolyVectorField(_Rank1, SkewTensor):
    degree = 1
    kind = "vector"


class PolyOneForm(_Rank1, SkewTensor):
    degree = 1
    kind = "form"

    @classmethod
    def exact(cls, f: Poly) -> "PolyOneForm":
        return cls.from_list(f.gradient(), f.n_vars)


class PolyBivector(_Rank2, SkewTensor):
    degree = 2
    kind = "vector"


class PolyTwoForm(_Rank2, SkewTensor):
    degree = 2
    kind = "form"


class PolyTrivector(SkewTensor):
    degree = 3
    kind = "vector"


class PolyThreeForm(SkewTensor):
    degree = 3
    kind = "form"


class PolyFourForm(SkewTensor):
    degree = 4
    kind = "form"


_FORMS = {1: PolyOneForm, 2: PolyTwoForm, 3: PolyThreeForm, 4: PolyFourForm}


def _same_n(*objs: Any) -> int:
    ns = {o.n_vars for o in objs if o is not None}
    if len(ns) != 1:
        raise ValueError(f"variable count mismatch: {sorted(ns)}")
    return ns.pop()


# ---------------------------------------------------------------------------
# brackets


def poisson_bracket(f: Poly, g: Poly, pi: PolyBivector) -> Poly:
    """``{f, g} = pi(df, dg)``."""
    n = _same_n(f, g, pi)
    df, dg = f.gradient(), g.gradient()
    out = Poly.zero(n)
    for (i, j), p in pi.comps.items():
        out = out + p * (df[i] * dg[j] - df[j] * dg[i])
    return out


def sharp(pi: PolyBivector, alpha: PolyOneForm) -> PolyVectorField:
    """``pi~(alpha)`` with components ``sum_i alpha_i pi_ij``."""
    n = _same_n(pi, alpha)
    a = alpha.as_list()
    return PolyVectorField.from_list(
        [sum((a[i] * pi(i, j) for i in range(n)), Poly.zero(n)) for j in range(n)], n
    )


def hamiltonian_vf(f: Poly, pi: PolyBivector) -> PolyVectorField:
    """``X_f = {f, .}``; as a derivation ``X_f(g) = {f, g}``."""
    _same_n(f, pi)
    return sharp(pi, PolyOneForm.exact(f))


def apply_vf(x: PolyVectorField, g: Poly) -> Poly:
    n = _same_n(x, g)
    return sum((x(i) * g.diff(i) for i in range(n)), Poly.zero(n))


def schouten_square(pi: PolyBivector) -> PolyTrivector:
    """``[pi, pi]`` computed with anticommuting symbols.

    For a bivector ``P`` written as ``sum_{i<j} P_ij xi_i xi_j`` the bracket
    with itself is ``2 sum_i (d/dxi_i P)(d/dx_i P)``.  Its value on
    ``(dx_p, dx_q, dx_r)`` is twice the jacobiator of the coordinates.
    """
    n = pi.n_vars
    s = pi._to_super()
    total = _Super(n)
    for i in range(n):
        total = total + s.odd_diff(i) * s.even_diff(i)
    return PolyTrivector._from_super(total.scale(2))


def exterior_derivative(form: SkewTensor) -> SkewTensor:
    """``d`` on forms of degree 0..3 (a Poly counts as a 0-form)."""
    if isinstance(form, Poly):
        return PolyOneForm.exact(form)
    if form.kind != "form":
        raise TypeError("exterior derivative of a non-form")
    n = form.n_vars
    s = form._to_super()
    total = _Super(n)
    for i in range(n):
        total = total + _xi(n, i) * s.even_diff(i)
    return _FORMS[form.degree + 1]._from_super(total)


def wedge3_pullback(pi: PolyBivector, phi: PolyThreeForm) -> PolyTrivector:
    """The trivector ``(a, b, c) -> phi(P a, P b, P c)`` with ``P a = pi @ a``.

    ``P`` is the map whose graph is the Dirac structure of ``pi`` (see
    :func:`graph_frame`); it is ``-pi~``.  The sign matters because the
    expression is cubic in ``P``.
    """
    n = _same_n(pi, phi)
    m = [list(r) for r in zip(*pi.poly_matrix())]  # m[p][a] = (P dx_p)_a = pi_ap
    comps = {}
    for p, q, r in itertools.combinations(range(n), 3):
        acc = Poly.zero(n)
        for (a, b, c), coef in phi.comps.items():
            # antisymmetrise phi over the six orderings of (a, b, c)
            det = (
                m[p][a] * (m[q][b] * m[r][c] - m[q][c] * m[r][b])
                - m[p][b] * (m[q][a] * m[r][c] - m[q][c] * m[r][a])
                + m[p][c] * (m[q][a] * m[r][b] - m[q][b] * m[r][a])
            )
            acc = acc + coef * det
        comps[(p, q, r)] = acc
    return PolyTrivector(n, comps)


@dataclass(frozen=True)
class TwistedCheck:
    holds: bool
    residual: PolyTrivector

    def __bool__(self) -> bool:
        return self.holds


def twisted_poisson_check(pi: PolyBivector, phi: PolyThreeForm | None = None) -> TwistedCheck:
    """Test ``1/2 [pi, pi] = (wedge^3 pi~)(phi)`` identically; ``phi`` must be closed."""
    n = pi.n_vars
    phi = PolyThreeForm(n) if phi is None else phi
    _same_n(pi, phi)
    if not exterior_derivative(phi).is_zero():
        raise ValueError("phi is not closed")
    residual = schouten_square(pi).scale(Fraction(1, 2)) - wedge3_pullback(pi, phi)
    return TwistedCheck(residual.is_zero(), residual)


# ---------------------------------------------------------------------------
# Courant bracket


def lie_bracket(x: PolyVectorField, y: PolyVectorField) -> PolyVectorField:
    n = _same_n(x, y)
    return PolyVectorField.from_list([apply_vf(x, y(j)) - apply_vf(y, x(j)) for j in range(n)], n)


def interior(x: PolyVectorField, form: SkewTensor) -> SkewTensor | Poly:
    """``i_X`` of a form: contraction in the first slot."""
    n = _same_n(x, form)
    if form.degree == 1:
        return sum((x(i) * form(i) for i in range(n)), Poly.zero(n))
    target = _FORMS[form.degree - 1]
    comps = {}
    for idx in itertools.combinations(range(n), form.degree - 1):
        comps[idx] = sum((x(i) * form(i, *idx) for i in range(n)), Poly.zero(n))
    return target(n, comps)


def lie_derivative_form(x: PolyVectorField, alpha: PolyOneForm) -> PolyOneForm:
    """``L_X alpha = i_X d alpha + d(alpha(X))``."""
    return interior(x, exterior_derivative(alpha)) + PolyOneForm.exact(interior(x, alpha))


Section = tuple[PolyVectorField, PolyOneForm]


def courant_bracket(s1: Section, s2: Section, phi: PolyThreeForm | None = None) -> Section:
    """``([X, Y], L_X b - i_Y da + phi(X, Y, .))``."""
    (x, a), (y, b) = s1, s2
    _same_n(x, a, y, b, phi)
    vec = lie_bracket(x, y)
    form = lie_derivative_form(x, b) - interior(y, exterior_derivative(a))
    if phi is not None:
        form = form + interior(y, interior(x, phi))
    return vec, form


def graph_frame(pi: PolyBivector) -> list[Section]:
    """Sections ``(pi e_i, dx_i)`` spanning the graph ``{(pi a, a)}``."""
    n = pi.n_vars
    frame = []
    for i in range(n):
        vec = PolyVectorField.from_list([pi(j, i) for j in range(n)], n)
        form = PolyOneForm(n, {(i,): Poly.const(n, 1)})
        frame.append((vec, form))
    return frame


def _graph_residual(pi: PolyBivector, section: Section) -> list[Poly]:
    vec, form = section
    n = pi.n_vars
    return [vec(k) - sum((pi(k, l) * form(l) for l in range(n)), Poly.zero(n)) for k in range(n)]


def sample_points(n: int, count: int, seed: int = 0, span: int = 5) -> list[list[Fraction]]:
    """Deterministic rational sample points from a seeded sequence."""
    rng = random.Random(seed)
    return [[Fraction(rng.randint(-span, span), rng.randint(1, 3)) for _ in range(n)] for _ in range(count)]


def frame_closure_sampled(
    frame: Sequence[Section], phi: PolyThreeForm | None, points: Iterable[Sequence[Any]]
) -> tuple[bool, list[Fraction] | None]:
    """Check at each point that brackets of frame sections stay in the span of the frame.

    A semi-decision: only the given points are examined.  Returns
    ``(closed, witness_point)``.
    """
    frame = list(frame)
    brackets = [courant_bracket(frame[i], frame[j], phi) for i in range(len(frame)) for j in range(i + 1, len(frame))]
    for pt in points:
        pt = [to_scalar(p) for p in pt]
        span_rows = [_section_at(s, pt) for s in frame]
        r = rank(span_rows)
        for br in brackets:
            if rank(span_rows + [_section_at(br, pt)]) != r:
                return False, pt
    return True, None


def _section_at(s: Section, pt: Sequence[Fraction]) -> list[Fraction]:
    vec, form = s
    n = vec.n_vars
    return [vec(i).evaluate(pt) for i in range(n)] + [form(i).evaluate(pt) for i in range(n)]


def graph_closure_check(
    pi: PolyBivector, phi: PolyThreeForm | None = None, points: int = 8, seed: int = 0
) -> bool:
    """Is the graph of ``pi`` closed under the (phi-twisted) Courant bracket?

    The residual of each frame bracket against the graph is computed exactly;
    the pointwise span test on seeded sample points runs alongside and must
    agree with the exact residuals evaluated there.
    """
    n = pi.n_vars
    frame = graph_frame(pi)
    residuals = []
    for i in range(n):
        for j in range(i + 1, n):
            residuals.extend(_graph_residual(pi, courant_bracket(frame[i], frame[j], phi)))
    closed = all(r.is_zero() for r in residuals)
    pts = sample_points(n, points, seed)
    sampled, _ = frame_closure_sampled(frame, phi, pts)
    expected = all(r.evaluate(p) == 0 for r in residuals for p in pts)
    if sampled != expected:
        raise InvariantViolation("pointwise span test disagrees with the exact graph residual")
    return closed


# ---------------------------------------------------------------------------
# Lie-Poisson structures


@dataclass(frozen=True)
class StructureConstants:
    """``[e_i, e_j] = sum_k c[i][j][k] e_k``; stored as a full n x n x n array."""

    n: int
    c: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __post_init__(self):
        c = tuple(tuple(tuple(to_scalar(v) for v in row) for row in plane) for plane in self.c)
        if len(c) != self.n or any(len(p) != self.n or any(len(r) != self.n for r in p) for p in c):
            raise ValueError("structure constants must be n x n x n")
        for i in range(self.n):
            for j in range(self.n):
                for k in range(self.n):
                    if c[i][j][k] != -c[j][i][k]:
                        raise ValueError(f"not antisymmetric at ({i}, {j}, {k})")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_brackets(cls, n: int, brackets: Mapping[tuple[int, int], Sequence[Any]]) -> "StructureConstants":
        """Give ``[e_i, e_j]`` for some ``i < j``; the rest follows by antisymmetry."""
        c = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in brackets.items():
            for k, v in enumerate(vec):
                c[i][j][k] = to_scalar(v)
                c[j][i][k] = -to_scalar(v)
        return cls(n, tuple(tuple(tuple(r) for r in p) for p in c))

    def jacobi_defect(self) -> list[tuple[int, int, int, int, Fraction]]:
        """Nonzero entries of ``[[e_i,e_j],e_k] + cyclic``."""
        n, c = self.n, self.c
        out = []
        for i, j, k in itertools.combinations(range(n), 3):
            for m in range(n):
                v = sum(
                    (c[i][j][l] * c[l][k][m] + c[j][k][l] * c[l][i][m] + c[k][i][l] * c[l][j][m] for l in range(n)),
                    ZERO,
                )
                if v:
                    out.append((i, j, k, m, v))
        return out


def lie_poisson(c: StructureConstants) -> PolyBivector:
    """Linear bivector ``{x_i, x_j} = sum_k c_ij^k x_k`` on the dual of the Lie algebra."""
    n = c.n
    xs = Poly.variables(n)
    comps = {}
    for i, j in itertools.combinations(range(n), 2):
        comps[(i, j)] = sum((xs[k] * c.c[i][j][k] for k in range(n)), Poly.zero(n))
    pi = PolyBivector(n, comps)
    if schouten_square(pi).is_zero() != (not c.jacobi_defect()):
        raise InvariantViolation("Schouten square and the Lie-algebra Jacobi identity disagree")
    return pi


# ---------------------------------------------------------------------------
# bracket on one-forms


def one_form_bracket(alpha: PolyOneForm, beta: PolyOneForm, pi: PolyBivector) -> PolyOneForm:
    """``[a, b] = L_{pi~a} b - L_{pi~b} a - d pi(a, b)``."""
    _same_n(alpha, beta, pi)
    xa, xb = sharp(pi, alpha), sharp(pi, beta)
    pab = interior(xa, beta)  # beta(pi~ alpha) = pi(alpha, beta)
    return lie_derivative_form(xa, beta) - lie_derivative_form(xb, alpha) - PolyOneForm.exact(pab)


# ---------------------------------------------------------------------------
# pointwise data


def leaf_rank(pi: PolyBivector, x: Sequence[Any]) -> int:
    """Rank of ``pi`` at ``x``: the dimension of the symplectic leaf through ``x``."""
    r = pi.matrix_at(x).rank()
    if r % 2:
        raise InvariantViolation("odd rank for a skew matrix")
    return r


def gauge_bivector_at(pi: PolyBivector, b: PolyTwoForm, x: Sequence[Any]) -> Matrix | None:
    """Gauged bivector at ``x`` or ``None`` when ``1 + B~ pi~`` is singular there.

    In the graph convention of :mod:`poissondirac.diraclin` the formula reads
    ``pi (1 + B^T pi)^-1`` for the matrices of ``pi`` and ``B``.
    """
    _same_n(pi, b)
    p, bm = pi.matrix_at(x), b.matrix_at(x)
    m = (Matrix.identity(pi.n_vars) + bm.T @ p).inverse()
    if m is None:
        return None
    out = p @ m
    if not out.is_skew():
        raise InvariantViolation("gauged bivector is not skew")
    return out


class NotAdmissible(ValueError):
    def __init__(self, which: str, point: Sequence[Fraction]):
        self.which = which
        self.point = list(point)
        super().__init__(f"{which} is not admissible: d{which} is not in pr2(L) at {[str(p) for p in point]}")


def _hamiltonian_lift(l, df: list[Fraction]) -> list[Fraction] | None:
    """Some X with (X, df) in l, or None."""
    n = l.v_dim
    basis = l.vectors()
    coeffs = solve([[b[n + i] for b in basis] for i in range(n)], df)
    if coeffs is None:
        return None
    return [sum((c * b[i] for c, b in zip(coeffs, basis)), ZERO) for i in range(n)]


def _interpolate(n: int, degree: int, values: Mapping[tuple[int, ...], Fraction]) -> Poly:
    """Polynomial of degree <= ``degree`` in each variable through the grid ``{0..degree}^n``."""
    nodes = list(range(degree + 1))
    # 1-D Lagrange basis polynomials in a single variable, then tensor them
    basis_1d: list[list[Fraction]] = []
    for k in nodes:
        coeffs = [ONE]
        denom = ONE
        for m in nodes:
            if m == k:
                continue
            coeffs = [ZERO] + coeffs
            for t in range(len(coeffs) - 1):
                coeffs[t] -= m * coeffs[t + 1]
            denom *= k - m
        basis_1d.append([c / denom for c in coeffs])
    terms: dict[Exponent, Fraction] = {}
    for idx, val in values.items():
        if not val:
            continue
        for exps in itertools.product(range(degree + 1), repeat=n):
            c = val
            for var, e in enumerate(exps):
                c *= basis_1d[idx[var]][e]
                if not c:
                    break
            if c:
                terms[exps] = terms.get(exps, ZERO) + c
    return Poly._raw(n, terms)


def admissible_bracket(
    f: Poly,
    g: Poly,
    dirac_at: Callable[[Sequence[Fraction]], Any],
    degree: int,
    check_points: int = 6,
    seed: int = 0,
) -> Poly:
    """Bracket ``{f, g} = df(X_g)`` of admissible functions for a Dirac structure.

    ``dirac_at(x)`` returns the :class:`~poissondirac.diraclin.DiracSubspace` at ``x``.
    Values are computed on the grid ``{0..degree}^n`` and interpolated;
    extra seeded points confirm the result is a polynomial of that degree.
    Each value is recomputed with a second lift of ``X_g`` shifted by the
    characteristic directions, which must not change it.
    """
    n = _same_n(f, g)
    grid = list(itertools.product(range(degree + 1), repeat=n))

    def value(pt: Sequence[Fraction]) -> Fraction:
        l = dirac_at(pt)
        dfx = [p.evaluate(pt) for p in f.gradient()]
        dgx = [p.evaluate(pt) for p in g.gradient()]
        xf = _hamiltonian_lift(l, dfx)
        if xf is None:
            raise NotAdmissible("f", pt)
        xg = _hamiltonian_lift(l, dgx)
        if xg is None:
            raise NotAdmissible("g", pt)
        v = sum((a * b for a, b in zip(dfx, xg)), ZERO)
        # characteristic vectors (K, 0) in l; shifting X_g by them must not matter
        basis = l.vectors()
        ker = nullspace([[b[n + i] for b in basis] for i in range(n)], n, ONE)
        if ker:
            shift = [sum((k[j] * basis[j][i] for k in ker for j in range(n)), ZERO) for i in range(n)]
            if sum((a * (b + s) for a, b, s in zip(dfx, xg, shift)), ZERO) != v:
                raise InvariantViolation("bracket depends on the choice of hamiltonian lift")
        # antisymmetry via the lift of f
        if v != -sum((a * b for a, b in zip(dgx, xf)), ZERO):
            raise InvariantViolation("bracket is not antisymmetric")
        return v

    values = {idx: value([Fraction(k) for k in idx]) for idx in grid}
    poly = _interpolate(n, degree, values)
    for pt in sample_points(n, check_points, seed):
        if poly.evaluate(pt) != value(pt):
            raise ValueError(f"bracket is not a polynomial of degree <= {degree} in each variable")
    return poly
