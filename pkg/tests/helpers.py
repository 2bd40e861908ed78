"""Shared random generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from poissondirac.exactlin import ExactSubspace, Matrix

small_q = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def rand_q(rng: random.Random, span: int = 3, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def rand_matrix(rng: random.Random, rows: int, cols: int, sparsity: float = 0.3) -> Matrix:
    return Matrix.from_rows(
        [[rand_q(rng) if rng.random() > sparsity else 0 for _ in range(cols)] for _ in range(rows)], cols
    )


def rand_skew(rng: random.Random, n: int, sparsity: float = 0.3) -> Matrix:
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() > sparsity:
                m[i][j] = rand_q(rng)
                m[j][i] = -m[i][j]
    return Matrix.from_rows(m, n)


def rand_subspace(rng: random.Random, n: int, k: int | None = None) -> ExactSubspace:
    k = rng.randint(0, n) if k is None else k
    return ExactSubspace.span(rand_matrix(rng, k, n).tolist(), n)


@st.composite
def subspaces(draw, max_dim: int = 6):
    n = draw(st.integers(1, max_dim))
    k = draw(st.integers(0, n))
    vecs = draw(st.lists(st.lists(small_q, min_size=n, max_size=n), min_size=k, max_size=k))
    return ExactSubspace.span(vecs, n)


@st.composite
def skew_matrices(draw, n: int | None = None, max_dim: int = 5):
    n = draw(st.integers(1, max_dim)) if n is None else n
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = draw(small_q)
            m[j][i] = -m[i][j]
    return Matrix.from_rows(m, n)


# --- polynomial helpers ------------------------------------------------------

from poissondirac.multivec import Poly, PolyBivector, PolyTwoForm, poisson_bracket  # noqa: E402


def rand_poly(rng: random.Random, n: int, max_deg: int = 3, terms: int = 3) -> Poly:
    out = {}
    for _ in range(rng.randint(0, terms)):
        e = [0] * n
        for _ in range(rng.randint(0, max_deg)):
            e[rng.randrange(n)] += 1
        out[tuple(e)] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return Poly(n, out)


def rand_bivector(rng: random.Random, n: int, max_deg: int = 3, terms: int = 2) -> PolyBivector:
    return PolyBivector(n, {(i, j): rand_poly(rng, n, max_deg, terms) for i in range(n) for j in range(i + 1, n)})


def rand_two_form(rng: random.Random, n: int, max_deg: int = 2, terms: int = 2) -> PolyTwoForm:
    return PolyTwoForm(n, {(i, j): rand_poly(rng, n, max_deg, terms) for i in range(n) for j in range(i + 1, n)})


def jacobiator(pi: PolyBivector, i: int, j: int, k: int) -> Poly:
    """``{{x_i,x_j},x_k} + cyclic`` computed straight from the bracket."""
    xs = Poly.variables(pi.n_vars)

    def br(a, b):
        return poisson_bracket(a, b, pi)

    return br(br(xs[i], xs[j]), xs[k]) + br(br(xs[j], xs[k]), xs[i]) + br(br(xs[k], xs[i]), xs[j])


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Poly.zero(a[0][0].n_vars)) for j in range(n)] for i in range(n)]


def twisted_instance(rng: random.Random, n: int = 4):
    """A nondegenerate polynomial bivector with polynomial inverse.

    ``pi = E pi0 E^T`` for a random unipotent upper-triangular polynomial E.
    Returns ``(pi, omega)`` with ``omega = -pi^-1``.
    """
    const = lambda v: Poly.const(n, v)  # noqa: E731
    pi0 = [[const(0)] * n for _ in range(n)]
    for a in range(0, n - 1, 2):
        pi0[a][a + 1], pi0[a + 1][a] = const(1), const(-1)
    e = [[const(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            e[i][j] = rand_poly(rng, n, max_deg=1, terms=2)
    nil = [[e[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    einv = [[const(int(i == j)) for j in range(n)] for i in range(n)]
    power = [row[:] for row in einv]
    for k in range(1, n):
        power = _matmul(power, nil)
        sign = -1 if k % 2 else 1
        einv = [[einv[i][j] + power[i][j] * sign for j in range(n)] for i in range(n)]
    t = lambda m: [list(r) for r in zip(*m)]  # noqa: E731
    pi = _matmul(_matmul(e, pi0), t(e))
    pi0_inv = [[-v for v in r] for r in pi0]
    pi_inv = _matmul(_matmul(t(einv), pi0_inv), einv)
    return PolyBivector.from_matrix(pi), PolyTwoForm.from_matrix([[-v for v in r] for r in pi_inv])


# --- acceptance reporting ------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []
