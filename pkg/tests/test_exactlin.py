import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import rand_subspace, subspaces, small_q
from poissondirac.exactlin import (
    ExactSubspace,
    Matrix,
    annihilator,
    quotient_map,
    set_max_ambient_dim,
    subspace_intersect,
    subspace_sum,
    to_scalar,
    image,
    preimage,
)


def span(vecs, n):
    return ExactSubspace.span(vecs, n)


E = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_sum_examples():
    assert subspace_sum(span([[1, 0]], 2), span([[0, 1]], 2)) == ExactSubspace.full(2)
    v = span([[1, 2, 3], [0, 1, 1]], 3)
    assert subspace_sum(v, ExactSubspace.zero(3)) == v
    assert subspace_sum(span([[1, 1, 0]], 3), span([[1, -1, 0]], 3)) == span(E[:2], 3)


def test_sum_dimension_mismatch():
    with pytest.raises(ValueError):
        subspace_sum(span([[1, 0]], 2), span([[1, 0, 0]], 3))


def test_intersect_examples():
    a = span([[1, 2, 3], [3, 2, 1]], 3)
    assert subspace_intersect(a, a) == a
    assert subspace_intersect(span([E[0]], 3), span([E[1]], 3)).dim == 0
    assert subspace_intersect(span(E[:2], 3), span(E[1:], 3)) == span([E[1]], 3)


def test_annihilator_examples():
    assert annihilator(ExactSubspace.zero(3)) == ExactSubspace.full(3)
    assert annihilator(ExactSubspace.full(3)).dim == 0
    assert annihilator(span([[1, 2]], 2)) == span([[2, -1]], 2)


def test_quotient_map_examples():
    q, d = quotient_map(3, ExactSubspace.zero(3))
    assert d == 3 and q == Matrix.identity(3)
    q, d = quotient_map(3, ExactSubspace.full(3))
    assert d == 0 and (q.rows, q.cols) == (0, 3)
    q, d = quotient_map(2, span([[1, 0]], 2))
    assert d == 1 and (q.rows, q.cols) == (1, 2)
    assert q.apply([1, 0]) == [0] and q.apply([0, 1]) != [0]


def test_canonical_form_is_rref():
    s = span([[2, 4, 6], [1, 1, 1]], 3)
    assert s.basis.tolist() == [[1, 0, -1], [0, 1, 2]]
    with pytest.raises(ValueError):
        ExactSubspace(3, Matrix.from_rows([[2, 4, 6]]))


def test_scalars_are_exact():
    assert to_scalar("-3/7") == Fraction(-3, 7)
    with pytest.raises(TypeError):
        to_scalar(0.5)


def test_json_roundtrip():
    s = span([[1, 2, 3], [0, 1, Fraction(1, 2)]], 3)
    obj = s.to_json()
    assert obj["basis"]["data"] == ["1", "0", "2", "0", "1", "1/2"]
    assert ExactSubspace.from_json(obj) == s


def test_dimension_cap():
    set_max_ambient_dim(4)
    try:
        with pytest.raises(ValueError):
            ExactSubspace.zero(5)
    finally:
        set_max_ambient_dim(64)


def test_grassmann_identity_1000_pairs():
    rng = random.Random(7)
    for _ in range(1000):
        n = rng.randint(1, 8)
        a, b = rand_subspace(rng, n), rand_subspace(rng, n)
        assert a.dim + b.dim == subspace_sum(a, b).dim + subspace_intersect(a, b).dim


@given(subspaces(), st.data())
def test_canonical_under_change_of_spanning_set(s, data):
    n = s.ambient_dim
    vecs = s.vectors()
    # random invertible recombination plus redundant vectors
    mixed = []
    for _ in range(len(vecs) + 2):
        coeffs = data.draw(st.lists(small_q, min_size=len(vecs), max_size=len(vecs)))
        mixed.append([sum((c * v[i] for c, v in zip(coeffs, vecs)), Fraction(0)) for i in range(n)])
    mixed += [[3 * x for x in v] for v in vecs]
    data.draw(st.randoms()).shuffle(mixed)
    assert span(mixed, n) == s
    assert span(mixed, n).basis.entries == s.basis.entries


@given(subspaces())
def test_double_annihilator(s):
    assert annihilator(annihilator(s)) == s
    assert annihilator(s).dim == s.ambient_dim - s.dim


@given(subspaces())
def test_quotient_kernel(s):
    q, d = quotient_map(s.ambient_dim, s)
    assert d == s.ambient_dim - s.dim and q.rank() == d
    assert all(q.apply(v) == [0] * d for v in s.vectors())


def test_image_and_preimage():
    f = Matrix.from_rows([[1, 0, 0], [0, 1, 0]])
    assert image(f, ExactSubspace.full(3)) == ExactSubspace.full(2)
    assert preimage(f, ExactSubspace.zero(2)) == span([E[2]], 3)
