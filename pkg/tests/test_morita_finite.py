import math
import random

import pytest

from poissondirac.morita_finite import (
    Bispace,
    CapExceeded,
    FiniteGroup,
    automorphisms,
    bispace_iso,
    groups_isomorphic,
    inner_automorphisms,
    invertibility_census,
    is_invertible,
    left_transitive_bispaces,
    outer_automorphism_order,
    picard_group,
    small_groups,
    tensor,
)


def totient(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def out_oracle(kind: str, n: int = 0) -> int:
    """|Out| from textbook formulas, independent of any search."""
    if kind == "cyclic":
        return totient(n)
    if kind == "dihedral":
        if n == 1:
            return 1  # D1 = Z2
        if n == 2:
            return 6  # D2 = Klein four
        centre = 2 if n % 2 == 0 else 1
        return n * totient(n) * centre // (2 * n)
    return {"s3": 1, "q8": 6, "klein": 6}[kind]


def test_presets_are_groups_of_the_right_shape():
    assert FiniteGroup.cyclic(7).order == 7 and FiniteGroup.cyclic(7).is_abelian()
    d6 = FiniteGroup.dihedral(6)
    assert d6.order == 12 and not d6.is_abelian()
    q8 = FiniteGroup.quaternion()
    assert sorted(q8.element_order(a) for a in range(8)) == [1, 2, 4, 4, 4, 4, 4, 4]
    assert groups_isomorphic(FiniteGroup.symmetric3(), FiniteGroup.dihedral(3))
    assert not groups_isomorphic(FiniteGroup.dihedral(4), q8)
    assert not groups_isomorphic(FiniteGroup.cyclic(4), FiniteGroup.klein())


def test_invalid_tables_rejected():
    with pytest.raises(ValueError):
        FiniteGroup([[0, 1], [1, 1]])  # 1 has no inverse
    with pytest.raises(ValueError):
        FiniteGroup([[0, 1, 2], [1, 0, 0], [2, 0, 0]])
    with pytest.raises(ValueError):
        FiniteGroup.from_spec("cyclic:x")


def test_from_spec_and_json_table():
    g = FiniteGroup.from_spec({"table": FiniteGroup.cyclic(3).to_json()["table"]})
    assert g == FiniteGroup.cyclic(3)
    assert FiniteGroup.from_spec("dihedral:5").order == 10


def test_bispace_validation():
    g = FiniteGroup.cyclic(3)
    bad_right = [[(x + 1) % 3 for _ in range(3)] for x in range(3)]
    with pytest.raises(ValueError):
        Bispace(g, g, 3, g.table, bad_right)


def _random_bispace(rng: random.Random, g: FiniteGroup, h: FiniteGroup) -> Bispace:
    return rng.choice(left_transitive_bispaces(g, h))


def test_regular_bispace_is_the_unit():
    rng = random.Random(0)
    groups = small_groups()
    for _ in range(20):
        g, h = rng.choice(groups), rng.choice(groups)
        y = _random_bispace(rng, g, h)
        assert bispace_iso(tensor(Bispace.regular(g), y), y) is not None
        assert bispace_iso(tensor(y, Bispace.regular(h)), y) is not None


@pytest.mark.parametrize("g", [FiniteGroup.cyclic(5), FiniteGroup.symmetric3(), FiniteGroup.dihedral(4)])
def test_tensor_of_twists_composes(g):
    auts = automorphisms(g)
    for q1 in auts[:6]:
        for q2 in auts[:6]:
            x, y = Bispace.from_homomorphism(g, g, q1), Bispace.from_homomorphism(g, g, q2)
            comp = [q1[q2[v]] for v in range(g.order)]
            assert bispace_iso(tensor(x, y), Bispace.from_homomorphism(g, g, comp)) is not None


def test_orbit_count_when_free():
    rng = random.Random(1)
    groups = small_groups()
    checked = 0
    while checked < 25:
        g, h, k = (rng.choice(groups) for _ in range(3))
        x, y = _random_bispace(rng, g, h), _random_bispace(rng, h, k)
        free = all(len({x.r_act[p][t] for t in range(h.order)}) == h.order for p in range(x.points))
        if free:
            assert tensor(x, y).points == x.points * y.points // h.order
            checked += 1


def test_tensor_group_mismatch():
    g, h = FiniteGroup.cyclic(2), FiniteGroup.cyclic(3)
    with pytest.raises(ValueError):
        tensor(Bispace.regular(g), Bispace.regular(h))


def test_tensor_associativity():
    rng = random.Random(2)
    groups = small_groups()
    for _ in range(30):
        g, h, k, m = (rng.choice(groups) for _ in range(4))
        x, y, z = _random_bispace(rng, g, h), _random_bispace(rng, h, k), _random_bispace(rng, k, m)
        assert bispace_iso(tensor(tensor(x, y), z), tensor(x, tensor(y, z))) is not None


def test_invertibility_examples():
    g = FiniteGroup.symmetric3()
    reg = Bispace.regular(g)
    assert is_invertible(reg)
    assert not is_invertible(reg.disjoint_union(reg))
    assert all(not is_invertible(x) for x in left_transitive_bispaces(FiniteGroup.cyclic(2), FiniteGroup.cyclic(4)))


def test_flip_is_an_involution_and_inverse():
    rng = random.Random(3)
    for _ in range(15):
        g = rng.choice(small_groups())
        x = _random_bispace(rng, g, g)
        assert bispace_iso(x.flip().flip(), x) is not None
        if is_invertible(x):
            assert bispace_iso(tensor(x, x.flip()), Bispace.regular(g)) is not None


@pytest.mark.parametrize("g", [FiniteGroup.cyclic(4), FiniteGroup.symmetric3(), FiniteGroup.dihedral(4)])
def test_twisted_bispaces_isomorphic_iff_inner(g):
    auts = automorphisms(g)
    inn = inner_automorphisms(g)
    inverse = {a: tuple(sorted(range(g.order), key=lambda v: a[v])) for a in auts}
    for q in auts:
        for q2 in auts:
            rel = tuple(q2[inverse[q][v]] for v in range(g.order))  # q2 o q^-1
            iso = bispace_iso(Bispace.from_homomorphism(g, g, q), Bispace.from_homomorphism(g, g, q2))
            assert (iso is not None) == (rel in inn)


def test_iso_rejects_different_sizes():
    g = FiniteGroup.cyclic(2)
    assert bispace_iso(Bispace.regular(g), Bispace.regular(g).disjoint_union(Bispace.regular(g))) is None


def test_iso_witness_is_equivariant():
    g = FiniteGroup.dihedral(4)
    for x in left_transitive_bispaces(g, g)[:40]:
        phi = bispace_iso(x, x.flip().flip())
        y = x.flip().flip()
        for a in range(g.order):
            for p in range(x.points):
                assert phi[x.l_act[a][p]] == y.l_act[a][phi[p]]
                assert phi[x.r_act[p][a]] == y.r_act[phi[p]][a]


@pytest.mark.parametrize(
    "spec,order",
    [("s3", 1), ("cyclic:4", 2), ("klein", 6)],
)
def test_picard_headline(spec, order):
    r = picard_group(FiniteGroup.from_spec(spec))
    assert r.order == order == r.out_order


BATTERY = (
    [("cyclic", n) for n in range(1, 13)]
    + [("dihedral", n) for n in range(1, 13)]
    + [("s3", 0), ("q8", 0), ("klein", 0)]
)


@pytest.mark.parametrize("kind,n", BATTERY)
def test_picard_matches_out(kind, n):
    g = FiniteGroup.from_spec(f"{kind}:{n}" if n else kind)
    r = picard_group(g)
    assert r.order == r.aut_order // r.inn_order == out_oracle(kind, n)
    # the class table is a group with the regular bispace as unit
    assert r.table[0] == list(range(r.order))
    for row in r.table:
        assert sorted(row) == list(range(r.order))


def test_picard_of_z4_is_z2_and_klein_is_nonabelian():
    r = picard_group(FiniteGroup.cyclic(4))
    assert r.table == [[0, 1], [1, 0]]
    r = picard_group(FiniteGroup.klein())
    t = r.table
    assert any(t[a][b] != t[b][a] for a in range(6) for b in range(6))  # GL(2, F2) = S3


def test_picard_cap():
    with pytest.raises(CapExceeded):
        picard_group(FiniteGroup.cyclic(25))
    assert picard_group(FiniteGroup.cyclic(25), cap=30).order == totient(25)


def test_aut_inn_counts():
    assert outer_automorphism_order(FiniteGroup.quaternion()) == (24, 4, 6)
    assert outer_automorphism_order(FiniteGroup.symmetric3()) == (6, 6, 1)


def test_invertibility_census():
    res = invertibility_census()
    assert res.pairs == 14 * 14
    assert res.passed, (res.disagreements[:5], res.existence_mismatches)
    # free-transitive (G,G)-bispaces on G/1 correspond to automorphisms
    assert res.invertible == sum(len(automorphisms(g)) for g in small_groups()) == 242
