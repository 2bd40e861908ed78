import cmath
import math
import random
from fractions import Fraction

import pytest

from poissondirac.exactlin import Matrix
from poissondirac.nctorus import (
    SOnnMatrix,
    SkewParam,
    TorusElement,
    fractional_action,
    generator_relation_check,
    generators,
    n2_decide,
    orbit_bfs,
    replay,
    sonn_check,
    twisted_product,
)
from poissondirac.quadratic import QuadraticNumber, continued_fraction

Q = QuadraticNumber


def rand_param(rng: random.Random, n: int) -> SkewParam:
    return SkewParam.from_upper(
        n, {(i, j): Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for i in range(n) for j in range(i + 1, n)}
    )


def rand_element(rng: random.Random, n: int, size: int = 20) -> TorusElement:
    return TorusElement(
        n,
        {
            tuple(rng.randint(-3, 3) for _ in range(n)): complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            for _ in range(rng.randint(1, size))
        },
    )


def rand_sonn(rng: random.Random, n: int, length: int = 3) -> SOnnMatrix:
    gens = generators(n)
    g = gens[rng.randrange(len(gens))]
    for _ in range(rng.randint(0, length - 1)):
        g = gens[rng.randrange(len(gens))] @ g
    return g


# quadratic numbers -----------------------------------------------------------


def test_quadratic_parsing_and_order():
    assert Q.parse("1+sqrt2") == Q(1, 1, 2)
    assert Q.parse("sqrt(8)") == Q(0, 2, 2)
    assert Q.parse("sqrt4") == 2
    assert Q.from_json({"p": 1, "q": 1, "d": 5, "r": 2}) == Q.parse("(1+sqrt5)/2")
    assert Q.from_json(Q.parse("-3/2+5*sqrt7").to_json()) == Q.parse("-3/2+5*sqrt7")
    assert Q.parse("3-2*sqrt2") > 0 and Q.parse("1-sqrt2") < 0
    assert math.floor(Q.parse("-sqrt2")) == -2
    with pytest.raises(ValueError):
        Q.parse("sqrt2") + Q.parse("sqrt3")
    with pytest.raises(ValueError):
        Q.parse("2x")


def test_continued_fractions():
    assert continued_fraction("1/3") == ([0, 3], [])
    assert continued_fraction("sqrt2") == ([1], [2])
    assert continued_fraction("1+sqrt2") == ([], [2])
    assert continued_fraction("sqrt3") == ([1], [1, 2])
    assert continued_fraction("(1+sqrt5)/2") == ([], [1])


def test_continued_fraction_matches_exact_iteration():
    rng = random.Random(89)
    for _ in range(100):
        x = Q(Fraction(rng.randint(-20, 20), rng.randint(1, 9)), Fraction(rng.choice([-3, -1, 1, 2, 5]), rng.randint(1, 9)), rng.choice([2, 3, 5, 7, 11]))
        pre, per = continued_fraction(x)
        y, direct = x, []
        for _ in range(30):
            a = math.floor(y)
            direct.append(a)
            y = 1 / (y - a)
        assert (pre + per * 30)[:30] == direct


# twisted product ---------------------------------------------------------------


def test_unit_and_commutative_limit():
    rng = random.Random(97)
    pi = rand_param(rng, 3)
    f = rand_element(rng, 3)
    one = TorusElement.unit(3)
    assert (twisted_product(f, one, pi) - f).sup_norm() == 0
    assert (twisted_product(one, f, pi) - f).sup_norm() == 0
    zero = SkewParam.from_upper(2, {})
    u1, u2 = TorusElement.generator(2, 0), TorusElement.generator(2, 1)
    assert twisted_product(u1, u2, zero) == twisted_product(u2, u1, zero)


def test_generator_relation_sign():
    pi = SkewParam.from_theta(Fraction(1, 3))
    u1, u2 = TorusElement.generator(2, 0), TorusElement.generator(2, 1)
    lhs = twisted_product(u1, u2, pi).coeffs[(1, 1)]
    rhs = twisted_product(u2, u1, pi).coeffs[(1, 1)]
    assert abs(lhs - cmath.exp(2j * math.pi / 3) * rhs) < 1e-15
    assert abs(lhs - cmath.exp(-2j * math.pi / 3) * rhs) > 0.1


def test_relation_reports():
    assert generator_relation_check(SkewParam.from_theta(Fraction(1, 3))).max_deviation < 1e-12
    assert generator_relation_check(SkewParam.from_theta(0)).max_deviation == 0
    rng = random.Random(101)
    for _ in range(10):
        assert generator_relation_check(rand_param(rng, 3)).passed
    assert generator_relation_check(SkewParam.from_theta("sqrt2")).passed
    assert generator_relation_check(SkewParam.from_theta(0.3, tol=1e-9)).passed


def test_associativity():
    rng = random.Random(103)
    for _ in range(40):
        n = rng.randint(1, 3)
        pi = rand_param(rng, n)
        f, g, h = (rand_element(rng, n) for _ in range(3))
        left = twisted_product(twisted_product(f, g, pi, 0.7), h, pi, 0.7)
        right = twisted_product(f, twisted_product(g, h, pi, 0.7), pi, 0.7)
        assert (left - right).sup_norm() < 1e-10


def test_support_in_minkowski_sum():
    rng = random.Random(107)
    pi = rand_param(rng, 2)
    f, g = rand_element(rng, 2, 5), rand_element(rng, 2, 5)
    sums = {tuple(a + b for a, b in zip(k, l)) for k in f.support() for l in g.support()}
    assert twisted_product(f, g, pi).support() <= sums


# SO(n,n|Z) -------------------------------------------------------------------------


def test_sonn_examples():
    n = 3
    one, zero = Matrix.identity(n), Matrix.zeros(n, n)
    assert sonn_check(SOnnMatrix(n, one, zero, zero, one))
    r = Matrix.from_rows([[1, 2, 0], [0, 1, 0], [3, 6, 1]])  # det 1
    assert sonn_check(SOnnMatrix(n, r, zero, zero, r.inverse().T))
    nmat = Matrix.from_rows([[0, 2, -1], [-2, 0, 4], [1, -4, 0]])
    assert sonn_check(SOnnMatrix(n, one, nmat, zero, one))
    assert not sonn_check(SOnnMatrix(n, one, one, zero, one))  # B not skew
    half = Matrix.from_rows([[0, Fraction(1, 2), 0], [Fraction(-1, 2), 0, 0], [0, 0, 0]])
    assert not sonn_check(SOnnMatrix(n, one, half, zero, one))
    # a single-coordinate swap has determinant -1
    p = Matrix.from_rows([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert not sonn_check(SOnnMatrix(n, one - p, p, p, one - p))


def test_fractional_action_examples():
    pi = SkewParam.from_theta("sqrt2")
    gens = {g.name: g for g in generators(2)}
    one, zero = Matrix.identity(2), Matrix.zeros(2, 2)
    assert fractional_action(SOnnMatrix(2, one, zero, zero, one), pi).same_as(pi)
    assert fractional_action(gens["nu(+12)"], pi).theta() == Q.parse("1+sqrt2")
    assert fractional_action(gens["sigma(12)"], pi).theta() == Q.parse("-1/2*sqrt2")
    assert fractional_action(gens["rho(diag(-1,1..))"], pi).theta() == Q.parse("-sqrt2")
    assert fractional_action(gens["sigma(12)"], SkewParam.from_theta(0)) is None
    with pytest.raises(ValueError):
        fractional_action(SOnnMatrix(2, one, one, zero, one), pi)


def test_partial_action_compatibility():
    rng = random.Random(109)
    checked = 0
    for _ in range(150):
        n = rng.randint(1, 3)
        g1, g2 = rand_sonn(rng, n), rand_sonn(rng, n)
        pi = rand_param(rng, n)
        step = fractional_action(g1, pi)
        if step is None:
            continue
        two = fractional_action(g2, step)
        direct = fractional_action(g2 @ g1, pi)
        if two is None or direct is None:
            continue
        assert sonn_check(g2 @ g1)
        assert two.same_as(direct)
        checked += 1
    assert checked > 100


def test_float_parameters():
    pi = SkewParam.from_theta(math.sqrt(2), tol=1e-9)
    res = orbit_bfs(pi, SkewParam.from_theta(math.sqrt(2) + 1, tol=1e-9), 2)
    assert res.status == "equivalent"
    with pytest.raises(ValueError):
        SkewParam(2, ((0.0, Q(1)), (-1.0, 0.0)), 1e-9)
    with pytest.raises(ValueError):
        orbit_bfs(pi, SkewParam.from_theta("sqrt2"), 2)


# orbits ----------------------------------------------------------------------------


def test_orbit_examples():
    s2 = SkewParam.from_theta("sqrt2")
    assert orbit_bfs(s2, s2, 3).word == []
    res = orbit_bfs(s2, SkewParam.from_theta("1+sqrt2"), 3)
    assert res.status == "equivalent" and res.word == ["nu(+12)"]
    assert replay(s2, res.word).same_as(SkewParam.from_theta("1+sqrt2"))
    res = orbit_bfs(s2, SkewParam.from_theta("sqrt3"), 6)
    assert res.status == "unknown"
    assert not n2_decide("sqrt2", "sqrt3").equivalent


def test_orbit_in_dimension_three():
    rng = random.Random(113)
    pi = rand_param(rng, 3)
    target = replay(pi, ["nu(+12)", "sigma(13)", "rho(1+E21)"])
    res = orbit_bfs(pi, target, 3)
    assert res.status == "equivalent"
    assert replay(pi, res.word).same_as(target)


def test_n2_decide_examples():
    assert n2_decide("1/3", "0").equivalent
    assert n2_decide("sqrt2", "1+sqrt2").equivalent
    assert not n2_decide("sqrt2", "sqrt3").equivalent
    assert not n2_decide("sqrt2", "1/2").equivalent
    assert n2_decide("(1+sqrt5)/2", "(1-sqrt5)/2").equivalent  # the second is -1 over the first
    with pytest.raises(ValueError):
        n2_decide(0.5, "0")


def test_n2_decide_agrees_with_orbit_search():
    rng = random.Random(127)
    base = [Q.parse(s) for s in ("sqrt2", "sqrt3", "(1+sqrt5)/2", "2/7", "sqrt7")]
    gens = generators(2)
    for _ in range(40):
        t = rng.choice(base)
        word = [rng.choice(gens).name for _ in range(rng.randint(1, 4))]
        target = replay(SkewParam.from_theta(t), word)
        if target is None:
            continue
        assert n2_decide(t, target.theta()).equivalent


def test_n2_decide_equivalence_relation():
    vals = ["sqrt2", "1+sqrt2", "sqrt3", "1/3", "0", "(1+sqrt5)/2", "3-sqrt2", "sqrt8", "2+sqrt3"]
    for a in vals:
        assert n2_decide(a, a).equivalent
        for b in vals:
            ab = n2_decide(a, b).equivalent
            assert ab == n2_decide(b, a).equivalent
            for c in vals:
                if ab and n2_decide(b, c).equivalent:
                    assert n2_decide(a, c).equivalent


def test_generators_in_group():
    for n in (1, 2, 3):
        assert all(sonn_check(g) for g in generators(n))
