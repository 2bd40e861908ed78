import math
import random

import numpy as np
import pytest
from scipy import integrate, optimize

from poissondirac.tss import (
    NotTSS,
    PlanarFunction,
    TorusFunction,
    TSSGraph,
    build_graph,
    find_zero_curves,
    flow_period,
    graphs_isomorphic,
    modular_period,
    regularized_volume,
)

SIN_Y = TorusFunction.trig(sin={(0, 1): 1.0})
# genus-1 positive region around one contractible negative disc
BLOB = TorusFunction.trig(const=0.5, cos={(1, 0): 1.0, (0, 1): 1.0})
WAVY = TorusFunction.trig(const=0.2, sin={(0, 1): 1.0, (1, 0): 0.3})
MIXED = TorusFunction.trig(const=0.3, sin={(0, 1): 1.0}, cos={(0, 2): 0.4, (1, 0): 0.3})


def test_sin_curves_and_periods():
    curves = find_zero_curves(SIN_Y, 512)
    assert len(curves) == 2
    offsets = []
    for c in curves:
        y = c.points[:, 1]
        off = min(((0.0, np.abs(np.minimum(y, 1 - y))), (0.5, np.abs(y - 0.5))), key=lambda t: float(np.max(t[1])))
        assert np.max(off[1]) < 1e-12
        offsets.append(off[0])
    assert sorted(offsets) == [0.0, 0.5]
    for c in curves:
        assert abs(c.homology[0]) == 1 and c.homology[1] == 0
        assert c.max_residual < 1e-12
        assert c.max_step() < 2 / 512
        assert abs(modular_period(c, SIN_Y) - 1 / (2 * math.pi)) < 1e-9


def test_orientation_follows_modular_field():
    for c in find_zero_curves(WAVY, 256):
        closed = np.vstack([c.lift, c.lift[:1] + np.array(c.homology, float)])
        tangent = np.diff(closed, axis=0)
        gx, gy = WAVY.grad(c.lift[:, 0], c.lift[:, 1])
        assert np.all(tangent[:, 0] * gy - tangent[:, 1] * gx > 0)


def test_no_zeros():
    assert find_zero_curves(TorusFunction.trig(const=1.0), 64) == []
    assert find_zero_curves(TorusFunction.trig(const=2.0, sin={(1, 0): 1.0}), 128) == []


@pytest.mark.parametrize(
    "f",
    [
        TorusFunction.trig(const=0.5, cos={(0, 2): -0.5}),  # sin^2: touches zero
        TorusFunction({(1, 1): -0.25, (-1, -1): -0.25, (1, -1): 0.25, (-1, 1): 0.25}),  # sin x sin y: crossings
        TorusFunction.trig(sin={(0, 1): 0.75, (0, 3): -0.25}),  # sin^3: cubic zero
    ],
)
def test_degenerate_zero_sets_rejected(f):
    with pytest.raises(NotTSS) as info:
        find_zero_curves(f, 256)
    assert info.value.witness is not None


def test_conjugate_symmetry_enforced():
    with pytest.raises(ValueError):
        TorusFunction({(0, 1): 1.0})


def test_json_roundtrip_and_trig_form():
    f = TorusFunction.from_json({"const": 0.3, "terms": [{"k": [0, 1], "sin": 1.0}, {"k": [1, 0], "cos": 0.3}]})
    g = TorusFunction.from_json(f.to_json())
    pts = np.random.default_rng(0).random((20, 2))
    expected = 0.3 + np.sin(2 * np.pi * pts[:, 1]) + 0.3 * np.cos(2 * np.pi * pts[:, 0])
    assert np.allclose(g.value(pts[:, 0], pts[:, 1]), expected, atol=1e-14)


def test_gradient_against_finite_differences():
    rng = np.random.default_rng(1)
    p = rng.random((10, 2))
    h = 1e-6
    gx, gy = MIXED.grad(p[:, 0], p[:, 1])
    fx = (MIXED.value(p[:, 0] + h, p[:, 1]) - MIXED.value(p[:, 0] - h, p[:, 1])) / (2 * h)
    fy = (MIXED.value(p[:, 0], p[:, 1] + h) - MIXED.value(p[:, 0], p[:, 1] - h)) / (2 * h)
    assert np.allclose(gx, fx, atol=1e-6) and np.allclose(gy, fy, atol=1e-6)


def test_period_routes_agree_on_torus():
    for f in (WAVY, BLOB, MIXED):
        for c in find_zero_curves(f, 512):
            assert abs(modular_period(c, f) - flow_period(c, f)) < 1e-6


def test_period_converges_under_refinement():
    for f in (WAVY, BLOB):
        coarse = sorted(modular_period(c, f) for c in find_zero_curves(f, 256))
        fine = sorted(modular_period(c, f) for c in find_zero_curves(f, 512))
        assert all(abs(a - b) < 1e-6 for a, b in zip(coarse, fine))


@pytest.mark.parametrize("c", [0.5, 2.0, 7.25])
def test_period_scaling(c):
    base = sorted(modular_period(z, WAVY) for z in find_zero_curves(WAVY, 512))
    g = WAVY.scale(c)
    scaled = sorted(modular_period(z, g) for z in find_zero_curves(g, 512))
    assert all(abs(s - b / c) < 1e-8 for s, b in zip(scaled, base))


def test_planar_circle_period():
    f = PlanarFunction.circle()
    (c,) = find_zero_curves(f, 256)
    assert c.homology == (0, 0)
    assert abs(modular_period(c, f) - math.pi) < 1e-9
    assert abs(flow_period(c, f) - math.pi) < 1e-6


def test_graph_sin():
    g = build_graph(SIN_Y)
    assert sorted(v["genus"] for v in g.vertices) == [0, 0]
    assert len(g.edges) == 2
    assert all(abs(e["period"] - 1 / (2 * math.pi)) < 1e-6 for e in g.edges)
    pos = [i for i, v in enumerate(g.vertices) if v["sign"] == "+"]
    assert all(e["to"] in pos and e["from"] not in pos for e in g.edges)
    assert g.edges[0]["homology"] == [-x for x in g.edges[1]["homology"]]


def test_graph_four_parallel_curves_is_a_cycle():
    g = build_graph(TorusFunction.trig(sin={(0, 2): 1.0}))
    assert len(g.vertices) == 4 and len(g.edges) == 4
    assert all(v["genus"] == 0 for v in g.vertices)
    degree = [0] * 4
    for e in g.edges:
        degree[e["from"]] += 1
        degree[e["to"]] += 1
        assert abs(e["period"] - 1 / (4 * math.pi)) < 1e-6
    assert degree == [2, 2, 2, 2]


def test_graph_constant_and_genus_one_pieces():
    g = build_graph(TorusFunction.trig(const=3.0), grid=64)
    assert g.vertices == [{"genus": 1, "sign": "+"}] and g.edges == []
    g = build_graph(BLOB)
    genus = {v["sign"]: v["genus"] for v in g.vertices}
    assert genus == {"+": 1, "-": 0}


def test_sign_flip_reverses_orientation():
    for f in (SIN_Y, BLOB, WAVY):
        g, h = build_graph(f, 256), build_graph(f.scale(-1.0), 256)
        sign_g = [v["sign"] for v in g.vertices]
        sign_h = [v["sign"] for v in h.vertices]
        # component labels follow node order, so the flipped graph keeps vertex ids
        assert sign_h == ["-" if s == "+" else "+" for s in sign_g]
        assert [(e["to"], e["from"]) for e in h.edges] == [(e["from"], e["to"]) for e in g.edges]
        assert sorted(e["period"] for e in g.edges) == pytest.approx(sorted(e["period"] for e in h.edges), abs=1e-12)
        hom_g = sorted(tuple(e["homology"]) for e in g.edges)
        hom_h = sorted(tuple(-x for x in e["homology"]) for e in h.edges)
        assert hom_g == hom_h


def _relabel(g: TSSGraph, rng: random.Random) -> TSSGraph:
    perm = list(range(len(g.vertices)))
    rng.shuffle(perm)
    vertices = [None] * len(perm)
    for old, new in enumerate(perm):
        vertices[new] = dict(g.vertices[old])
    edges = [dict(e, **{"from": perm[e["from"]], "to": perm[e["to"]]}) for e in g.edges]
    rng.shuffle(edges)
    return TSSGraph(vertices, edges)


def test_isomorphism_is_an_equivalence_and_gives_witness():
    rng = random.Random(5)
    base = build_graph(TorusFunction.trig(sin={(0, 2): 1.0}), 256)
    a = _relabel(base, rng)
    b = _relabel(a, rng)
    for x, y in ((base, base), (base, a), (a, base), (a, b), (base, b)):
        res = graphs_isomorphic(x, y)
        assert res.isomorphic
        for k, e in enumerate(x.edges):
            f = y.edges[res.edge_map[k]]
            assert (res.vertex_map[e["from"]], res.vertex_map[e["to"]]) == (f["from"], f["to"])
            assert abs(e["period"] - f["period"]) < 1e-6
    ident = graphs_isomorphic(base, base)
    assert ident.vertex_map == list(range(len(base.vertices)))


def test_period_labels_are_rigid():
    g1 = build_graph(SIN_Y, 256)
    g2 = build_graph(SIN_Y.scale(2.0), 256)
    res = graphs_isomorphic(g1, g2)
    assert not res.isomorphic and "period" in res.reason


def test_orientation_matters_for_isomorphism():
    g = TSSGraph([{"genus": 0}, {"genus": 0}, {"genus": 1}], [{"from": 0, "to": 2, "period": 1.0}, {"from": 1, "to": 2, "period": 2.0}])
    h = TSSGraph([{"genus": 0}, {"genus": 0}, {"genus": 1}], [{"from": 2, "to": 0, "period": 1.0}, {"from": 1, "to": 2, "period": 2.0}])
    assert not graphs_isomorphic(g, h).isomorphic


def test_dot_output():
    dot = build_graph(SIN_Y, 128).to_dot()
    assert dot.startswith("digraph") and "->" in dot and "0.159154943" in dot
    assert "(+, genus 0)" in dot and "(-, genus 0)" in dot


def test_volume_constant_and_odd():
    assert abs(regularized_volume(TorusFunction.trig(const=4.0)).value - 0.25) < 1e-12
    assert abs(regularized_volume(SIN_Y).value) < 1e-8


def _pv_oracle(f: TorusFunction, tol: float) -> float:
    """Line-by-line principal value with Cauchy-weight quadrature (assumes f_y != 0 on the zeros)."""

    def zeros(x):
        ys = np.linspace(0, 1, 2001)
        v = f.value(np.full_like(ys, x), ys)
        return [
            optimize.brentq(lambda y: float(f.value(x, y)), ys[i], ys[i + 1], xtol=1e-15)
            for i in np.nonzero(v[:-1] * v[1:] < 0)[0]
        ]

    def line(x):
        z = sorted(zeros(x))
        total = 0.0
        for i, y0 in enumerate(z):
            prev = z[i - 1] - (1 if i == 0 else 0)
            nxt = z[(i + 1) % len(z)] + (1 if i == len(z) - 1 else 0)

            def g(y, y0=y0):
                return (y - y0) / float(f.value(x, y % 1.0))

            v, _ = integrate.quad(g, (prev + y0) / 2, (y0 + nxt) / 2, weight="cauchy", wvar=y0, epsabs=tol, epsrel=tol, limit=200)
            total += v
        return total

    return integrate.quad(line, 0, 1, epsabs=tol, epsrel=tol, limit=100)[0]


@pytest.mark.parametrize("f", [TorusFunction.trig(const=0.5, sin={(0, 1): 1.0}), MIXED])
def test_volume_against_cauchy_oracle(f):
    coarse, fine = _pv_oracle(f, 1e-7), _pv_oracle(f, 1e-10)
    assert abs(coarse - fine) < 1e-4
    res = regularized_volume(f)
    assert abs(res.value - fine) < 1e-4
    assert "principal value" in res.regularisation


def test_volume_nonconvergence_reports_tails():
    with pytest.raises(ArithmeticError) as info:
        regularized_volume(MIXED, eps_sequence=(0.3, 0.2), tol=1e-12)
    assert len(info.value.tail) == 2
