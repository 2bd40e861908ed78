"""Invariant battery run by ``poissondirac selftest``: one suite per module, fixed seed."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .config import Config


@dataclass(frozen=True)
class SuiteResult:
    module: str
    check: str
    passed: bool
    detail: str
    seconds: float

    def to_json(self) -> dict:
        # timings are left out so that reports are byte-identical across runs
        return {"module": self.module, "check": self.check, "passed": self.passed, "detail": self.detail}


def _q(rng: random.Random, span: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, 3))


def _skew(rng: random.Random, n: int) -> list[list[Fraction]]:
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = _q(rng)
            m[i][j], m[j][i] = v, -v
    return m


def _exactlin(rng: random.Random, cfg: Config) -> tuple[bool, str]:
    from .exactlin import ExactSubspace, subspace_intersect, subspace_sum

    for _ in range(50):
        n = rng.randint(1, 5)
        u = ExactSubspace.span([[_q(rng) for _ in range(n)] for _ in range(rng.randint(0, n))], n)
        w = ExactSubspace.span([[_q(rng) for _ in range(n)] for _ in range(rng.randint(0, n))], n)
        if subspace_sum(u, w).dim + subspace_intersect(u, w).dim != u.dim + w.dim:
            return False, "Grassmann identity failed"
    return True, "dim(U+W) + dim(U^W) = dim U + dim W on 50 pairs"


def _diraclin(rng: random.Random, cfg: Config) -> tuple[bool, str]:
    from .diraclin import from_bivector, from_pair, from_two_form, gauge, to_pair
    from .exactlin import Matrix

    for _ in range(40):
        n = rng.randint(1, 4)
        p = Matrix.from_rows(_skew(rng, n), n)
        for l in (from_bivector(p), from_two_form(p)):
            if from_pair(to_pair(l), n) != l:
                return False, "from_pair(to_pair(L)) != L"
        b1, b2 = Matrix.from_rows(_skew(rng, n), n), Matrix.from_rows(_skew(rng, n), n)
        l = from_bivector(p)
        if gauge(gauge(l, b2), b1) != gauge(l, b1 + b2):
            return False, "gauge composition failed"
    return True, "graphs are Dirac, (R, theta) roundtrip and gauge composition on 40 instances"


def _multivec(rng: random.Random, cfg: Config) -> tuple[bool, str]:
    from .multivec import Poly, PolyBivector, StructureConstants, lie_poisson, poisson_bracket, schouten_square

    so3 = StructureConstants.from_brackets(3, {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]})
    if not schouten_square(lie_poisson(so3)).is_zero():
        return False, "so(3) Lie-Poisson failed"
    non_lie = StructureConstants.from_brackets(3, {(0, 1): [1, 0, 0], (1, 2): [0, 1, 0]})
    if schouten_square(lie_poisson(non_lie)).is_zero():
        return False, "non-Lie constants passed"
    for _ in range(10):
        n = rng.randint(2, 3)
        xs = Poly.variables(n)
        comps = {}
        for i in range(n):
            for j in range(i + 1, n):
                comps[(i, j)] = sum((xs[k] * _q(rng) for k in range(n)), Poly.const(n, _q(rng)))
        pi = PolyBivector(n, comps)
        t = schouten_square(pi)
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    jac = (
                        poisson_bracket(poisson_bracket(xs[i], xs[j], pi), xs[k], pi)
                        + poisson_bracket(poisson_bracket(xs[j], xs[k], pi), xs[i], pi)
                        + poisson_bracket(poisson_bracket(xs[k], xs[i], pi), xs[j], pi)
                    )
                    if t(i, j, k) != jac * 2:
                        return False, "Schouten square differs from twice the jacobiator"
    return True, "so(3) passes, non-Lie fails, Schouten = 2 jacobiator on 10 bivectors"


def _nctorus(rng: random.Random, cfg: Config) -> tuple[bool, str]:
    from .nctorus import SkewParam, generator_relation_check, n2_decide

    for _ in range(20):
        n = rng.randint(2, 4)
        pi = SkewParam.from_upper(n, {(i, j): _q(rng) for i in range(n) for j in range(i + 1, n)})
        if not generator_relation_check(pi, cfg.tol("relation")).passed:
            return False, "generator relation failed"
    expected = [(("1/3", "0"), True), (("sqrt2", "1+sqrt2"), True), (("sqrt2", "sqrt3"), False)]
    for (a, b), want in expected:
        if n2_decide(a, b).equivalent != want:
            return False, f"n = 2 decision wrong for {a}, {b}"
    return True, "generator relations on 20 parameters, three n = 2 decisions"


def _tss(rng: random.Random, cfg: Config) -> tuple[bool, str]:
    from .tss import PlanarFunction, TorusFunction, build_graph, find_zero_curves, flow_period, modular_period

    g = build_graph(TorusFunction.trig(sin={(0, 1): 1.0}), grid=256)
    if len(g.vertices) != 2 or any(abs(e["period"] - 1 / (2 * math.pi)) > cfg.tol("period") for e in g.edges):
        return False, "sin(2 pi y) graph wrong"
    circle = PlanarFunction.circle()
    (c,) = find_zero_curves(circle, 128)
    if abs(modular_period(c, circle) - flow_period(c, circle)) > cfg.tol("period"):
        return False, "period routes disagree on the circle"
    return True, "sin(2 pi y) graph and the planar circle period"


def _morita(rng: random.Random, cfg: Config) -> tuple[bool, str]:
    from .morita_finite import FiniteGroup, picard_group

    for spec, order in (("s3", 1), ("cyclic:4", 2), ("klein", 6)):
        if picard_group(FiniteGroup.from_spec(spec), cfg.cap("group_order")).order != order:
            return False, f"Pic({spec}) wrong"
    return True, "Pic(S3) = 1, Pic(Z4) = 2, Pic(Z2xZ2) = 6"


SUITES: list[tuple[str, str, Callable[[random.Random, Config], tuple[bool, str]]]] = [
    ("exactlin", "subspace lattice", _exactlin),
    ("diraclin", "linear Dirac structures", _diraclin),
    ("multivec", "Jacobi and Schouten", _multivec),
    ("nctorus", "quantum torus", _nctorus),
    ("tss", "stable structures", _tss),
    ("morita_finite", "Picard groups", _morita),
]


def run_selftest(cfg: Config) -> list[SuiteResult]:
    out = []
    for module, check, fn in SUITES:
        rng = random.Random(cfg.seed)
        start = time.perf_counter()
        try:
            ok, detail = fn(rng, cfg)
        except Exception as exc:  # a crashing suite is reported, not propagated
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(SuiteResult(module, check, ok, detail, time.perf_counter() - start))
    return out
