"""Stable Poisson structures ``f dx^dy`` on the flat torus and their Morita invariants.

Pipeline: zero curves of f (marching squares on a periodic grid, then
Newton polishing), modular periods, the oriented graph whose vertices are
components of ``{f != 0}`` labelled by genus and whose edges are the zero
curves labelled by their periods, and the regularised volume.

Modular field.  For ``pi = f dx^dy`` and the area form ``dx^dy`` the modular
field is ``X = (f_y, -f_x)``, tangent to the zero curves.  Its period along a
curve is ``integral ds / |grad f|``.  The period is computed both as that
line integral and by timing the flow of X once around the curve.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize, sparse
from scipy.interpolate import CubicSpline
from scipy.sparse.csgraph import connected_components

__all__ = [
    "NotTSS",
    "TorusFunction",
    "PlanarFunction",
    "ZeroCurve",
    "TSSGraph",
    "IsoResult",
    "VolumeResult",
    "find_zero_curves",
    "modular_period",
    "flow_period",
    "build_graph",
    "graphs_isomorphic",
    "regularized_volume",
]

TWO_PI = 2 * math.pi


class NotTSS(ValueError):
    """Input is not a topologically stable structure (0 is not a regular value)."""

    code = "not_tss"

    def __init__(self, message: str, witness: Sequence[float] | None = None):
        super().__init__(message)
        self.witness = None if witness is None else [float(w) for w in witness]


# ---------------------------------------------------------------------------
# functions


@dataclass(frozen=True)
class TorusFunction:
    """Real trigonometric polynomial on R^2 / Z^2.

    ``fourier[(k1, k2)]`` is the coefficient of ``exp(2 pi i (k1 x + k2 y))``;
    coefficients must be conjugate-symmetric.
    """

    fourier: Mapping[tuple[int, int], complex]
    periodic: bool = field(default=True, init=False)

    def __post_init__(self):
        clean = {}
        for k, c in self.fourier.items():
            k = (int(k[0]), int(k[1]))
            if c != 0:
                clean[k] = complex(c)
        for k, c in clean.items():
            partner = clean.get((-k[0], -k[1]), 0j)
            if abs(partner - c.conjugate()) > 1e-12 * max(1.0, abs(c)):
                raise ValueError(f"coefficients are not conjugate-symmetric at {k}")
        object.__setattr__(self, "fourier", dict(sorted(clean.items())))
        ks = np.array(list(self.fourier) or [(0, 0)], dtype=float)
        cs = np.array(list(self.fourier.values()) or [0j])
        object.__setattr__(self, "_k", ks)
        object.__setattr__(self, "_c", cs)

    @classmethod
    def trig(
        cls,
        const: float = 0.0,
        cos: Mapping[tuple[int, int], float] | None = None,
        sin: Mapping[tuple[int, int], float] | None = None,
    ) -> "TorusFunction":
        """``const + sum a cos(2 pi k.x) + sum b sin(2 pi k.x)``."""
        out: dict[tuple[int, int], complex] = {}

        def add(k, v):
            out[k] = out.get(k, 0j) + v

        if const:
            add((0, 0), const)
        for k, a in (cos or {}).items():
            if tuple(k) == (0, 0):
                add((0, 0), a)
                continue
            add(tuple(k), a / 2)
            add((-k[0], -k[1]), a / 2)
        for k, b in (sin or {}).items():
            if tuple(k) == (0, 0):
                continue
            add(tuple(k), -0.5j * b)
            add((-k[0], -k[1]), 0.5j * b)
        return cls(out)

    def scale(self, c: float) -> "TorusFunction":
        return TorusFunction({k: c * v for k, v in self.fourier.items()})

    def _phases(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x, y = np.asarray(x, float), np.asarray(y, float)
        arg = TWO_PI * (np.multiply.outer(x, self._k[:, 0]) + np.multiply.outer(y, self._k[:, 1]))
        return np.exp(1j * arg) * self._c

    def value(self, x: Any, y: Any) -> np.ndarray:
        return np.real(self._phases(x, y).sum(axis=-1))

    def grad(self, x: Any, y: Any) -> tuple[np.ndarray, np.ndarray]:
        ph = self._phases(x, y) * (1j * TWO_PI)
        return np.real((ph * self._k[:, 0]).sum(axis=-1)), np.real((ph * self._k[:, 1]).sum(axis=-1))

    def hessian(self, x: Any, y: Any) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        ph = self._phases(x, y) * (-(TWO_PI**2))
        k1, k2 = self._k[:, 0], self._k[:, 1]
        return (
            np.real((ph * k1 * k1).sum(axis=-1)),
            np.real((ph * k1 * k2).sum(axis=-1)),
            np.real((ph * k2 * k2).sum(axis=-1)),
        )

    def grid_values(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """``out[i, j] = f(xs[i], ys[j])`` by separable evaluation."""
        ex = np.exp(1j * TWO_PI * np.multiply.outer(xs, self._k[:, 0]))  # (nx, m)
        ey = np.exp(1j * TWO_PI * np.multiply.outer(ys, self._k[:, 1]))  # (ny, m)
        return np.real((ex * self._c) @ ey.T)

    def to_json(self) -> dict:
        return {"fourier": [{"k": list(k), "re": v.real, "im": v.imag} for k, v in self.fourier.items()]}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "TorusFunction":
        """Accept ``{"fourier": [{"k", "re", "im"}]}`` or ``{"const", "terms": [{"k", "cos", "sin"}]}``."""
        if "fourier" in obj:
            return cls({tuple(t["k"]): complex(t.get("re", 0.0), t.get("im", 0.0)) for t in obj["fourier"]})
        cos, sin = {}, {}
        for t in obj.get("terms", []):
            k = tuple(int(v) for v in t["k"])
            if "cos" in t:
                cos[k] = cos.get(k, 0.0) + float(t["cos"])
            if "sin" in t:
                sin[k] = sin.get(k, 0.0) + float(t["sin"])
        return cls.trig(float(obj.get("const", 0.0)), cos, sin)


@dataclass(frozen=True)
class PlanarFunction:
    """A smooth function on a rectangle of the plane, for validation in a chart."""

    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    df: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    box: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)
    periodic: bool = field(default=False, init=False)

    @classmethod
    def circle(cls, radius: float = 1.0) -> "PlanarFunction":
        """``x^2 + y^2 - radius^2``."""
        r = 2.0 * radius
        return cls(
            lambda x, y: np.asarray(x) ** 2 + np.asarray(y) ** 2 - radius**2,
            lambda x, y: (2 * np.asarray(x, float), 2 * np.asarray(y, float)),
            (-r, r, -r, r),
        )

    def value(self, x: Any, y: Any) -> np.ndarray:
        return np.asarray(self.f(np.asarray(x, float), np.asarray(y, float)), float)

    def grad(self, x: Any, y: Any) -> tuple[np.ndarray, np.ndarray]:
        gx, gy = self.df(np.asarray(x, float), np.asarray(y, float))
        return np.asarray(gx, float), np.asarray(gy, float)

    def grid_values(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return self.value(gx, gy)


Surface = TorusFunction | PlanarFunction


# ---------------------------------------------------------------------------
# grid


@dataclass
class _Grid:
    n: int
    x0: float
    y0: float
    hx: float
    hy: float
    periodic: bool
    values: np.ndarray  # (n, n), values[i, j] at node (i, j)

    def node(self, i: int, j: int) -> tuple[float, float]:
        return self.x0 + i * self.hx, self.y0 + j * self.hy

    def val(self, i: int, j: int) -> float:
        if self.periodic:
            return self.values[i % self.n, j % self.n]
        return self.values[i, j]


def _make_grid(f: Surface, n: int) -> _Grid:
    if f.periodic:
        # nodes at cell centres of the standard grid, nudged off any exact zeros
        for shift in (0.5, 0.5 + 1 / math.pi, 0.5 - 1 / math.e):
            xs = (np.arange(n) + shift) / n
            vals = f.grid_values(xs, xs)
            if np.all(vals != 0):
                return _Grid(n, shift / n, shift / n, 1 / n, 1 / n, True, vals)
        raise NotTSS("grid nodes keep landing on zeros")
    x_lo, x_hi, y_lo, y_hi = f.box
    for shift in (0.0, 1 / math.pi, -1 / math.e):
        hx, hy = (x_hi - x_lo) / (n - 1), (y_hi - y_lo) / (n - 1)
        xs = x_lo + (np.arange(n) + shift * 1e-3) * hx
        ys = y_lo + (np.arange(n) + shift * 1e-3) * hy
        vals = f.grid_values(xs, ys)
        if np.all(vals != 0):
            return _Grid(n, xs[0], ys[0], hx, hy, False, vals)
    raise NotTSS("grid nodes keep landing on zeros")


# edge ids: horizontal H(i,j) = 2 (i n + j), vertical V(i,j) = 2 (i n + j) + 1
# cell (i,j) has corners c0=(i,j) c1=(i+1,j) c2=(i+1,j+1) c3=(i,j+1)
# and edges e0=H(i,j) e1=V(i+1,j) e2=H(i,j+1) e3=V(i,j)
_CELL_EDGES = ((0, 0, "H"), (1, 0, "V"), (0, 1, "H"), (0, 0, "V"))
_STEP = {0: (0, -1), 1: (1, 0), 2: (0, 1), 3: (-1, 0)}  # leaving through edge k moves to this cell


def _edge_id(n: int, i: int, j: int, kind: str) -> int:
    return 2 * ((i % n) * n + (j % n)) + (kind == "V")


def _cell_pairs(pos: Sequence[bool], values: Sequence[float]) -> list[tuple[int, int]]:
    c0, c1, c2, c3 = pos
    crossing = [k for k, (a, b) in enumerate(((c0, c1), (c1, c2), (c3, c2), (c0, c3))) if a != b]
    if len(crossing) == 2:
        return [tuple(crossing)]
    if len(crossing) == 4:
        # the saddle always keeps positive corners apart
        if c0 and c2:
            return [(0, 3), (1, 2)]
        return [(0, 1), (2, 3)]
    return []


@dataclass
class _Trace:
    lift: np.ndarray  # (m, 2) unwrapped crossing points
    homology: tuple[int, int]
    edges: list[tuple[tuple[int, int], tuple[int, int]]]  # (negative node, positive node)
    saddle_cells: list[tuple[int, int]]


def _trace(grid: _Grid) -> list[_Trace]:
    n, vals = grid.n, grid.values
    pos = vals > 0
    ncell = n if grid.periodic else n - 1
    pairs: dict[tuple[int, int, int], int] = {}  # (cell i, cell j, local edge) -> partner local edge
    saddles = set()
    for i in range(ncell):
        for j in range(ncell):
            ip, jp = (i + 1) % n, (j + 1) % n
            corners = (pos[i, j], pos[ip, j], pos[ip, jp], pos[i, jp])
            if all(corners) or not any(corners):
                continue
            cp = _cell_pairs(corners, ())
            if len(cp) == 2:
                saddles.add((i, j))
            for a, b in cp:
                pairs[(i, j, a)] = b
                pairs[(i, j, b)] = a
    used: set[tuple[int, int, int]] = set()
    traces = []
    for start in sorted(pairs):
        if start in used:
            continue
        ci, cj, k = start
        ui, uj = ci, cj  # unwrapped cell coordinates
        pts, edges, cells = [], [], []
        entry = k
        first_point = _edge_point(grid, ui, uj, entry)
        closed = False
        while True:
            key = (ui % n if grid.periodic else ui, uj % n if grid.periodic else uj, entry)
            if key in used:
                raise NotTSS("zero set is not a disjoint union of closed curves")
            used.add(key)
            exit_ = pairs[key]
            exit_key = (key[0], key[1], exit_)
            used.add(exit_key)
            if (key[0], key[1]) in saddles:
                cells.append((key[0], key[1]))
            p = _edge_point(grid, ui, uj, exit_)
            pts.append(p)
            edges.append(_edge_nodes(grid, ui, uj, exit_))
            di, dj = _STEP[exit_]
            ui, uj = ui + di, uj + dj
            entry = (exit_ + 2) % 4
            if not grid.periodic and not (0 <= ui < ncell and 0 <= uj < ncell):
                raise NotTSS("zero curve leaves the chart")
            nk = (ui % n if grid.periodic else ui, uj % n if grid.periodic else uj, entry)
            if nk == start:
                closed = True
                break
        if not closed:
            raise NotTSS("open zero curve")
        lift = np.array(pts)
        end = _edge_point(grid, ui, uj, entry)
        shift = np.array(end) - np.array(first_point)
        if grid.periodic:
            hom = (int(round(shift[0])), int(round(shift[1])))
        else:
            hom = (0, 0)
        # rotate so that the start edge comes first
        lift = np.vstack([lift[-1:] - np.array(hom, float), lift[:-1]])
        edges = edges[-1:] + edges[:-1]
        traces.append(_Trace(lift, hom, edges, cells))
    return traces


def _edge_point(grid: _Grid, ui: int, uj: int, k: int) -> tuple[float, float]:
    (ai, aj), (bi, bj) = _edge_corners(ui, uj, k)
    va, vb = grid.val(ai, aj), grid.val(bi, bj)
    t = va / (va - vb)
    xa, ya = grid.node(ai, aj)
    xb, yb = grid.node(bi, bj)
    return xa + t * (xb - xa), ya + t * (yb - ya)


def _edge_corners(ui: int, uj: int, k: int) -> tuple[tuple[int, int], tuple[int, int]]:
    return {
        0: ((ui, uj), (ui + 1, uj)),
        1: ((ui + 1, uj), (ui + 1, uj + 1)),
        2: ((ui, uj + 1), (ui + 1, uj + 1)),
        3: ((ui, uj), (ui, uj + 1)),
    }[k]


def _edge_nodes(grid: _Grid, ui: int, uj: int, k: int) -> tuple[tuple[int, int], tuple[int, int]]:
    a, b = _edge_corners(ui, uj, k)
    m = grid.n if grid.periodic else None
    a = (a[0] % m, a[1] % m) if m else a
    b = (b[0] % m, b[1] % m) if m else b
    return (a, b) if grid.values[a] < 0 else (b, a)


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True, eq=False)
class ZeroCurve:
    """A closed zero curve, oriented along the modular field.

    ``lift`` is the unwrapped polyline (first point not repeated); going once
    around adds ``homology`` to the coordinates.  ``points`` reduces it to
    the fundamental domain.
    """

    lift: np.ndarray
    homology: tuple[int, int]
    periodic: bool
    min_grad: float
    max_residual: float
    negative_node: tuple[int, int]
    positive_node: tuple[int, int]
    orientation: str = "modular"

    @property
    def points(self) -> np.ndarray:
        return np.mod(self.lift, 1.0) if self.periodic else self.lift

    def max_step(self) -> float:
        closed = np.vstack([self.lift, self.lift[:1] + np.array(self.homology, float)])
        return float(np.max(np.linalg.norm(np.diff(closed, axis=0), axis=1)))

    def to_json(self) -> dict:
        return {
            "homology": list(self.homology),
            "n_points": int(len(self.lift)),
            "start": [float(v) for v in self.points[0]],
            "min_grad": self.min_grad,
            "max_residual": self.max_residual,
        }


def _polish(f: Surface, pts: np.ndarray, tol: float, max_iter: int = 100) -> np.ndarray:
    p = pts.copy()
    for _ in range(max_iter):
        v = f.value(p[:, 0], p[:, 1])
        if np.max(np.abs(v)) < tol:
            return p
        gx, gy = f.grad(p[:, 0], p[:, 1])
        g2 = gx * gx + gy * gy
        if np.any(g2 == 0):
            bad = p[np.argmax(g2 == 0)]
            raise NotTSS("vanishing gradient on the zero set", bad)
        step = v / g2
        p = p - np.column_stack([step * gx, step * gy])
    v = f.value(p[:, 0], p[:, 1])
    worst = int(np.argmax(np.abs(v)))
    raise NotTSS(f"Newton polishing did not reach |f| < {tol:g}; zero is degenerate", p[worst])


def _grad_scale(f: Surface, grid: _Grid) -> float:
    xs = grid.x0 + np.arange(grid.n) * grid.hx
    ys = grid.y0 + np.arange(grid.n) * grid.hy
    sub = slice(None, None, max(1, grid.n // 64))
    gx, gy = f.grad(*np.meshgrid(xs[sub], ys[sub], indexing="ij"))
    return float(np.max(np.hypot(gx, gy)))


def _check_sign_preserving_zeros(f: Surface, grid: _Grid, gmax: float, near_curve: np.ndarray) -> None:
    """Reject zeros that do not change sign (invisible to marching squares)."""
    a = np.abs(grid.values)
    if gmax == 0:
        return
    h = max(grid.hx, grid.hy)
    if grid.periodic:
        neigh = [np.roll(np.roll(a, di, 0), dj, 1) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]
        is_min = np.all([a <= b for b in neigh], axis=0)
    else:
        pad = np.pad(a, 1, constant_values=np.inf)
        neigh = [pad[1 + di : 1 + di + grid.n, 1 + dj : 1 + dj + grid.n] for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]
        is_min = np.all([a <= b for b in neigh], axis=0)
    cand = np.argwhere(is_min & (a < 4 * h * gmax) & ~near_curve)
    for i, j in cand:
        x0 = np.array(grid.node(int(i), int(j)))

        def obj(p):
            v = float(f.value(p[0], p[1]))
            gx, gy = f.grad(p[0], p[1])
            return v * v, np.array([2 * v * float(gx), 2 * v * float(gy)])

        res = optimize.minimize(obj, x0, jac=True, method="BFGS", options={"gtol": 1e-14})
        if math.sqrt(max(res.fun, 0.0)) < 1e-9 and np.linalg.norm(res.x - x0) < 4 * h:
            raise NotTSS("zero of f without a sign change (degenerate zero set)", res.x)


def _check_saddles(f: Surface, grid: _Grid, cells: Iterable[tuple[int, int]], zero_tol: float) -> None:
    for i, j in cells:
        c = np.array(grid.node(i, j)) + 0.5 * np.array([grid.hx, grid.hy])
        sol = optimize.root(lambda p: np.array([float(g) for g in f.grad(p[0], p[1])]), c)
        if sol.success and np.linalg.norm(sol.x - c) < 2 * max(grid.hx, grid.hy):
            if abs(float(f.value(sol.x[0], sol.x[1]))) < zero_tol:
                raise NotTSS("critical point on the zero set (curves cross)", sol.x)


def find_zero_curves(f: Surface, grid: int = 512, curve_tol: float = 1e-12, grad_tol: float = 1e-6) -> list[ZeroCurve]:
    """Trace, polish and orient the zero curves of ``f``.

    Raises :class:`NotTSS` when 0 is not a regular value: a critical point
    on the zero set, a zero without sign change, or ``|grad f|`` below
    ``grad_tol`` (relative to the largest gradient) on a curve.
    """
    if grid < 8:
        raise ValueError("grid must be at least 8")
    g = _make_grid(f, grid)
    gmax = _grad_scale(f, g)
    traces = _trace(g)
    near = np.zeros_like(g.values, dtype=bool)
    for t in traces:
        for a, b in t.edges:
            near[a] = near[b] = True
    if g.periodic:
        near = near | np.roll(near, 1, 0) | np.roll(near, -1, 0)
        near = near | np.roll(near, 1, 1) | np.roll(near, -1, 1)
    _check_sign_preserving_zeros(f, g, gmax, near)
    curves = []
    for t in traces:
        _check_saddles(f, g, t.saddle_cells, 1e3 * curve_tol)
        lift = _polish(f, t.lift, curve_tol)
        gx, gy = f.grad(lift[:, 0], lift[:, 1])
        gn = np.hypot(gx, gy)
        if np.min(gn) < grad_tol * max(gmax, 1.0):
            raise NotTSS("gradient too small on the zero set", lift[int(np.argmin(gn))])
        hom = t.homology
        closed = np.vstack([lift, lift[:1] + np.array(hom, float)])
        tangent = np.diff(closed, axis=0)
        if np.sum(tangent[:, 0] * gy - tangent[:, 1] * gx) < 0:
            lift = np.vstack([lift[:1], lift[:0:-1] - np.array(hom, float)])
            hom = (-hom[0], -hom[1])
        neg, posn = t.edges[0]
        resid = float(np.max(np.abs(f.value(lift[:, 0], lift[:, 1]))))
        curves.append(ZeroCurve(lift, hom, g.periodic, float(np.min(gn)), resid, neg, posn))
    return curves


def _curve_spline(curve: ZeroCurve):
    lift = curve.lift
    shift = np.array(curve.homology, float)
    closed = np.vstack([lift, lift[:1] + shift])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    t = np.concatenate([[0.0], np.cumsum(seg)])
    length = t[-1]
    resid = closed - np.outer(t / length, shift)
    return CubicSpline(t, resid, bc_type="periodic"), t, shift / length


def modular_period(curve: ZeroCurve, f: Surface, nodes: int = 8) -> float:
    """``integral ds / |grad f|`` along the curve (periodic cubic spline, Gauss-Legendre per segment)."""
    spline, t, drift = _curve_spline(curve)
    gx_nodes, w_nodes = np.polynomial.legendre.leggauss(nodes)
    a, b = t[:-1], t[1:]
    mid, half = (a + b) / 2, (b - a) / 2
    ts = (mid[:, None] + half[:, None] * gx_nodes[None, :]).ravel()
    ws = (half[:, None] * w_nodes[None, :]).ravel()
    pos = spline(ts) + np.outer(ts, drift)
    vel = spline(ts, 1) + drift
    gx, gy = f.grad(pos[:, 0], pos[:, 1])
    return float(np.sum(ws * np.linalg.norm(vel, axis=1) / np.hypot(gx, gy)))


def flow_period(curve: ZeroCurve, f: Surface, rtol: float = 1e-12) -> float:
    """Time for the modular field to carry the start point once around the curve."""
    p0 = curve.lift[0].astype(float)
    target = p0 + np.array(curve.homology, float)
    gx, gy = f.grad(p0[0], p0[1])
    direction = np.array([float(gy), -float(gx)])
    direction /= np.linalg.norm(direction)
    scale = curve.max_step() * 4

    def rhs(_t, p):
        a, b = f.grad(p[0], p[1])
        return [float(b), -float(a)]

    def section(_t, p):
        return float(np.dot(p - target, direction))

    section.direction = 1.0
    t_end = 1.0 / float(np.hypot(gx, gy)) if np.hypot(gx, gy) else 1.0
    t0, y0 = 0.0, p0
    for _ in range(60):
        sol = integrate.solve_ivp(rhs, (t0, t0 + t_end), y0, method="DOP853", rtol=rtol, atol=rtol, events=section)
        for te, ye in zip(sol.t_events[0], sol.y_events[0]):
            if te > 0 and np.linalg.norm(ye - target) < scale:
                return float(te)
        t0, y0 = sol.t[-1], sol.y[:, -1]
        t_end *= 2
    raise RuntimeError("modular flow did not return to its start")


# ---------------------------------------------------------------------------
# graph


@dataclass(frozen=True)
class TSSGraph:
    """Vertices carry a genus; edges run from the f<0 side to the f>0 side of a curve."""

    vertices: list[dict]
    edges: list[dict]

    def to_json(self) -> dict:
        return {
            "vertices": [dict(v) for v in self.vertices],
            "edges": [dict(e) for e in self.edges],
            "orientation": "edges point toward the component where f > 0",
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "TSSGraph":
        return cls([dict(v) for v in obj["vertices"]], [dict(e) for e in obj["edges"]])

    def to_dot(self) -> str:
        lines = ["digraph TSS {"]
        for i, v in enumerate(self.vertices):
            sign = f'{v["sign"]}, ' if "sign" in v else ""
            lines.append(f'  v{i} [label="v{i} ({sign}genus {v["genus"]})"];')
        for e in self.edges:
            lines.append(f'  v{e["from"]} -> v{e["to"]} [label="{e["period"]:.12g}", arrowhead=normal];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _components(pos: np.ndarray) -> tuple[np.ndarray, int]:
    """Label periodic grid nodes: positive by 4-neighbours, negative by 8-neighbours."""
    n = pos.shape[0]
    idx = np.arange(n * n).reshape(n, n)
    rows, cols = [], []
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        nb = np.roll(np.roll(idx, -di, 0), -dj, 1)
        npos = np.roll(np.roll(pos, -di, 0), -dj, 1)
        if di and dj:
            mask = ~pos & ~npos  # diagonals only join negative nodes
        else:
            mask = pos == npos
        rows.append(idx[mask])
        cols.append(nb[mask])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    adj = sparse.coo_matrix((np.ones(len(r)), (r, c)), shape=(n * n, n * n))
    count, labels = connected_components(adj, directed=False)
    return labels.reshape(n, n), count


def _euler_characteristics(pos: np.ndarray, labels: np.ndarray, count: int) -> np.ndarray:
    """chi = V - E + F of the cell complex carried by each component (periodic grid)."""
    right = np.roll(pos, -1, 0)
    up = np.roll(pos, -1, 1)
    diag = np.roll(right, -1, 1)
    chi = np.bincount(labels.ravel(), minlength=count).astype(int)
    same_h = pos == right
    same_v = pos == up
    chi -= np.bincount(labels[same_h], minlength=count)
    chi -= np.bincount(labels[same_v], minlength=count)
    all_pos = pos & right & up & diag
    all_neg = ~pos & ~right & ~up & ~diag
    chi += np.bincount(labels[all_pos], minlength=count)
    chi += np.bincount(labels[all_neg], minlength=count)
    # saddle cells with a negative diagonal contribute one extra edge
    saddle_a = ~pos & ~diag & right & up  # c0, c2 negative
    saddle_b = pos & diag & ~right & ~up  # c1, c3 negative
    chi -= np.bincount(labels[saddle_a], minlength=count)
    chi -= np.bincount(np.roll(labels, -1, 0)[saddle_b], minlength=count)
    return chi


def build_graph(
    f: TorusFunction, grid: int = 512, curve_tol: float = 1e-12, grad_tol: float = 1e-6
) -> TSSGraph:
    """Genus-labelled oriented graph with modular-period edge labels."""
    if not f.periodic:
        raise ValueError("graphs are built for functions on the torus")
    curves = find_zero_curves(f, grid, curve_tol, grad_tol)
    g = _make_grid(f, grid)
    pos = g.values > 0
    labels, count = _components(pos)
    chi = _euler_characteristics(pos, labels, count)
    if int(chi.sum()) != 0:
        raise RuntimeError(f"Euler characteristics sum to {int(chi.sum())}, not 0")
    boundary = np.zeros(count, dtype=int)
    edges = []
    for c in curves:
        neg, posn = int(labels[c.negative_node]), int(labels[c.positive_node])
        if neg == posn:
            raise RuntimeError("a zero curve has the same component on both sides")
        boundary[neg] += 1
        boundary[posn] += 1
        edges.append({"from": neg, "to": posn, "period": modular_period(c, f), "homology": list(c.homology)})
    vertices = []
    for v in range(count):
        twice = 2 - int(chi[v]) - int(boundary[v])
        if twice % 2 or twice < 0:
            raise RuntimeError(f"inconsistent genus for component {v}: chi={chi[v]}, b={boundary[v]}")
        vertices.append({"genus": twice // 2, "sign": "+" if pos[labels == v].any() else "-"})
    return TSSGraph(vertices, edges)


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    vertex_map: list[int] | None = None
    edge_map: list[int] | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return {"morita_equivalent": self.isomorphic, "vertex_map": self.vertex_map, "edge_map": self.edge_map, "reason": self.reason}


def _matched(p: list[float], q: list[float], tol: float) -> bool:
    return len(p) == len(q) and all(abs(a - b) <= tol for a, b in zip(sorted(p), sorted(q)))


def graphs_isomorphic(g1: TSSGraph, g2: TSSGraph, period_tol: float = 1e-6) -> IsoResult:
    """Backtracking search for an isomorphism of labelled oriented graphs."""
    n = len(g1.vertices)
    if n != len(g2.vertices):
        return IsoResult(False, reason="different numbers of vertices")
    if len(g1.edges) != len(g2.edges):
        return IsoResult(False, reason="different numbers of edges")
    if sorted(v["genus"] for v in g1.vertices) != sorted(v["genus"] for v in g2.vertices):
        return IsoResult(False, reason="genus labels differ")
    if not _matched([e["period"] for e in g1.edges], [e["period"] for e in g2.edges], period_tol):
        return IsoResult(False, reason="period labels differ")

    def between(g: TSSGraph) -> dict[tuple[int, int], list[int]]:
        out: dict[tuple[int, int], list[int]] = {}
        for k, e in enumerate(g.edges):
            out.setdefault((e["from"], e["to"]), []).append(k)
        return out

    b1, b2 = between(g1), between(g2)

    def periods(g, b, key):
        return [g.edges[k]["period"] for k in b.get(key, [])]

    def signature(g, b, v):
        outs = sorted(e["period"] for e in g.edges if e["from"] == v)
        ins = sorted(e["period"] for e in g.edges if e["to"] == v)
        return g.vertices[v]["genus"], outs, ins

    sig1 = [signature(g1, b1, v) for v in range(n)]
    sig2 = [signature(g2, b2, v) for v in range(n)]

    def compatible(u, w):
        return sig1[u][0] == sig2[w][0] and _matched(sig1[u][1], sig2[w][1], period_tol) and _matched(sig1[u][2], sig2[w][2], period_tol)

    order = sorted(range(n), key=lambda v: -len(sig1[v][1]) - len(sig1[v][2]))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(u, w):
        for a, b in mapping.items():
            if not _matched(periods(g1, b1, (u, a)), periods(g2, b2, (w, b)), period_tol):
                return False
            if not _matched(periods(g1, b1, (a, u)), periods(g2, b2, (b, w)), period_tol):
                return False
        return True

    def search(k: int) -> bool:
        if k == n:
            return True
        u = order[k]
        for w in sorted(range(n), key=lambda w: w != u):  # identity first
            if w in used or not compatible(u, w) or not consistent(u, w):
                continue
            mapping[u] = w
            used.add(w)
            if search(k + 1):
                return True
            del mapping[u]
            used.discard(w)
        return False

    if not search(0):
        return IsoResult(False, reason="no label-preserving vertex bijection")
    vmap = [mapping[v] for v in range(n)]
    emap = [-1] * len(g1.edges)
    for key, ks in b1.items():
        target = b2[(mapping[key[0]], mapping[key[1]])]
        ks_sorted = sorted(ks, key=lambda k: g1.edges[k]["period"])
        t_sorted = sorted(target, key=lambda k: g2.edges[k]["period"])
        for a, b in zip(ks_sorted, t_sorted):
            emap[a] = b
    return IsoResult(True, vmap, emap, "labelled graphs are isomorphic")


# ---------------------------------------------------------------------------
# volume


@dataclass(frozen=True)
class VolumeResult:
    value: float
    estimates: list[float]
    extrapolated: list[float]
    regularisation: str = "principal value: limit of the integral of 1/f over |f| > eps"

    def to_json(self) -> dict:
        return {"value": self.value, "estimates": self.estimates, "extrapolated": self.extrapolated, "regularisation": self.regularisation}


def _line_integral(g: Callable[[np.ndarray], np.ndarray], eps: float, samples: int) -> float:
    """``integral over [0,1) of 1/g where |g| > eps`` for a periodic g."""
    ys = np.linspace(0.0, 1.0, samples + 1)
    vals = g(ys)
    cuts = [0.0, 1.0]
    for level in (eps, -eps):
        d = vals - level
        idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
        for i in idx:
            cuts.append(optimize.brentq(lambda y: float(g(np.array([y]))[0]) - level, ys[i], ys[i + 1], xtol=1e-15))
        cuts.extend(ys[:-1][d[:-1] == 0])
    cuts = sorted(set(cuts))
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 1e-15:
            continue
        mid = float(g(np.array([(a + b) / 2]))[0])
        if abs(mid) <= eps:
            continue
        val, _ = integrate.quad(lambda y: 1.0 / float(g(np.array([y]))[0]), a, b, limit=200, epsabs=1e-13, epsrel=1e-12)
        total += val
    return total


def _extrapolate_odd(xs: Sequence[float], ys: Sequence[float]) -> list[float]:
    """Successive estimates of ``I0`` from ``I(eps) = I0 + c1 eps + c3 eps^3 + ...``.

    The k-th estimate fits the first k samples exactly.  Only odd powers
    appear because the symmetric cut ``|f| > eps`` removes the even part.
    """
    out = []
    for k in range(1, len(xs) + 1):
        a = np.array([[1.0] + [x ** (2 * j + 1) for j in range(k - 1)] for x in xs[:k]])
        out.append(float(np.linalg.solve(a, np.array(ys[:k], float))[0]))
    return out


def regularized_volume(
    f: TorusFunction,
    eps_sequence: Sequence[float] = (0.04, 0.02, 0.01, 0.005),
    nx: int = 96,
    samples: int = 512,
    tol: float = 1e-6,
) -> VolumeResult:
    """Principal-value volume ``lim integral_{|f|>eps} dA / f``, extrapolated in eps.

    Raises ``ArithmeticError`` carrying the tail estimates when the last two
    extrapolations differ by more than ``tol``.
    """
    eps_sequence = [float(e) for e in eps_sequence]
    if len(eps_sequence) < 2 or any(e <= 0 for e in eps_sequence):
        raise ValueError("need at least two positive eps values")
    xs = np.arange(nx) / nx
    estimates = []
    for eps in eps_sequence:
        line = [_line_integral(lambda y, x=x: f.value(np.full_like(y, x), y), eps, samples) for x in xs]
        estimates.append(float(np.mean(line)))  # trapezoid rule for a periodic integrand
    extrap = _extrapolate_odd(eps_sequence, estimates)
    if abs(extrap[-1] - extrap[-2]) > tol:
        err = ArithmeticError(f"volume did not converge: tail estimates {extrap[-2]:.3e}, {extrap[-1]:.3e}")
        err.tail = extrap[-2:]
        raise err
    return VolumeResult(float(extrap[-1]), estimates, extrap)


def load_function(obj: Mapping[str, Any] | str) -> TorusFunction:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return TorusFunction.from_json(obj)
