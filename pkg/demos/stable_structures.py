"""Poisson structures f dx^dy on the torus that vanish transversally: their graphs and volumes."""

import math

from poissondirac.tss import (
    PlanarFunction,
    TorusFunction,
    build_graph,
    find_zero_curves,
    flow_period,
    graphs_isomorphic,
    modular_period,
    regularized_volume,
)


def describe(name: str, f: TorusFunction) -> None:
    g = build_graph(f, grid=256)
    print(f"{name}: {len(g.vertices)} leaves, {len(g.edges)} zero curves")
    for i, v in enumerate(g.vertices):
        print(f"  vertex {i}: sign {v['sign']}, genus {v['genus']}")
    for e in g.edges:
        print(f"  {e['from']} -> {e['to']}  period {e['period']:.9f}  homology {e['homology']}")


def main() -> None:
    sin_y = TorusFunction.trig(sin={(0, 1): 1.0})
    describe("sin(2 pi y)", sin_y)
    print(f"  expected period 1/(2 pi) = {1 / (2 * math.pi):.9f}")

    blob = TorusFunction.trig(const=0.5, cos={(1, 0): 1.0, (0, 1): 1.0})
    describe("1/2 + cos(2 pi x) + cos(2 pi y)", blob)

    doubled = sin_y.scale(2.0)
    print("sin vs 2 sin Morita equivalent:", graphs_isomorphic(build_graph(sin_y, 256), build_graph(doubled, 256)).isomorphic)

    circle = PlanarFunction.circle()
    (curve,) = find_zero_curves(circle, 256)
    print(f"unit circle: line integral {modular_period(curve, circle):.12f}, ODE flow {flow_period(curve, circle):.12f}")

    vol = regularized_volume(TorusFunction.trig(const=0.3, sin={(0, 1): 1.0}, cos={(0, 2): 0.4, (1, 0): 0.3}))
    print(f"regularised volume of a mixed example: {vol.value:.10f}")


if __name__ == "__main__":
    main()
