"""Linear Dirac structures: graphs, the (R, theta) description, gauge and maps."""

from poissondirac.diraclin import (
    certificate,
    from_bivector,
    from_pair,
    from_two_form,
    gauge,
    kernel,
    pullback,
    pushforward,
    to_pair,
)
from poissondirac.exactlin import Matrix


def fmt(rows) -> str:
    return "[" + ", ".join("(" + " ".join(str(v) for v in row) + ")" for row in rows) + "]"


def show(label: str, l) -> None:
    print(f"{label}: basis {fmt(l.vectors())}")


def main() -> None:
    # a degenerate bivector on Q^3: rank 2, so the structure has a one-dimensional kernel in V*
    pi = Matrix.from_rows([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], 3)
    l = from_bivector(pi)
    show("graph of pi", l)
    print("  certificate:", certificate(l)["text"])

    pair = to_pair(l)
    print(f"  range R has dimension {pair.range.dim}; theta = {fmt(pair.theta.tolist())}")
    assert from_pair(pair, 3) == l
    print("  from_pair(to_pair(L)) == L")

    # a two-form graph has full range and kernel equal to ker(omega)
    omega = Matrix.from_rows([[0, 2, 0], [-2, 0, 0], [0, 0, 0]], 3)
    print(f"kernel of the graph of omega: {fmt(kernel(from_two_form(omega)).vectors())}")

    b = Matrix.from_rows([[0, 3, 0], [-3, 0, 0], [0, 0, 0]], 3)
    gauged = gauge(l, b)
    show("gauge by B", gauged)
    print(f"  range unchanged: {gauged.range() == l.range()}")

    # projection Q^3 -> Q^2 pushes forward, then pulls back
    f = Matrix.from_rows([[1, 0, 0], [0, 1, 0]], 3)
    down = pushforward(f, l)
    show("pushforward along the projection", down)
    back = pullback(f, down)
    print(f"  pulled back again equals L: {back == l} (Ker f lies in Ker L: {kernel(l).contains([0, 0, 1])})")


if __name__ == "__main__":
    main()
