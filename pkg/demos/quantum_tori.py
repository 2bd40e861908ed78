"""Quantum tori: the generator relation, orbit search and the two-dimensional decision."""

from fractions import Fraction

from poissondirac.nctorus import SkewParam, generator_relation_check, n2_decide, orbit_bfs, replay


def main() -> None:
    pi = SkewParam.from_upper(3, {(0, 1): Fraction(1, 3), (0, 2): "sqrt2", (1, 2): Fraction(-2, 5)})
    report = generator_relation_check(pi)
    print(f"u_j u_k = e^(2 pi i pi_jk) u_k u_j for a 3x3 parameter: max deviation {report.max_deviation:.1e}")

    for a, b in (("sqrt2", "1+sqrt2"), ("sqrt2", "(1+sqrt2)/3"), ("sqrt2", "sqrt3"), (Fraction(2, 7), 0)):
        d = n2_decide(a, b)
        print(f"theta = {a} vs {b}: {d.verdict} ({d.reason})")

    start, target = SkewParam.from_theta("sqrt2"), SkewParam.from_theta("sqrt2-1")
    res = orbit_bfs(start, target, depth=4)
    print(f"orbit search sqrt2 -> sqrt2 - 1: {res.status} after {res.explored} points, word {res.word}")
    if res.word is not None:
        print(f"  replaying the word lands on the target: {replay(start, res.word).same_as(target)}")


if __name__ == "__main__":
    main()
