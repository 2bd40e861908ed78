"""Self-Morita equivalences of small groups: bispaces, the Picard table and the census."""

from poissondirac.morita_finite import FiniteGroup, invertibility_census, picard_group


def main() -> None:
    for spec in ("s3", "cyclic:4", "klein", "q8", "dihedral:4", "cyclic:8"):
        r = picard_group(FiniteGroup.from_spec(spec))
        print(f"{spec:>10}: |Pic| = {r.order}, |Aut| = {r.aut_order}, |Inn| = {r.inn_order}")

    r = picard_group(FiniteGroup.klein())
    print("multiplication table of Pic(Z2 x Z2), which is S3:")
    for row in r.table:
        print("  ", " ".join(str(v) for v in row))

    census = invertibility_census()
    print(
        f"census over {census.pairs} ordered pairs of groups of order <= 8: "
        f"{census.bispaces} transitive bispaces, {census.invertible} invertible, "
        f"{'no' if census.passed else len(census.disagreements)} disagreements"
    )


if __name__ == "__main__":
    main()
