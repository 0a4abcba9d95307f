"""Print the bit-flip syndrome classes of the encoded Bell pair and check the rotation rule."""
import argparse

from bellqec.pauli import equivalent_mod_logical_X, syndrome
from bellqec.stabilizer import (
    bell_code_generators,
    bitflip_errors,
    build_syndrome_table,
    code_size,
    distinct_syndromes,
    product_code_generators,
    rotation_correct,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--csv", default=None, help="also write the full table here")
    args = ap.parse_args()

    k, n = args.k, code_size(args.k)
    gens = bell_code_generators(k)
    table = build_syndrome_table(k)
    print("generators:", ", ".join(gens.labels))
    if k == 1:
        for c in table.classes:
            print(f"{c.class_id:>3}  {c.representative.letters}  {c.syndrome}")
    print(f"{len(table)} classes over {1 << n} bit-flip patterns")
    print(f"product-code generators tell apart {distinct_syndromes(product_code_generators(k), bitflip_errors(n))}")

    bad = [e for e in bitflip_errors(n) if not equivalent_mod_logical_X(rotation_correct(syndrome(e, gens), k), e)]
    print(f"rotation rule exact (mod all-X) on every pattern: {not bad}")
    if args.csv:
        with open(args.csv, "w") as fh:
            table.to_csv(fh)
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
