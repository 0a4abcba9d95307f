"""Compare the published bipartite success coefficients with exhaustive enumeration."""
import argparse

from bellqec.repetition import adjudicate_coefficients, polynomial_fidelity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--p", type=float, default=0.1)
    args = ap.parse_args()

    for k in args.k:
        for kind in ("bell", "product"):
            rep = adjudicate_coefficients(k, kind)
            print("\n".join(rep.lines()))
            f_pub = polynomial_fidelity(rep.published, args.p)
            f_enum = polynomial_fidelity(rep.enumerated, args.p)
            print(f"  F({args.p}): published {f_pub:.6f}  enumerated {f_enum:.6f}")


if __name__ == "__main__":
    main()
