"""Two-party correction of one error pattern, with and without the classical channel."""
import argparse

from bellqec.longdistance import run_protocol
from bellqec.pauli import PauliString


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("error", nargs="?", default="XXIXII")
    args = ap.parse_args()

    error = PauliString.from_str(args.error)
    k = (error.num_qubits // 2 - 1) // 2
    for cc in (True, False):
        res = run_protocol(k, error, classical_channel=cc)
        print(f"classical channel: {cc}")
        print(res.transcript_jsonl(), end="")
        for party, corr in res.corrections.items():
            print(f"  {party} applies {corr.letters}")
        print(f"  fidelity {res.fidelity:.12f}")


if __name__ == "__main__":
    main()
