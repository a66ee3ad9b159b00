"""alpha_* and j'_{alpha_*} for every reduced fraction p/q <= alpha_max with q <= q_max."""
import argparse
import sys

from anyonvmc.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q-max", type=int, default=24)
    ap.add_argument("--alpha-max", default="2")
    ap.add_argument("--out", default="fig1_sweep.csv")
    a = ap.parse_args()
    sys.exit(main(["fractionality", "--sweep", "--q-max", str(a.q_max), "--alpha-max", a.alpha_max, "--format", "csv", "--out", a.out]))
