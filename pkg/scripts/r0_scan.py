"""VMC energy of the r0-regularized state over a grid of r0, with the golden-section bracket of the minimum."""
import argparse
import sys

from anyonvmc.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="2/3")
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--grid", default="0.6:2.0:0.2")
    ap.add_argument("--steps", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default="r0_scan.json")
    a = ap.parse_args()
    sys.exit(main([
        "scan", "--alpha", a.alpha, "--n", str(a.n), "--regulator", "parametric-r0", "--grid", a.grid,
        "--steps", str(a.steps), "--seed", str(a.seed), "--format", "json", "--out", a.out,
    ]))
