"""Sampler check on the exact two-anyon ground state: the estimate must reproduce E = (2 + alpha) omega."""
import argparse

from anyonvmc.energy import two_anyon_energy
from anyonvmc.vmc import estimate_energy, oracle_model

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--steps", type=int, default=7814)
    ap.add_argument("--walkers", type=int, default=64)
    ap.add_argument("--chains", type=int, default=4)
    ap.add_argument("--seed", type=int, default=606)
    a = ap.parse_args()
    est = estimate_energy(oracle_model(a.alpha), steps=a.steps, seed=a.seed, n_chains=a.chains, walkers=a.walkers, measure_every=2)
    exact = two_anyon_energy(a.alpha)
    print(f"estimate {est.mean:.12f} +- {est.std_error:.2e}  exact {exact:.12f}  samples {est.n_samples}  acceptance {est.acceptance_rate:.3f}")
