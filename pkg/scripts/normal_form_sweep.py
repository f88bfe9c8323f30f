"""First spectrum of the 2x2 normal form on a (rho, phi) grid, with a coarse simulation check."""

import argparse

import numpy as np

from angular_spectra.models.simple import make_normal_form
from angular_spectra.normalform import sweep_csv, sweep_sigma1
from angular_spectra.system import angle_series_batch


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--rho", type=int, default=10, help="grid points in rho on [0.05, 1]")
    p.add_argument("--phi", type=int, default=12, help="grid points in phi on [0.065, pi/2]")
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--out", default="sweep.csv")
    args = p.parse_args()
    rho = np.linspace(0.05, 1.0, args.rho)
    phi = np.linspace(0.065, np.pi / 2, args.phi)
    rows = sweep_sigma1(rho, phi)
    with open(args.out, "w", newline="") as fh:
        fh.write(sweep_csv(rows))
    beta = np.linspace(0, np.pi, 16, endpoint=False)
    V = np.stack([np.cos(beta), np.sin(beta)], axis=1)[:, :, None]
    # simulated line averages must stay inside [spec_min, spec_max]
    worst = 0.0
    for r, f, _, lo, hi in rows[::7]:
        sim = angle_series_batch(make_normal_form(r, f), V, args.steps).mean(axis=1)
        worst = max(worst, float(lo - sim.min()), float(sim.max() - hi))
    print(f"{len(rows)} rows -> {args.out}; worst excursion of simulated averages {worst:.2e}")


if __name__ == "__main__":
    main()
