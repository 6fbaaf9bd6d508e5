"""Optimal last-pulse detuning against T_R, skipping points next to the pole."""
import argparse
import sys

import numpy as np

from cgi_sim import FslConfig, SingularityError, fsl_phase, optimal_detuning
from cgi_sim.output import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--v0", type=float, default=5.0)
    ap.add_argument("--g", type=float, default=9.81)
    ap.add_argument("--points", type=int, default=200)
    args = ap.parse_args()
    rows = []
    for T in np.linspace(0.01, 1.0, args.points):
        cfg = FslConfig(v0=args.v0, T_R=float(T))
        try:
            delta, nu, pole = optimal_detuning(cfg, args.g)
        except SingularityError:
            continue
        rows.append([T, delta, nu, fsl_phase(cfg, 0.0, args.g)[0]])
    write_csv(sys.stdout, ["T_R_s", "delta_det", "nu_det_hz", "fsl_time_dependent_rad"], rows,
              [f"pole_T_R_s = {pole:.17g}"])


if __name__ == "__main__":
    main()
