"""Wave speed, surface drift and convergence against steepness, via continuation.

Prints one row per height and shows where a given truncation N stops converging.

    python3 scripts/steepness_study.py --modes 64 128
"""

import argparse

import numpy as np

from stokeswave.errors import NoConvergence
from stokeswave.field import check_governing_equations
from stokeswave.solver import WaveParameters, continuation_sweep, linear_phase_speed
from stokeswave.trajectories import drift


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda", dest="lam", type=float, default=10.0)
    ap.add_argument("--modes", type=int, nargs="+", default=[64, 128])
    ap.add_argument("--max-steepness", type=float, default=0.12)
    ap.add_argument("--steps", type=int, default=12)
    args = ap.parse_args()

    heights = np.linspace(0.01, args.max_steepness, args.steps) * args.lam
    c0 = linear_phase_speed(args.lam)
    for N in args.modes:
        print(f"N={N}")
        print(f"{'H/lambda':>9} {'c/c0':>14} {'drift(0)/lambda':>16} {'|b_N/b_1|':>10} {'CR':>9}")
        try:
            waves = continuation_sweep(WaveParameters(args.lam, heights[0], modes=N), heights)
        except NoConvergence as err:
            waves = list(err.waves)
            print(f"  stopped at H={err.height:.3f}: {str(err).splitlines()[0]}")
        for w in waves:
            gov = check_governing_equations(w, nq=32, np_=32)
            print(f"{w.steepness:9.4f} {w.c / c0:14.10f} {drift(w, 0.0).drift / args.lam:16.3e} "
                  f"{abs(w.b[-1] / w.b[0]):10.1e} {max(gov.irrotationality, gov.incompressibility):9.1e}")


if __name__ == "__main__":
    main()
