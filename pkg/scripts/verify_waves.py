"""Run the property suite for several waves and print a compact summary.

    python3 scripts/verify_waves.py --heights 0 0.1 0.5
"""

import argparse

from stokeswave.properties import VerifyConfig, verify_all
from stokeswave.solver import WaveParameters, solve_stokes_wave


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda", dest="lam", type=float, default=10.0)
    ap.add_argument("--heights", type=float, nargs="+", default=[0.0, 0.1, 0.5])
    ap.add_argument("--modes", type=int, default=64)
    ap.add_argument("--no-trajectories", action="store_true")
    args = ap.parse_args()

    cfg = VerifyConfig(trajectories=not args.no_trajectories)
    for H in args.heights:
        wave = solve_stokes_wave(WaveParameters(args.lam, H, modes=args.modes))
        rep = verify_all(wave, cfg)
        status = "PASS" if rep.passed else "FAIL"
        print(f"H={H:g} wave={rep.wave_id} {status}: {len(rep.checks)} checks, "
              f"{len(rep.failures)} failed")
        for c in rep.failures:
            print(f"    {c.name}: margin {c.worst_margin:.3e} {c.reason}")


if __name__ == "__main__":
    main()
