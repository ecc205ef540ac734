"""Sweep every functional over the default p-grid for a few heights and write CSVs.

    python3 scripts/energy_sweep.py --out runs/energy
"""

import argparse
from pathlib import Path

from stokeswave.export import write_csv
from stokeswave.functionals import default_p_grid, functional_sweep
from stokeswave.solver import WaveParameters, save_wave, solve_stokes_wave

SETS = {"mu_s": (-2, -1, -0.5, 0.5, 1, 2), "mu_s_root": (1, 2), "E_s": (-1, 0, 1, 2),
        "Emov_s": (-1, 0, 1, 2, 3), "T": (1,), "drift": (1,), "E_total": (1,)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda", dest="lam", type=float, default=10.0)
    ap.add_argument("--heights", type=float, nargs="+", default=[0.1, 0.3, 0.5])
    ap.add_argument("--modes", type=int, default=64)
    ap.add_argument("--out", default="runs/energy")
    args = ap.parse_args()

    for H in args.heights:
        wave = solve_stokes_wave(WaveParameters(args.lam, H, modes=args.modes))
        out = Path(args.out) / f"H={H:g}"
        out.mkdir(parents=True, exist_ok=True)
        save_wave(wave, out / "wave.json")
        grid = default_p_grid(wave)
        for kind, svals in SETS.items():
            for s in svals:
                curve = functional_sweep(wave, kind, float(s), grid)
                write_csv(out / f"{kind}_s={s:g}.csv", {"p": curve.p, "value": curve.v},
                          header_comments=curve.header("wave.json"))
        print(f"H={H:g}: c={wave.c:.12f} B={wave.B:.12f} -> {out}")


if __name__ == "__main__":
    main()
