"""Command-line front end: ``stokeswave {solve,sweep,trajectory,verify}``.

Exit codes: 0 success, 2 property or usage violation, 3 computational failure.
Settings come from built-in defaults, then a JSON ``--config`` file, then flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .errors import NoConvergence, NotInFluid, StokesWaveError
from .export import atomic_write_text, write_csv
from .functionals import KINDS, default_p_grid, functional_sweep, streamline_period
from .properties import VerifyConfig, verify_all
from .solver import WaveParameters, load_wave, save_wave, solve_stokes_wave
from .trajectories import _moving_start, drift, particle_path

EXIT_OK, EXIT_VIOLATION, EXIT_FAILURE = 0, 2, 3
S_DEPENDENT = {"mu_s", "mu_s_root", "E_s", "Emov_s"}


class UsageError(Exception):
    pass


@dataclass
class SweepConfig:
    p_min: Optional[float] = None      # None: 1e-3 c lambda
    p_max: Optional[float] = None      # None: 3 c lambda
    count: int = 33
    spacing: str = "log"
    include_zero: bool = True

    def __post_init__(self):
        if self.spacing not in ("log", "linear"):
            raise UsageError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")
        if self.spacing == "log" and self.p_min is not None and self.p_min <= 0:
            raise UsageError("log spacing requires p_min > 0 (p = 0 is added by include_zero)")
        if self.count < 1:
            raise UsageError("count must be >= 1")


@dataclass
class RunConfig:
    wave: WaveParameters = field(default_factory=lambda: WaveParameters(10.0, 0.5))
    sweep: SweepConfig = field(default_factory=SweepConfig)
    s_values: list = field(default_factory=lambda: [1.0])
    quadrature_nodes: Optional[int] = None
    tolerances: dict = field(default_factory=dict)
    output_dir: str = "."
    verify: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls()
        if "wave" in d:
            cfg.wave = replace(cfg.wave, **d["wave"])
        if "sweep" in d:
            cfg.sweep = replace(cfg.sweep, **d["sweep"])
        for key in ("s_values", "quadrature_nodes", "tolerances", "output_dir", "verify"):
            if key in d:
                setattr(cfg, key, d[key])
        return cfg

    def verify_config(self) -> VerifyConfig:
        opts = dict(self.verify)
        opts.update(self.tolerances)
        opts.setdefault("p_count", self.sweep.count)
        opts.setdefault("p_min", self.sweep.p_min)
        opts.setdefault("p_max", self.sweep.p_max)
        opts.setdefault("p_spacing", self.sweep.spacing)
        opts.setdefault("include_zero", self.sweep.include_zero)
        opts.setdefault("nodes", self.quadrature_nodes)
        try:
            return VerifyConfig.from_dict(opts)
        except (TypeError, ValueError) as err:
            raise UsageError(str(err)) from err


def _parse_s(text: str) -> list:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad s list {text!r}") from err


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < config file < flags."""
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot read config {args.config}: {err}") from err
        try:
            cfg = RunConfig.from_dict(data)
        except (TypeError, ValueError) as err:
            raise UsageError(str(err)) from err
    else:
        cfg = RunConfig()

    wave_flags = {"wavelength": "lam", "wave_height": "height", "gravity": "gravity", "modes": "modes"}
    overrides = {k: getattr(args, a) for k, a in wave_flags.items() if getattr(args, a, None) is not None}
    if overrides:
        cfg.wave = replace(cfg.wave, **overrides)
    sweep_flags = {"p_min": "p_min", "p_max": "p_max", "count": "p_count", "spacing": "p_spacing"}
    overrides = {k: getattr(args, a) for k, a in sweep_flags.items() if getattr(args, a, None) is not None}
    if overrides:
        cfg.sweep = replace(cfg.sweep, **overrides)
    if getattr(args, "s", None) is not None:
        cfg.s_values = args.s
    if getattr(args, "nodes", None) is not None:
        cfg.quadrature_nodes = args.nodes
    if getattr(args, "out", None) is not None:
        cfg.output_dir = args.out
    return cfg


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args, cfg: RunConfig):
    """Wave from --wave if given, otherwise solved from the wave parameters."""
    if args.wave:
        try:
            return load_wave(args.wave)
        except (OSError, ValueError, KeyError, TypeError) as err:
            raise StokesWaveError(f"cannot load wave file {args.wave}: {err}") from err
    return solve_stokes_wave(cfg.wave)


def cmd_solve(args, cfg: RunConfig) -> int:
    wave = solve_stokes_wave(cfg.wave)
    path = save_wave(wave, _out_dir(cfg) / "wave.json")
    print(f"lambda={wave.wavelength!r} c={wave.c!r} B={wave.B!r} "
          f"steepness={wave.steepness!r} residual_norm={wave.residual_norm!r}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    bad = [k for k in kinds if k not in KINDS]
    if bad or not kinds:
        raise UsageError(f"unknown kind(s) {bad}; choose from {', '.join(KINDS)}")
    wave = _load(args, cfg)
    sw = cfg.sweep
    try:
        grid = default_p_grid(wave, sw.count, sw.p_min, sw.p_max, sw.spacing, sw.include_zero)
    except ValueError as err:
        raise UsageError(str(err)) from err
    out = _out_dir(cfg)
    wave_name = Path(args.wave).name if args.wave else wave.wave_id
    for kind in kinds:
        for s in (cfg.s_values if kind in S_DEPENDENT else [1.0]):
            curve = functional_sweep(wave, kind, s, grid, cfg.quadrature_nodes)
            name = f"{kind}_s={s:g}.csv" if kind in S_DEPENDENT else f"{kind}.csv"
            write_csv(out / name, {"p": curve.p, "value": curve.v},
                      header_comments=curve.header(wave_name))
            print(f"wrote {out / name}")
    return EXIT_OK


def cmd_trajectory(args, cfg: RunConfig) -> int:
    wave = _load(args, cfg)
    if args.periods <= 0:
        raise UsageError("--periods must be > 0")
    try:
        w, _ = _moving_start(wave, args.x0, args.y0, args.t0)
    except NotInFluid as err:
        raise UsageError(f"start point is not in the fluid: {err}") from err
    T = streamline_period(wave, w.imag, cfg.quadrature_nodes)
    path = particle_path(wave, args.x0, args.y0, args.t0, args.periods * T, step=args.step)
    summary = drift(wave, w.imag)
    out = _out_dir(cfg) / "path.csv"
    write_csv(out, {"t": path.t, "x": path.x, "y": path.y},
              header_comments=[f"x0={args.x0!r}, y0={args.y0!r}, t0={args.t0!r}, p={w.imag!r}"],
              trailing_comments=[f"T={summary.T!r}, drift={summary.drift!r}, "
                                 f"closed={str(summary.closed).lower()}"])
    print(f"T={summary.T!r} drift={summary.drift!r} closed={summary.closed}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    wave = _load(args, cfg)
    report = verify_all(wave, cfg.verify_config())
    out = _out_dir(cfg)
    atomic_write_text(out / "report.json", report.to_json())
    text = report.to_text()
    atomic_write_text(out / "report.txt", text)
    sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _add_wave_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("wave parameters")
    g.add_argument("--lambda", dest="lam", type=float, help="wavelength in m (default 10)")
    g.add_argument("--height", type=float, help="crest-to-trough height in m (default 0.5)")
    g.add_argument("--gravity", type=float, help="gravitational acceleration (default 9.8)")
    g.add_argument("--modes", type=int, help="Fourier modes N (default 64)")


def _add_common(p: argparse.ArgumentParser, wave_file: bool = True):
    p.add_argument("--config", help="JSON file mirroring RunConfig fields (flags override it)")
    p.add_argument("--out", help="output directory (default .)")
    if wave_file:
        p.add_argument("--wave", help="wave JSON file from 'solve'; if omitted the wave is "
                                      "solved from the wave parameters")


def _add_grid_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("p-grid and quadrature")
    g.add_argument("--p-min", type=float, help="smallest nonzero p (default 1e-3 c*lambda)")
    g.add_argument("--p-max", type=float, help="largest p (default 3 c*lambda)")
    g.add_argument("--p-count", type=int, help="number of grid points, p = 0 added (default 33)")
    g.add_argument("--p-spacing", choices=("log", "linear"), help="grid spacing (default log)")
    g.add_argument("--nodes", type=int, help="trapezoidal nodes per period (default 4N)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stokeswave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a Stokes wave and write wave.json")
    _add_wave_flags(p)
    _add_common(p, wave_file=False)

    p = sub.add_parser("sweep", help="evaluate functionals over a p-grid, one CSV per (kind, s)")
    _add_wave_flags(p)
    _add_common(p)
    _add_grid_flags(p)
    p.add_argument("--kinds", default="T", help=f"comma list from {', '.join(KINDS)} (default T)")
    p.add_argument("--s", type=_parse_s, help="exponents for s-dependent kinds, e.g. '-1,0.5,2' "
                                              "(default 1)")

    p = sub.add_parser("trajectory", help="integrate one particle path and write path.csv")
    _add_wave_flags(p)
    _add_common(p)
    p.add_argument("--nodes", type=int, help="trapezoidal nodes per period (default 4N)")
    p.add_argument("--x0", type=float, default=0.0, help="start x in the lab frame (default 0)")
    p.add_argument("--y0", type=float, default=-1.0, help="start y in the lab frame (default -1)")
    p.add_argument("--t0", type=float, default=0.0, help="start time (default 0)")
    p.add_argument("--periods", type=float, default=1.0,
                   help="duration in streamline periods T(p) (default 1)")
    p.add_argument("--step", type=float, help="RK4 step in s (default T(p)/2000)")

    p = sub.add_parser("verify", help="run the property suite, write report.json/report.txt")
    _add_wave_flags(p)
    _add_common(p)
    _add_grid_flags(p)
    return parser


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "trajectory": cmd_trajectory,
            "verify": cmd_verify}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VIOLATION
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ValueError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VIOLATION
    except NoConvergence as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
    except (StokesWaveError, OSError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
