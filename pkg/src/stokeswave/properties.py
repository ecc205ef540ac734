"""Numerical certification of the kinetic-energy and streamline-period claims.

Shape checks (monotone, convex, log-convex) work on sampled curves via
divided differences, so they handle the log-spaced p-grids used by default.
Every check reports a signed ``worst_margin``: negative means violated.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from .errors import MissingSurfacePoint, NonpositiveValue, TooFewPoints
from .field import check_governing_equations, conformal_map, evaluate, surface_q
from .functionals import (
    FunctionalCurve,
    default_p_grid,
    drift_value,
    e_s,
    emov_s,
    functional_sweep,
    moving_energy_by_time,
    mu_s,
    parseval_mu1,
    period_excess,
    streamline_period,
    total_kinetic_energy,
    total_kinetic_energy_conformal,
)
from .solver import StokesWave


@dataclass
class CheckResult:
    name: str
    claim: str
    passed: bool
    worst_margin: float
    location: Optional[object] = None
    tolerance_used: Optional[float] = None
    skipped: bool = False
    reason: str = ""
    degenerate: bool = False
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["worst_margin"] = _json_float(self.worst_margin)
        d["details"] = {k: _json_float(v) for k, v in self.details.items()}
        return d


def _json_float(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _skipped(name, claim, reason) -> CheckResult:
    return CheckResult(name, claim, passed=True, worst_margin=math.nan, skipped=True, reason=reason)


def _values(curve: FunctionalCurve, min_points: int = 3):
    if len(curve.values) < min_points:
        raise TooFewPoints(f"need at least {min_points} points, got {len(curve.values)}")
    return curve.p, curve.v


def _nonfinite(name, claim, tol) -> CheckResult:
    return CheckResult(name, claim, passed=False, worst_margin=-math.inf, tolerance_used=tol,
                       reason="curve has non-finite values")


def check_monotone_nonincreasing(curve: FunctionalCurve, tol: float = 1e-9,
                                 name: str = "", claim: str = "non-increasing in p") -> CheckResult:
    p, v = _values(curve)
    name = name or f"{curve.kind}/nonincreasing"
    if not np.all(np.isfinite(v)):
        return _nonfinite(name, claim, tol)
    scale = float(np.max(np.abs(v))) or 1.0
    margins = (v[:-1] - v[1:]) / scale
    i = int(np.argmin(margins))
    worst = float(margins[i])
    return CheckResult(name, claim, passed=worst >= -tol, worst_margin=worst,
                       location=float(p[i + 1]), tolerance_used=tol)


def _convexity(p, v):
    slopes = np.diff(v) / np.diff(p)
    second = slopes[1:] - slopes[:-1]
    # floor keeps rounding noise on a flat curve from normalizing to O(1)
    floor = float(np.max(np.abs(v))) / (p[-1] - p[0])
    scale = max(float(np.max(np.abs(slopes))), floor) or 1.0
    margins = second / scale
    i = int(np.argmin(margins))
    return float(margins[i]), float(p[i + 1])


def check_convex(curve: FunctionalCurve, tol: float = 1e-9,
                 name: str = "", claim: str = "convex in p") -> CheckResult:
    p, v = _values(curve)
    name = name or f"{curve.kind}/convex"
    if not np.all(np.isfinite(v)):
        return _nonfinite(name, claim, tol)
    worst, loc = _convexity(p, v)
    return CheckResult(name, claim, passed=worst >= -tol, worst_margin=worst,
                       location=loc, tolerance_used=tol)


def check_log_convex(curve: FunctionalCurve, tol: float = 1e-9,
                     name: str = "", claim: str = "log is convex in p") -> CheckResult:
    p, v = _values(curve)
    name = name or f"{curve.kind}/log_convex"
    if not np.all(np.isfinite(v)):
        return _nonfinite(name, claim, tol)
    if np.any(v <= 0):
        raise NonpositiveValue("log-convexity needs strictly positive values")
    worst, loc = _convexity(p, np.log(v))
    return CheckResult(name, claim, passed=worst >= -tol, worst_margin=worst,
                       location=loc, tolerance_used=tol)


def surface_period_integral(wave: StokesWave, points: Optional[int] = None) -> float:
    """int_{-lambda/2}^{lambda/2} dx / (c - u(x, eta(x))) by the midpoint rule.

    The surface is resampled on a uniform physical x grid, so this is an
    independent route to T(0).
    """
    M = points or 4 * wave.modes
    lam = wave.wavelength
    x = -0.5 * lam + (np.arange(M) + 0.5) * lam / M
    q = surface_q(wave, x)
    f = evaluate(wave, q, np.zeros_like(q), need_z=False)
    return float(np.sum(1.0 / (wave.c - f.u)) * lam / M)


def check_period_bounds(wave: StokesWave, T_curve: FunctionalCurve,
                        min_margin: float = 0.0, surface_tol: float = 1e-6) -> CheckResult:
    """lambda/c < T(p) <= T(0) on the curve grid, plus T(0) vs the surface integral.

    The strict lower bound is judged on T(p) - lambda/c evaluated without
    cancellation (``period_excess``); the curve values must agree with it.
    ``min_margin`` (relative to lambda/c) demands the excess exceed a floor.
    """
    name, claim = "T/period_bounds", "lambda/c < T(p) <= T(0) = surface integral"
    p, T = _values(T_curve, min_points=1)
    if p[0] != 0.0:
        raise MissingSurfacePoint("T curve must include p = 0")
    period = wave.wavelength / wave.c
    excess = np.array([period_excess(wave, float(pi), T_curve.quadrature_nodes) for pi in p])
    consistency = float(np.max(np.abs(T - (period + excess)))) / period
    lower = excess / period - min_margin
    upper = (T[0] * (1 + 1e-12) - T) / period
    surf = surface_period_integral(wave)
    surf_rel = abs(T[0] - surf) / surf
    details = {
        "min_excess_rel": float(np.min(excess / period)),
        "min_excess_p": float(p[int(np.argmin(excess))]),
        "upper_margin": float(np.min(upper)),
        "surface_integral": surf,
        "surface_rel_diff": surf_rel,
        "curve_consistency": consistency,
        "min_margin_required": min_margin,
    }
    ok_upper = bool(np.all(upper >= 0))
    ok_surface = surf_rel <= surface_tol
    ok_consistent = consistency <= 1e-12
    if wave.is_flat:
        ok = ok_upper and ok_surface and bool(np.all(excess == 0))
        return CheckResult(name, claim, passed=ok, worst_margin=0.0, location=0.0,
                           tolerance_used=surface_tol, degenerate=True,
                           reason="H = 0: T = lambda/c identically (closed paths)",
                           details=details)
    ok_lower = bool(np.all(lower > 0))
    i = int(np.argmin(lower))
    worst = float(min(lower[i], np.min(upper), surface_tol - surf_rel))
    return CheckResult(name, claim, passed=ok_lower and ok_upper and ok_surface and ok_consistent,
                       worst_margin=worst, location=float(p[i]), tolerance_used=surface_tol,
                       details=details)


def check_constant_moving_energy(wave: StokesWave, curve: FunctionalCurve,
                                 tol: float = 1e-6) -> CheckResult:
    name, claim = "E_total_moving/constant", "moving-frame energy over one period = c lambda/2"
    if not (curve.kind == "E_total_moving" or (curve.kind == "Emov_s" and curve.s == 1.0)):
        return _skipped(name, claim, f"not applicable to kind={curve.kind}, s={curve.s}")
    target = 0.5 * wave.period_q
    rel = np.abs(curve.v - target) / target
    i = int(np.argmax(rel))
    return CheckResult(name, claim, passed=bool(rel[i] <= tol), worst_margin=float(tol - rel[i]),
                       location=float(curve.p[i]), tolerance_used=tol,
                       details={"max_rel_dev": float(rel[i])})


def _below(name, claim, value, limit, location=None, **details) -> CheckResult:
    return CheckResult(name, claim, passed=bool(value <= limit), worst_margin=float(limit - value),
                       location=location, tolerance_used=limit,
                       details={"value": float(value), **details})


@dataclass
class VerifyConfig:
    p_count: int = 33
    p_min: Optional[float] = None          # default 1e-3 c lambda
    p_max: Optional[float] = None          # default 3 c lambda
    p_spacing: str = "log"
    include_zero: bool = True
    nodes: Optional[int] = None            # default 4N
    mu_s_values: Sequence[float] = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
    root_s_values: Sequence[float] = (1.0, 2.0)
    e_s_values: Sequence[float] = (-1.0, 0.0, 2.0)
    emov_s_values: Sequence[float] = (-1.0, 0.0, 1.0, 2.0, 3.0)
    identity_s_values: Sequence[float] = (-1.0, 0.0, 2.0, 3.0)
    shape_tol: float = 1e-9
    identity_tol: float = 1e-12
    parseval_tol: float = 1e-8
    ode_tol: float = 1e-7
    path_tol: float = 1e-6                 # times lambda
    limit_tol: float = 1e-8
    constant_energy_tol: float = 1e-6
    independence_T_tol: float = 1e-10
    independence_E_tol: float = 1e-6
    bernoulli_tol: float = 1e-12
    cauchy_riemann_tol: float = 1e-6
    kinematic_tol: float = 1e-8
    deep_tol: float = 1e-6
    period_min_margin: float = 0.0
    seed: int = 20240901
    trajectories: bool = True

    @classmethod
    def from_dict(cls, d: dict) -> "VerifyConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown verify config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class PropertyReport:
    checks: list
    wave_id: str
    timestamp: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.skipped)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.skipped and not c.passed]

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "wave_id": self.wave_id,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "metadata": {"timestamp": self.timestamp},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        width = max(len(c.name) for c in self.checks) if self.checks else 10
        lines = [f"wave {self.wave_id}", f"{'check':<{width}}  status    worst_margin  note"]
        for c in self.checks:
            status = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
            if c.degenerate and not c.skipped:
                status += "*"
            margin = "" if c.skipped else f"{c.worst_margin:.3e}"
            lines.append(f"{c.name:<{width}}  {status:<8}  {margin:>12}  {c.reason}")
        n_fail = len(self.failures)
        lines.append(f"{len(self.checks)} checks, {n_fail} failed; overall "
                     f"{'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _fmt_s(s: float) -> str:
    return f"{s:g}"


def _shape_checks(curve: FunctionalCurve, label: str, tol: float, claim: str,
                  log: bool = True, wave: Optional[StokesWave] = None) -> list:
    out = [
        check_monotone_nonincreasing(curve, tol, name=f"{label}/nonincreasing",
                                     claim=f"{claim}: non-increasing"),
        check_convex(curve, tol, name=f"{label}/convex", claim=f"{claim}: convex"),
    ]
    if log:
        try:
            out.append(check_log_convex(curve, tol, name=f"{label}/log_convex",
                                        claim=f"{claim}: log-convex"))
        except NonpositiveValue:
            if wave is not None and wave.is_flat and np.all(curve.v == 0):
                out.append(_skipped(f"{label}/log_convex", f"{claim}: log-convex",
                                    "H = 0: functional vanishes identically"))
            else:
                out.append(CheckResult(f"{label}/log_convex", f"{claim}: log-convex", False,
                                       -math.inf, tolerance_used=tol,
                                       reason="nonpositive values"))
    return out


def verify_all(wave: StokesWave, config: Optional[VerifyConfig] = None,
               timestamp: Optional[str] = None) -> PropertyReport:
    """Run every check over the configured p-grid and exponent sets."""
    cfg = config or VerifyConfig()
    nodes = cfg.nodes or 4 * wave.modes
    grid = default_p_grid(wave, cfg.p_count, cfg.p_min, cfg.p_max, cfg.p_spacing, cfg.include_zero)
    lam, c, cl = wave.wavelength, wave.c, wave.period_q
    flat = wave.is_flat
    checks: list = []
    tol = cfg.shape_tol

    def sweep(kind, s=1.0):
        return functional_sweep(wave, kind, s, grid, nodes)

    for s in cfg.mu_s_values:
        checks += _shape_checks(sweep("mu_s", s), f"mu_s[s={_fmt_s(s)}]", tol, "integral mean")
    for s in cfg.root_s_values:
        checks += _shape_checks(sweep("mu_s_root", s), f"mu_s_root[s={_fmt_s(s)}]", tol,
                                "integral mean root", log=False)
    T_curve = sweep("T")
    checks += _shape_checks(T_curve, "T", tol, "streamline period")
    checks.append(check_period_bounds(wave, T_curve, min_margin=cfg.period_min_margin))
    checks.append(_skipped("T/even_in_p", "T(-p) = T(p)",
                           "needs the flow above the free surface; not evaluated"))

    drift_curve = sweep("drift")
    d = drift_curve.v
    checks.append(check_monotone_nonincreasing(drift_curve, tol, name="drift/nonincreasing",
                                               claim="drift non-increasing in p"))
    if flat:
        checks.append(CheckResult("drift/positive", "c T - lambda > 0 (no closed paths)",
                                  passed=bool(np.all(d == 0)), worst_margin=0.0, degenerate=True,
                                  reason="H = 0: drift = 0, paths closed"))
        checks.append(_skipped("drift/decay", "drift(p_max) <= 1e-4 drift(0)",
                               "H = 0: drift vanishes identically"))
    else:
        i = int(np.argmin(d))
        checks.append(CheckResult("drift/positive", "c T - lambda > 0 (no closed paths)",
                                  passed=bool(np.all(d > 0)), worst_margin=float(d[i] / lam),
                                  location=float(grid[i]), tolerance_used=0.0))
        checks.append(_below("drift/decay", "drift(p_max) <= 1e-4 drift(0)",
                             d[-1] / d[0], 1e-4, location=float(grid[-1])))

    E_curve = sweep("E_total")
    checks += _shape_checks(E_curve, "E_total", tol, "lab kinetic energy", wave=wave)
    for s in cfg.e_s_values:
        checks += _shape_checks(sweep("E_s", s), f"E_s[s={_fmt_s(s)}]", tol,
                                "lab kinetic energy index s", wave=wave)
    for s in cfg.emov_s_values:
        checks += _shape_checks(sweep("Emov_s", s), f"Emov_s[s={_fmt_s(s)}]", tol,
                                "moving-frame kinetic energy index s")
    checks.append(check_constant_moving_energy(wave, sweep("E_total_moving"),
                                               cfg.constant_energy_tol))

    # same-quadrature identities
    def max_rel(a, b):
        a, b = np.asarray(a), np.asarray(b)
        return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))

    mu_m1 = np.array([mu_s(wave, -1.0, p, nodes) for p in grid])
    checks.append(_below("identity/T_eq_half_cl_mu_-1", "T = (c lambda/2) mu_-1",
                         max_rel(T_curve.v, 0.5 * cl * mu_m1), cfg.identity_tol))
    e0 = np.array([e_s(wave, 0.0, p, nodes) for p in grid])
    checks.append(_below("identity/E_0_eq_half_T", "E_0 = T/2",
                         max_rel(e0, 0.5 * T_curve.v), cfg.identity_tol))
    for s in cfg.identity_s_values:
        lhs = [emov_s(wave, s, p, nodes) for p in grid]
        rhs = [2.0 ** (s - 2) * cl * mu_s(wave, s - 1, p, nodes) for p in grid]
        checks.append(_below(f"identity/Emov_s_eq_mu_s-1[s={_fmt_s(s)}]",
                             "Emov_s = 2^(s-2) c lambda mu_(s-1)", max_rel(lhs, rhs),
                             cfg.identity_tol))
    checks.append(_below("identity/Emov_1_time_vs_q", "int E dt = 0.5 int dq",
                         max_rel([moving_energy_by_time(wave, p, nodes) for p in grid],
                                 [emov_s(wave, 1.0, p, nodes) for p in grid]),
                         cfg.identity_tol))
    if flat:
        checks.append(CheckResult("identity/E_total_two_forms", "0.5 int E0/E = 0.5 int |1+c z'|^2",
                                  passed=bool(np.all(E_curve.v == 0)), worst_margin=0.0,
                                  degenerate=True, reason="H = 0: both vanish"))
    else:
        conf = [total_kinetic_energy_conformal(wave, p, nodes) for p in grid]
        # the |1 + c z'|^2 form cancels at depth, so scale by the largest value
        gap = float(np.max(np.abs(E_curve.v - np.array(conf))) / np.max(np.abs(E_curve.v)))
        checks.append(_below("identity/E_total_two_forms", "0.5 int E0/E = 0.5 int |1+c z'|^2",
                             gap, cfg.identity_tol))

    # independent oracles
    ps_parseval = (0.0, 0.1 * cl, cl)
    checks.append(_below("oracle/parseval_mu1", "Parseval mu_1 = quadrature mu_1",
                         max_rel([parseval_mu1(wave, p, nodes) for p in ps_parseval],
                                 [mu_s(wave, 1.0, p, nodes) for p in ps_parseval]),
                         cfg.parseval_tol))

    # limits far below the surface
    p_deep = 10 * cl
    lim = []
    for s in cfg.mu_s_values:
        lim.append(abs(mu_s(wave, s, p_deep, nodes) / (0.5 * c * c) ** s - 1))
    checks.append(_below("limit/mu_s", "mu_s -> (c^2/2)^s", max(lim), cfg.limit_tol, p_deep))
    lim_root = [abs(mu_s(wave, s, p_deep, nodes) ** (1 / s) / (0.5 * c * c) - 1)
                for s in cfg.root_s_values]
    checks.append(_below("limit/mu_s_root", "mu_s^(1/s) -> c^2/2", max(lim_root),
                         cfg.limit_tol, p_deep))
    checks.append(_below("limit/T", "T -> lambda/c",
                         abs(streamline_period(wave, p_deep, nodes) * c / lam - 1),
                         cfg.limit_tol, p_deep))

    # governing equations
    gov = check_governing_equations(wave)
    checks.append(_below("governing/bernoulli", "surface Bernoulli residual / (g lambda)",
                         gov.bernoulli, cfg.bernoulli_tol))
    checks.append(_below("governing/cauchy_riemann", "|u_y - v_x|, |u_x + v_y| / (c kappa)",
                         max(gov.irrotationality, gov.incompressibility), cfg.cauchy_riemann_tol))
    checks.append(_below("governing/kinematic", "|v - (u - c) eta_x| / c on the surface",
                         gov.kinematic, cfg.kinematic_tol))
    checks.append(CheckResult("governing/u_below_c", "u < c throughout the sampled field",
                              passed=gov.max_u_minus_c < 0, worst_margin=-gov.max_u_minus_c / c,
                              details={"delta0": gov.delta0}))
    checks.append(_below("governing/deep_rest", "|(u, v)| / c at p = 5 c lambda",
                         gov.deep_speed, cfg.deep_tol))
    floor = 0.5 * gov.delta0**2 * (1 - 1e-12)
    checks.append(CheckResult("diagnostic/no_stagnation", "min E >= delta0^2/2 > 0",
                              passed=gov.min_E >= floor > 0,
                              worst_margin=(gov.min_E - floor) / (0.5 * c * c),
                              details={"min_E": gov.min_E, "delta0": gov.delta0}))

    if cfg.trajectories:
        checks += _trajectory_checks(wave, cfg, nodes)
    else:
        for n in ("oracle/T_quadrature_vs_ode", "oracle/reduced_vs_physical_path",
                  "independence/T_initial_data", "independence/E_total_x0"):
            checks.append(_skipped(n, "trajectory check", "trajectory checks disabled"))

    checks.sort(key=lambda ch: ch.name)
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return PropertyReport(checks=checks, wave_id=wave.wave_id, timestamp=timestamp)


def _trajectory_checks(wave: StokesWave, cfg: VerifyConfig, nodes: int) -> list:
    from .trajectories import (
        kinetic_energy_along_path,
        particle_path,
        particle_path_physical,
        streamline_period_by_simulation,
    )

    lam, c, cl = wave.wavelength, wave.c, wave.period_q
    rng = np.random.default_rng(cfg.seed)
    out = []

    ps = (0.0, 0.5, 0.1 * cl)
    rel = [abs(streamline_period_by_simulation(wave, p).T / streamline_period(wave, p, nodes) - 1)
           for p in ps]
    out.append(_below("oracle/T_quadrature_vs_ode", "quadrature T = ODE event T",
                      max(rel), cfg.ode_tol))

    p_path = 0.02 * cl
    start = conformal_map(wave, 0.3 * cl, p_path)
    T_path = streamline_period(wave, p_path, nodes)
    a = particle_path(wave, start.real, start.imag, 0.0, T_path)
    b = particle_path_physical(wave, start.real, start.imag, 0.0, T_path)
    gap = math.hypot(a.x[-1] - b.x[-1], a.y[-1] - b.y[-1]) / lam
    out.append(_below("oracle/reduced_vs_physical_path", "reduced and physical RK4 endpoints",
                      gap, cfg.path_tol))

    p_ind = 0.05 * cl
    Ts = [streamline_period_by_simulation(wave, p_ind, q_start=q, t0=t0).T
          for q in rng.uniform(0, cl, 5) for t0 in rng.uniform(0, 10 * lam / c, 3)]
    spread = (max(Ts) - min(Ts)) / min(Ts)
    out.append(_below("independence/T_initial_data", "T independent of (x0, t0)",
                      spread, cfg.independence_T_tol, p_ind))

    if wave.is_flat:
        out.append(_skipped("independence/E_total_x0", "E independent of x0",
                            "H = 0: lab kinetic energy vanishes identically"))
    else:
        quad = total_kinetic_energy(wave, p_ind, nodes)
        ks = []
        for q in rng.uniform(0, cl, 3):
            z = conformal_map(wave, q, p_ind)
            ks.append(kinetic_energy_along_path(wave, z.real, z.imag))
        dev = max(abs(kv / quad - 1) for kv in ks)
        out.append(_below("independence/E_total_x0", "E independent of x0",
                          dev, cfg.independence_E_tol, p_ind, quadrature=quad))
    return out
