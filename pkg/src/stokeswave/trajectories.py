"""Fluid-particle paths, streamline periods and drift.

Along a streamline of the steady moving-frame flow the potential obeys
dq/dt = (u - c)^2 + v^2 = 2E(q, p), so a particle path reduces to one scalar
ODE at fixed p. ``particle_path`` integrates that with fixed-step RK4;
``particle_path_physical`` integrates the velocity field in (x, y) directly,
inverting the conformal map at every stage, and serves as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import StepTooLarge
from .field import PhysicalPoint, conformal_map, evaluate, invert_points
from .functionals import period_excess, streamline_period
from .solver import StokesWave

STEPS_PER_PERIOD = 2000


@dataclass(frozen=True)
class ParticlePath:
    t: np.ndarray
    x: np.ndarray          # lab frame
    y: np.ndarray
    p: float
    x0: float
    y0: float
    t0: float
    c: float
    q: Optional[np.ndarray] = None
    frame: str = "lab"

    @property
    def lab_points(self) -> list:
        return [PhysicalPoint(float(a), float(b)) for a, b in zip(self.x, self.y)]

    @property
    def moving_x(self) -> np.ndarray:
        return self.x - self.c * self.t

    def in_frame(self, frame: str) -> "ParticlePath":
        """Copy whose x column is expressed in ``frame`` ('lab' or 'moving')."""
        if frame not in ("lab", "moving"):
            raise ValueError("frame must be 'lab' or 'moving'")
        if frame == self.frame:
            return self
        shift = -self.c * self.t if frame == "moving" else self.c * self.t
        return ParticlePath(self.t, self.x + shift, self.y, self.p, self.x0, self.y0,
                            self.t0, self.c, self.q, frame)


@dataclass(frozen=True)
class PeriodResult:
    T: float
    p: float
    drift: float
    closed: bool
    method: str


def _rk4(f: Callable, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _reduced_rhs(wave: StokesWave, p: float, with_energy: bool = False):
    """Right-hand side of dq/dt = 2E(q, p) (and dK/dt = E0 if requested).

    Mode weights at fixed p are precomputed; this is the hot loop of every
    integration, so it avoids the general broadcasting path of ``evaluate``.
    """
    n = np.arange(1, wave.modes + 1)
    weights = wave.k * n * wave.b * np.exp(-n * wave.k * p)
    c, period = wave.c, wave.period_q
    two_pi_n = 2 * np.pi * n

    def rhs(state):
        theta = (state[0] / period) % 1.0
        S = np.exp(1j * theta * two_pi_n) @ weights
        dzdw = -1.0 / c - S
        mod2 = dzdw.real**2 + dzdw.imag**2
        if with_energy:
            lab = c * S / dzdw
            return np.array([1.0 / mod2, 0.5 * (lab.real**2 + lab.imag**2)])
        return np.array([1.0 / mod2])
    return rhs


def _moving_start(wave: StokesWave, x0, y0, t0):
    """Moving-frame start reduced to one wavelength; returns (w0, shift)."""
    X0 = x0 - wave.c * t0
    lam = wave.wavelength
    shift = lam * math.floor((X0 + 0.5 * lam) / lam)
    w = complex(invert_points(wave, X0 - shift, y0))
    return w, shift


def _step_count(duration: float, step: float) -> tuple:
    if not step > 0:
        raise ValueError("step must be > 0")
    if duration < 0:
        raise ValueError("duration must be >= 0")
    n = max(1, math.ceil(duration / step - 1e-9))
    return n, duration / n


def particle_path(wave: StokesWave, x0, y0, t0, duration, step=None) -> ParticlePath:
    """Lab-frame path from (x0, y0) at time t0 via the reduced streamline ODE."""
    w, shift = _moving_start(wave, x0, y0, t0)
    q0, p0 = w.real, w.imag
    if step is None:
        step = streamline_period(wave, p0) / STEPS_PER_PERIOD
    n, h = _step_count(duration, step)
    rhs = _reduced_rhs(wave, p0)
    dq_max = wave.period_q / 8
    qs = np.empty(n + 1)
    qs[0] = q0
    state = np.array([q0])
    for i in range(n):
        new = _rk4(rhs, state, h)
        if new[0] - state[0] > dq_max:
            raise StepTooLarge(f"q advanced {new[0] - state[0]:.4g} > c*lambda/8 in one step")
        state = new
        qs[i + 1] = state[0]
    t = t0 + h * np.arange(n + 1)
    z = conformal_map(wave, qs, np.full(n + 1, p0))
    X = z.real + shift
    return ParticlePath(t=t, x=X + wave.c * t, y=z.imag, p=p0, x0=x0, y0=y0, t0=t0,
                        c=wave.c, q=qs, frame="lab")


def particle_path_physical(wave: StokesWave, x0, y0, t0, duration, step=None) -> ParticlePath:
    """Same path integrated in physical moving-frame coordinates (no reduction)."""
    w, shift = _moving_start(wave, x0, y0, t0)
    p0 = w.imag
    if step is None:
        step = streamline_period(wave, p0) / STEPS_PER_PERIOD
    n, h = _step_count(duration, step)
    seed = [w]

    def rhs(state):
        X, Y = state
        wi = complex(invert_points(wave, X, Y, seed=seed[0], check_fluid=False))
        seed[0] = wi
        f = evaluate(wave, wi.real, wi.imag, need_z=False)
        return np.array([float(f.u) - wave.c, float(f.v)])

    X0 = x0 - wave.c * t0 - shift
    states = np.empty((n + 1, 2))
    states[0] = (X0, y0)
    state = states[0].copy()
    for i in range(n):
        new = _rk4(rhs, state, h)
        if abs(new[0] - state[0]) > wave.wavelength / 8:
            raise StepTooLarge("particle moved more than lambda/8 in one step")
        state = new
        states[i + 1] = state
    t = t0 + h * np.arange(n + 1)
    X = states[:, 0] + shift
    return ParticlePath(t=t, x=X + wave.c * t, y=states[:, 1], p=p0, x0=x0, y0=y0, t0=t0,
                        c=wave.c, q=None, frame="lab")


def _integrate_to_advance(rhs, state0, h, advance, tol):
    """RK4 from state0 until state[0] has grown by ``advance``.

    The crossing inside the final step is located by bisection on the length
    of a partial RK4 step. Returns (elapsed_time, state_at_crossing).
    """
    target = state0[0] + advance
    state, t = state0.copy(), 0.0
    for _ in range(10_000_000):
        new = _rk4(rhs, state, h)
        if new[0] >= target:
            break
        state, t = new, t + h
    lo, hi = 0.0, h
    mid_state = new
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        mid_state = _rk4(rhs, state, mid)
        if mid_state[0] >= target:
            hi = mid
        else:
            lo = mid
        if abs(mid_state[0] - target) <= tol or hi - lo <= 1e-17 * max(t, 1.0):
            break
    return t + 0.5 * (lo + hi), _rk4(rhs, state, 0.5 * (lo + hi))


def streamline_period_by_simulation(
    wave: StokesWave, p: float, q_start: float = 0.0, t0: float = 0.0, step=None
) -> PeriodResult:
    """Elapsed time for q to advance by c*lambda along streamline p.

    The ODE is autonomous, so ``t0`` only shifts the clock; it is accepted to
    exercise the claim that the period does not depend on it.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    T_est = streamline_period(wave, p)
    h = T_est / STEPS_PER_PERIOD if step is None else step
    rhs = _reduced_rhs(wave, p)
    start = np.array([float(q_start)])
    elapsed, _ = _integrate_to_advance(rhs, start, h, wave.period_q, 1e-12 * wave.period_q)
    T = (t0 + elapsed) - t0
    drift = wave.c * T - wave.wavelength
    return PeriodResult(T=T, p=p, drift=drift,
                        closed=abs(drift) <= 1e-10 * wave.wavelength, method="ode_event")


def kinetic_energy_along_path(wave: StokesWave, x0, y0, t0=0.0, step=None) -> float:
    """0.5 * int (x'^2 + y'^2) dt over one streamline period, from a particle path."""
    w, _ = _moving_start(wave, x0, y0, t0)
    T_est = streamline_period(wave, w.imag)
    h = T_est / STEPS_PER_PERIOD if step is None else step
    rhs = _reduced_rhs(wave, w.imag, with_energy=True)
    _, state = _integrate_to_advance(rhs, np.array([w.real, 0.0]), h, wave.period_q,
                                     1e-12 * wave.period_q)
    return float(state[1])


def drift(wave: StokesWave, p: float, closure_tol: Optional[float] = None) -> PeriodResult:
    """c T(p) - lambda from the quadrature period (cancellation-free form)."""
    tol = 1e-10 * wave.wavelength if closure_tol is None else closure_tol
    excess = period_excess(wave, p)
    d = wave.c * excess
    return PeriodResult(T=wave.wavelength / wave.c + excess, p=p, drift=d,
                        closed=abs(d) <= tol, method="quadrature")


def path_summary(path: ParticlePath, wave: StokesWave) -> dict:
    res = drift(wave, path.p)
    return {"T": res.T, "drift": res.drift, "closed": res.closed}
