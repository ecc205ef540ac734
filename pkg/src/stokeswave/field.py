"""Flow quantities of a solved wave, evaluated natively in (q, p).

Velocities are formed without cancellation: with S = k sum n b_n zeta^n and
zeta = exp(i k w), dz/dw = -1/c - S, the moving-frame complex velocity is
h' = 1/(dz/dw) and the lab-frame one is u - iv = h' + c = -c S / (dz/dw).
That keeps u, v, E0 accurate to full relative precision at depth where they
are exponentially small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateJacobian, NotInFluid, NoConvergence
from .solver import StokesWave


class ConformalPoint(NamedTuple):
    q: float
    p: float


class PhysicalPoint(NamedTuple):
    x: float
    y: float


class VelocitySample(NamedTuple):
    u: float
    v: float
    E: float
    E0: float


class LineFields(NamedTuple):
    """Arrays of field quantities sampled at a set of (q, p)."""

    z: np.ndarray
    dzdw: np.ndarray
    lab: np.ndarray        # u - i v
    E: np.ndarray
    E0: np.ndarray
    S: np.ndarray          # dz/dw = -1/c - S

    @property
    def u(self):
        return self.lab.real

    @property
    def v(self):
        return -self.lab.imag


def _mode_powers(wave: StokesWave, q, p):
    """zeta^n = exp(i n k (q + i p)) for n = 1..N, with q reduced mod c*lambda."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    frac = np.mod(q / wave.period_q, 1.0)
    theta = 2 * np.pi * frac
    n = np.arange(1, wave.modes + 1)
    arg = 1j * theta[..., None] * n - (wave.k * p)[..., None] * n
    return np.exp(arg), n


def evaluate(wave: StokesWave, q, p, need_z: bool = True) -> LineFields:
    """Vectorised field evaluation at conformal points (broadcast q, p)."""
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    powers, n = _mode_powers(wave, q, p)
    c, k, b = wave.c, wave.k, wave.b
    S = k * (powers @ (n * b))
    dzdw = -1.0 / c - S
    if need_z:
        z = -(q + 1j * p) / c + 1j * (powers @ b)
    else:
        z = np.full(q.shape, np.nan + 0j)
    lab = -c * S / dzdw
    mod2 = dzdw.real**2 + dzdw.imag**2
    E = 0.5 / mod2
    E0 = 0.5 * (lab.real**2 + lab.imag**2)
    return LineFields(z=z, dzdw=dzdw, lab=lab, E=E, E0=E0, S=S)


def conformal_map(wave: StokesWave, q, p) -> np.ndarray:
    """Complex physical position x + iy of conformal points (moving frame)."""
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    powers, _ = _mode_powers(wave, q, p)
    return -(q + 1j * p) / wave.c + 1j * (powers @ wave.b)


def map_point(wave: StokesWave, pt) -> PhysicalPoint:
    z = complex(conformal_map(wave, pt[0], pt[1]))
    return PhysicalPoint(z.real, z.imag)


def velocity(wave: StokesWave, pt) -> VelocitySample:
    f = evaluate(wave, pt[0], pt[1], need_z=False)
    if abs(complex(f.dzdw)) < 1e-12:
        raise DegenerateJacobian(f"|dz/dw| < 1e-12 at {tuple(pt)}")
    return VelocitySample(float(f.u), float(f.v), float(f.E), float(f.E0))


def pressure(wave: StokesWave, pt) -> float:
    """P - P_atm (density 1) from the steady Bernoulli relation."""
    f = evaluate(wave, pt[0], pt[1])
    return float(wave.B - f.E - wave.gravity * f.z.imag)


def invert_points(wave: StokesWave, x, y, seed=None, max_iter: int = 50, check_fluid=True):
    """Vectorised Newton solve of z(w) = x + iy. Returns complex w = q + ip.

    q is not normalised here. Raises NoConvergence or NotInFluid.
    """
    target = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    w = -wave.c * target if seed is None else np.array(seed, dtype=complex)
    w = np.broadcast_to(w, target.shape).copy()
    tol = 1e-12 * wave.wavelength
    kp_floor = -1.0  # above the surface by ~lambda/(2 pi): certainly not fluid
    for _ in range(max_iter):
        f = evaluate(wave, w.real, w.imag)
        err = f.z - target
        if np.all(np.abs(err) <= 0.1 * tol):
            break
        w = w - err / f.dzdw
        if np.any(wave.k * w.imag < kp_floor):
            if check_fluid:
                raise NotInFluid("point lies above the free surface")
            w = w.real + 1j * np.maximum(w.imag, kp_floor / wave.k)
    else:
        f = evaluate(wave, w.real, w.imag)
        if np.any(np.abs(f.z - target) > tol):
            raise NoConvergence("invert_map did not converge in %d iterations" % max_iter)
    if check_fluid:
        ptol = 1e-12 * wave.period_q
        if np.any(w.imag < -ptol):
            raise NotInFluid("point lies above the free surface")
        w = w.real + 1j * np.maximum(w.imag, 0.0)
    return np.asarray(w)


def invert_map(wave: StokesWave, pt) -> ConformalPoint:
    """Physical (moving-frame) point to (q, p), q normalised to [0, c lambda)."""
    w = complex(invert_points(wave, pt[0], pt[1]))
    q = math.fmod(w.real, wave.period_q)
    if q < 0:
        q += wave.period_q
    if q >= wave.period_q:
        q = 0.0
    return ConformalPoint(q, w.imag)


def streamline(wave: StokesWave, p: float, samples: int) -> list:
    """Points of the streamline psi = p over one wavelength, crest first."""
    if p < 0:
        raise ValueError("p must be >= 0")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    q = wave.period_q * np.arange(samples) / samples
    z = conformal_map(wave, q, np.full(samples, float(p)))
    return [PhysicalPoint(float(a.real), float(a.imag)) for a in z]


def surface_profile(wave: StokesWave, samples: int) -> list:
    return streamline(wave, 0.0, samples)


def surface_elevation(wave: StokesWave, x) -> np.ndarray:
    """eta(x) at physical (moving-frame) abscissae."""
    q = surface_q(wave, x)
    return conformal_map(wave, q, np.zeros_like(q)).imag


def surface_q(wave: StokesWave, x) -> np.ndarray:
    """q on the free surface at physical abscissae x (inverse of x(q, 0))."""
    x = np.asarray(x, dtype=float)
    q = -wave.c * x
    for _ in range(60):
        f = evaluate(wave, q, np.zeros_like(q))
        dx = f.z.real - x
        if np.all(np.abs(dx) <= 1e-14 * wave.wavelength):
            break
        # along p = 0, dx/dq = Re(dz/dw)
        q = q - dx / f.dzdw.real
    return q


def min_speed_gap(wave: StokesWave, nq: int = 64, np_: int = 64, p_max=None) -> float:
    """delta_0 = min(c - u) over a (q, p) grid including the surface."""
    q, p = field_grid(wave, nq, np_, p_min=0.0, p_max=p_max)
    f = evaluate(wave, q, p, need_z=False)
    return float(np.min(wave.c - f.u))


def field_grid(wave: StokesWave, nq: int, np_: int, p_min=None, p_max=None):
    """Tensor grid of q in [0, c lambda) and p in [p_min, p_max]."""
    p_min = 0.01 * wave.period_q if p_min is None else p_min
    p_max = 2.0 * wave.period_q if p_max is None else p_max
    qs = wave.period_q * np.arange(nq) / nq
    ps = np.linspace(p_min, p_max, np_)
    return np.meshgrid(qs, ps, indexing="xy")


@dataclass(frozen=True)
class GoverningResidualReport:
    bernoulli: float            # max |R| / (g lambda) on the surface
    irrotationality: float      # max |u_y - v_x| / (c kappa)
    incompressibility: float    # max |u_x + v_y| / (c kappa)
    kinematic: float            # max |v - (u - c) eta_x| / c on the surface
    max_u_minus_c: float        # must be < 0
    deep_speed: float           # max |(u, v)| / c at p = 5 c lambda
    min_E: float
    delta0: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def check_governing_equations(
    wave: StokesWave, nq: int = 64, np_: int = 64, step=None, p_min=None, p_max=None
) -> GoverningResidualReport:
    """Residuals of the steady equations on a sampled field.

    Derivatives for irrotationality and incompressibility are centred finite
    differences in physical (x, y) about grid points of the (q, p) lattice,
    each stencil point located by ``invert_points``. The surface slope in the
    kinematic condition is a fourth-order difference along the parametrised
    surface, independent of the velocity formulas.
    """
    from .solver import residual_norm

    lam, c = wave.wavelength, wave.c
    h = 1e-4 * lam if step is None else step
    kappa = wave.kappa
    Q, P = field_grid(wave, nq, np_, p_min=p_min, p_max=p_max)
    centre = evaluate(wave, Q, P)
    x0, y0 = centre.z.real, centre.z.imag
    # seed each stencil inversion from the centre with dw = h' dz
    hprime = 1.0 / centre.dzdw
    w0 = Q + 1j * P

    def vel_at(dx, dy):
        seed = w0 + hprime * (dx + 1j * dy)
        w = invert_points(wave, x0 + dx, y0 + dy, seed=seed, check_fluid=False)
        f = evaluate(wave, w.real, w.imag, need_z=False)
        return f.u, f.v

    uxp, vxp = vel_at(h, 0.0)
    uxm, vxm = vel_at(-h, 0.0)
    uyp, vyp = vel_at(0.0, h)
    uym, vym = vel_at(0.0, -h)
    u_x, v_x = (uxp - uxm) / (2 * h), (vxp - vxm) / (2 * h)
    u_y, v_y = (uyp - uym) / (2 * h), (vyp - vym) / (2 * h)
    scale = c * kappa
    irrot = float(np.max(np.abs(u_y - v_x)) / scale)
    incomp = float(np.max(np.abs(u_x + v_y)) / scale)

    # kinematic condition on the surface
    qs = wave.period_q * np.arange(4 * wave.modes) / (4 * wave.modes)
    dq = h * c
    zs = [conformal_map(wave, qs + j * dq, np.zeros_like(qs)) for j in (-2, -1, 1, 2)]
    dz = (zs[0] - 8 * zs[1] + 8 * zs[2] - zs[3]) / (12 * dq)
    eta_x = dz.imag / dz.real
    fs = evaluate(wave, qs, np.zeros_like(qs), need_z=False)
    kin = float(np.max(np.abs(fs.v - (fs.u - c) * eta_x)) / c)

    Qa, Pa = field_grid(wave, nq, np_, p_min=0.0, p_max=p_max)
    fa = evaluate(wave, Qa, Pa, need_z=False)
    max_u_minus_c = float(max(np.max(fa.u - c), np.max(fs.u - c)))
    delta0 = -max_u_minus_c

    fd = evaluate(wave, qs, np.full_like(qs, 5 * wave.period_q), need_z=False)
    deep = float(np.max(np.hypot(fd.u, fd.v)) / c)

    return GoverningResidualReport(
        bernoulli=residual_norm(wave),
        irrotationality=irrot,
        incompressibility=incomp,
        kinematic=kin,
        max_u_minus_c=max_u_minus_c,
        deep_speed=deep,
        min_E=float(min(np.min(fa.E), np.min(fs.E))),
        delta0=delta0,
    )


def field_dump(wave: StokesWave, nq: int, np_: int, p_max=None) -> dict:
    """Columns x, y, q, p, u, v, E, E0, P on a (q, p) grid including the surface."""
    Q, P = field_grid(wave, nq, np_, p_min=0.0, p_max=p_max)
    f = evaluate(wave, Q, P)
    pr = wave.B - f.E - wave.gravity * f.z.imag
    cols = {
        "x": f.z.real, "y": f.z.imag, "q": Q, "p": P,
        "u": f.u, "v": f.v, "E": f.E, "E0": f.E0, "P": pr,
    }
    return {k: np.ravel(v) for k, v in cols.items()}
