"""Energy functionals on lines of constant stream function p.

Every functional is a periodic integral over q in [0, c lambda), evaluated by
the trapezoidal rule on ``nodes`` equispaced points (default 4N). For the
analytic periodic integrands here that rule converges geometrically, and
integrands that are trigonometric polynomials of degree < nodes (|dz/dw|^2,
E^-1, E^-2, ...) are integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import FunctionalEvaluationError
from .field import LineFields, evaluate
from .solver import StokesWave

KINDS = ("mu_s", "mu_s_root", "T", "E_total", "E_total_moving", "E_s", "Emov_s", "drift")


def default_nodes(wave: StokesWave) -> int:
    return 4 * wave.modes


def line_fields(wave: StokesWave, p: float, nodes: Optional[int] = None) -> LineFields:
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    M = nodes or default_nodes(wave)
    q = wave.period_q * np.arange(M) / M
    return evaluate(wave, q, np.full(M, float(p)), need_z=False)


def _mean(values) -> float:
    # np.mean uses pairwise summation: fixed order, deterministic
    return float(np.mean(values))


def mu_s(wave: StokesWave, s: float, p: float, nodes: Optional[int] = None) -> float:
    """Integral mean (1/(c lambda)) * int_0^{c lambda} E^s dq along streamline p."""
    if s == 0:
        return 1.0
    f = line_fields(wave, p, nodes)
    return _mean(f.E ** s)


def mu_s_root(wave: StokesWave, s: float, p: float, nodes: Optional[int] = None) -> float:
    if not s > 0:
        raise ValueError("mu_s_root needs s > 0")
    return mu_s(wave, s, p, nodes) ** (1.0 / s)


def parseval_mu1(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    """mu_1 from the Taylor coefficients of the surface velocity h'.

    G(zeta) = sum a_n zeta^n is h' written in zeta = exp(i k w); its circle
    means are 0.5 * sum |a_n|^2 exp(-2 n k p). The a_n come from a DFT of
    surface samples only, so this does not evaluate the field at depth p.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    M = nodes or default_nodes(wave)
    G = 1.0 / line_fields(wave, 0.0, M).dzdw
    a = np.fft.fft(G) / M
    n = np.arange(M)
    return float(0.5 * np.sum(np.abs(a) ** 2 * np.exp(-2.0 * n * wave.k * p)))


def streamline_period(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    """T(p) = int_0^{c lambda} dq / (2E)."""
    f = line_fields(wave, p, nodes)
    return wave.period_q * _mean(1.0 / (2.0 * f.E))


def period_excess(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    """T(p) - lambda/c evaluated without cancellation.

    1/(2E) = |dz/dw|^2 = |1/c + S|^2, so the integrand of the excess is
    2 Re(S)/c + |S|^2; the first term has zero mean, the second is >= 0.
    """
    f = line_fields(wave, p, nodes)
    S = f.S
    return wave.period_q * _mean(2.0 * S.real / wave.c + (S.real**2 + S.imag**2))


def total_kinetic_energy(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    """Lab-frame kinetic energy over one streamline period: 0.5 int E0/E dq."""
    f = line_fields(wave, p, nodes)
    return 0.5 * wave.period_q * _mean(f.E0 / f.E)


def total_kinetic_energy_conformal(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    """Same quantity as 0.5 int |1 + c dz/dw|^2 dq."""
    f = line_fields(wave, p, nodes)
    J = 1.0 + wave.c * f.dzdw
    return 0.5 * wave.period_q * _mean(J.real**2 + J.imag**2)


def e_s(wave: StokesWave, s: float, p: float, nodes: Optional[int] = None) -> float:
    """2^(s-2) int E0^s / E dq. Infinite for s < 0 wherever the lab fluid is at rest."""
    f = line_fields(wave, p, nodes)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        integrand = f.E0 ** s / f.E
    return 2.0 ** (s - 2) * wave.period_q * _mean(integrand)


def emov_s(wave: StokesWave, s: float, p: float, nodes: Optional[int] = None) -> float:
    """2^(s-2) int E^(s-1) dq."""
    f = line_fields(wave, p, nodes)
    return 2.0 ** (s - 2) * wave.period_q * _mean(f.E ** (s - 1))


def total_kinetic_energy_moving(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    return emov_s(wave, 1.0, p, nodes)


def moving_energy_by_time(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    """int_0^T E dt rewritten with dt = dq / (2E)."""
    f = line_fields(wave, p, nodes)
    return wave.period_q * _mean(f.E / (2.0 * f.E))


def drift_value(wave: StokesWave, p: float, nodes: Optional[int] = None) -> float:
    """c T(p) - lambda."""
    return wave.c * period_excess(wave, p, nodes)


@dataclass(frozen=True)
class FunctionalCurve:
    kind: str
    s: float
    p_grid: tuple
    values: tuple
    quadrature_nodes: int
    wave_id: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if math.isnan(self.s):
            raise ValueError("s must not be NaN")
        object.__setattr__(self, "p_grid", tuple(float(v) for v in self.p_grid))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.p_grid) != len(self.values):
            raise ValueError("p_grid and values differ in length")
        if any(p < 0 for p in self.p_grid):
            raise ValueError("p_grid must be nonnegative")
        if any(b <= a for a, b in zip(self.p_grid, self.p_grid[1:])):
            raise ValueError("p_grid must be strictly increasing")

    @property
    def p(self) -> np.ndarray:
        return np.array(self.p_grid)

    @property
    def v(self) -> np.ndarray:
        return np.array(self.values)

    def header(self, wave_file: str = "") -> list:
        return [f"kind={self.kind}, s={self.s!r}, wave={wave_file or self.wave_id}, "
                f"nodes={self.quadrature_nodes}"]


def evaluate_functional(wave, kind: str, s: float, p: float, nodes: Optional[int] = None) -> float:
    if kind == "mu_s":
        return mu_s(wave, s, p, nodes)
    if kind == "mu_s_root":
        return mu_s_root(wave, s, p, nodes)
    if kind == "T":
        return streamline_period(wave, p, nodes)
    if kind == "E_total":
        return total_kinetic_energy(wave, p, nodes)
    if kind == "E_total_moving":
        return total_kinetic_energy_moving(wave, p, nodes)
    if kind == "E_s":
        return e_s(wave, s, p, nodes)
    if kind == "Emov_s":
        return emov_s(wave, s, p, nodes)
    if kind == "drift":
        return drift_value(wave, p, nodes)
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")


def functional_sweep(
    wave: StokesWave, kind: str, s: float, p_grid: Sequence[float], nodes: Optional[int] = None
) -> FunctionalCurve:
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    p_grid = [float(p) for p in p_grid]
    if not p_grid:
        raise ValueError("p_grid is empty")
    if any(b <= a for a, b in zip(p_grid, p_grid[1:])) or p_grid[0] < 0:
        raise ValueError("p_grid must be strictly increasing and nonnegative")
    M = nodes or default_nodes(wave)
    if M < 4 * wave.modes:
        raise ValueError(f"nodes must be >= 4*modes = {4 * wave.modes}")
    values = []
    for p in p_grid:
        try:
            values.append(evaluate_functional(wave, kind, s, p, M))
        except Exception as err:
            raise FunctionalEvaluationError(f"{kind}(s={s}) failed: {err}", p) from err
    return FunctionalCurve(kind, float(s), tuple(p_grid), tuple(values), M, wave.wave_id)


def default_p_grid(
    wave: StokesWave,
    count: int = 33,
    p_min: Optional[float] = None,
    p_max: Optional[float] = None,
    spacing: str = "log",
    include_zero: bool = True,
) -> np.ndarray:
    """``count`` points from 1e-3 c lambda to 3 c lambda, with p = 0 prepended."""
    p_min = 1e-3 * wave.period_q if p_min is None else float(p_min)
    p_max = 3.0 * wave.period_q if p_max is None else float(p_max)
    if spacing == "log":
        if p_min <= 0:
            raise ValueError("log spacing requires p_min > 0 (use include_zero for p = 0)")
        grid = np.geomspace(p_min, p_max, count)
    elif spacing == "linear":
        grid = np.linspace(p_min, p_max, count)
    else:
        raise ValueError(f"spacing must be 'log' or 'linear', got {spacing!r}")
    if include_zero and grid[0] > 0:
        grid = np.concatenate([[0.0], grid])
    return grid
