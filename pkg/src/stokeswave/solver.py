"""Steady deep-water Stokes waves in conformal variables.

The inverse of the hodograph map w = q + ip (velocity potential, stream
function in the frame moving with the wave) is represented as

    z(w) = -w/c + sum_{n=1..N} i b_n exp(i n k w),    k = 2 pi / (c lambda).

With the angle theta = k q and physical wavenumber kappa = 2 pi / lambda the
surface (p = 0) reads

    x = -theta/kappa - sum b_n sin(n theta),   y = sum b_n cos(n theta),

and the moving-frame speed squared on it is c^2 / |D|^2 with
D = 1 + kappa sum n b_n exp(i n theta). The unknowns (b_1..b_N, c, B) are
found by Newton iteration on the Bernoulli condition

    R(theta) = c^2 / (2 |D|^2) + g y - B = 0,

projected onto the cosine modes 0..N, closed by the crest-to-trough height
constraint 2 sum_{n odd} b_n = H.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import NoConvergence
from .export import atomic_write_text

DEFAULT_GRAVITY = 9.8


@dataclass(frozen=True)
class WaveParameters:
    wavelength: float
    wave_height: float
    gravity: float = DEFAULT_GRAVITY
    modes: int = 64
    newton_tol: float = 1e-12
    max_iterations: int = 50
    steepness_cap: float = 0.10

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if not self.wave_height >= 0:
            raise ValueError(f"wave_height must be >= 0, got {self.wave_height}")
        if not self.gravity > 0:
            raise ValueError(f"gravity must be > 0, got {self.gravity}")
        if int(self.modes) != self.modes or self.modes < 1:
            raise ValueError(f"modes must be a positive integer, got {self.modes}")
        if not self.newton_tol > 0:
            raise ValueError(f"newton_tol must be > 0, got {self.newton_tol}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    @property
    def steepness(self) -> float:
        return self.wave_height / self.wavelength


@dataclass(frozen=True)
class StokesWave:
    """A solved wave. Immutable; ``b`` is a read-only view of the coefficients."""

    wavelength: float
    wave_height: float
    gravity: float
    c: float
    B: float
    coefficients: tuple
    residual_norm: float
    iterations: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(v) for v in self.coefficients))
        b = np.array(self.coefficients, dtype=float)
        b.setflags(write=False)
        object.__setattr__(self, "_b", b)

    @property
    def b(self) -> np.ndarray:
        return self._b

    @property
    def modes(self) -> int:
        return len(self.coefficients)

    @property
    def k(self) -> float:
        """Conformal wavenumber 2 pi / (c lambda)."""
        return 2 * math.pi / (self.c * self.wavelength)

    @property
    def kappa(self) -> float:
        """Physical wavenumber 2 pi / lambda."""
        return 2 * math.pi / self.wavelength

    @property
    def period_q(self) -> float:
        """Length c*lambda of one period in the potential coordinate q."""
        return self.c * self.wavelength

    @property
    def steepness(self) -> float:
        return self.wave_height / self.wavelength

    @property
    def is_flat(self) -> bool:
        return not np.any(self._b)

    def to_dict(self) -> dict:
        return {
            "lambda": self.wavelength,
            "wave_height": self.wave_height,
            "gravity": self.gravity,
            "c": self.c,
            "B": self.B,
            "k": self.k,
            "coefficients": list(self.coefficients),
            "residual_norm": self.residual_norm,
            "steepness": self.steepness,
            "modes": self.modes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StokesWave":
        coeffs = d["coefficients"]
        if "modes" in d and d["modes"] != len(coeffs):
            raise ValueError("'modes' does not match the number of coefficients")
        return cls(
            wavelength=float(d["lambda"]),
            wave_height=float(d["wave_height"]),
            gravity=float(d["gravity"]),
            c=float(d["c"]),
            B=float(d["B"]),
            coefficients=tuple(coeffs),
            residual_norm=float(d["residual_norm"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @property
    def wave_id(self) -> str:
        """Short content hash, stable across save/load."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:12]


def save_wave(wave: StokesWave, path) -> Path:
    return atomic_write_text(path, wave.to_json())


def load_wave(path) -> StokesWave:
    return StokesWave.from_dict(json.loads(Path(path).read_text()))


def linear_phase_speed(wavelength: float, gravity: float = DEFAULT_GRAVITY) -> float:
    """Deep-water linear dispersion c = sqrt(g lambda / (2 pi))."""
    return math.sqrt(gravity * wavelength / (2 * math.pi))


def _theta(samples: int) -> np.ndarray:
    return 2 * np.pi * np.arange(samples) / samples


def _residual_and_jacobian(b, c, B, kappa, g, theta, jacobian=True):
    n = np.arange(1, b.size + 1)
    phase = np.exp(1j * np.outer(theta, n))                  # (M, N)
    cos_nt = phase.real
    D = 1.0 + kappa * (phase @ (n * b))
    D2 = D.real**2 + D.imag**2
    R = 0.5 * c * c / D2 + g * (cos_nt @ b) - B
    if not jacobian:
        return R, None
    # d|D|^2/db_m = 2 Re(conj(D) kappa m e^{i m theta})
    dD2 = 2 * kappa * (np.conj(D)[:, None] * phase).real * n
    J = np.empty((theta.size, b.size + 2))
    J[:, : b.size] = -0.5 * c * c / (D2**2)[:, None] * dD2 + g * cos_nt
    J[:, b.size] = c / D2
    J[:, b.size + 1] = -1.0
    return R, J


def _galerkin_projector(modes: int, theta: np.ndarray) -> np.ndarray:
    m = np.arange(modes + 1)
    P = 2.0 * np.cos(np.outer(m, theta)) / theta.size
    P[0] *= 0.5
    return P


def _height_row(modes: int) -> np.ndarray:
    row = np.zeros(modes + 2)
    row[0:modes:2] = 2.0                                    # odd n only
    return row


def flat_water(params: WaveParameters) -> StokesWave:
    c = linear_phase_speed(params.wavelength, params.gravity)
    return StokesWave(
        wavelength=params.wavelength,
        wave_height=0.0,
        gravity=params.gravity,
        c=c,
        B=0.5 * c * c,
        coefficients=(0.0,) * params.modes,
        residual_norm=0.0,
        iterations=0,
    )


def linear_wave(params: WaveParameters) -> StokesWave:
    """First-order (Airy) wave, not iterated; its residual is reported as is."""
    if params.wave_height == 0:
        return flat_water(params)
    c = linear_phase_speed(params.wavelength, params.gravity)
    b = np.zeros(params.modes)
    b[0] = 0.5 * params.wave_height
    wave = StokesWave(
        wavelength=params.wavelength,
        wave_height=params.wave_height,
        gravity=params.gravity,
        c=c,
        B=0.5 * c * c,
        coefficients=tuple(b),
        residual_norm=math.nan,
    )
    return _with_residual(wave, 4 * params.modes)


def bernoulli_residual(wave: StokesWave, samples: int) -> np.ndarray:
    """Surface Bernoulli residual at ``samples`` equispaced q in [0, c lambda)."""
    if samples < 2 * wave.modes:
        raise ValueError(f"samples must be >= 2*modes = {2 * wave.modes}")
    R, _ = _residual_and_jacobian(
        wave.b, wave.c, wave.B, wave.kappa, wave.gravity, _theta(samples), jacobian=False
    )
    return R


def residual_norm(wave: StokesWave, samples: Optional[int] = None) -> float:
    samples = samples or 4 * wave.modes
    R = bernoulli_residual(wave, samples)
    return float(np.max(np.abs(R)) / (wave.gravity * wave.wavelength))


def _with_residual(wave: StokesWave, samples: int) -> StokesWave:
    from dataclasses import replace

    return replace(wave, residual_norm=residual_norm(wave, samples), iterations=wave.iterations)


def solve_stokes_wave(
    params: WaveParameters, seed: Optional[StokesWave] = None, *, enforce_cap: bool = True
) -> StokesWave:
    """Newton solve for the wave of the given wavelength and height.

    ``seed`` (same wavelength) replaces the linear first guess; its
    coefficients are rescaled to the requested height. ``enforce_cap=False``
    is used by :func:`continuation_sweep` for steps past the direct-solve cap.
    """
    H, lam, g, N = params.wave_height, params.wavelength, params.gravity, params.modes
    if H == 0:
        return flat_water(params)
    if enforce_cap and params.steepness > params.steepness_cap:
        raise NoConvergence(
            f"steepness H/lambda = {params.steepness:.4g} exceeds the direct-solve cap "
            f"{params.steepness_cap:g}; use continuation_sweep from a smaller height",
            height=H,
        )

    kappa = 2 * math.pi / lam
    b = np.zeros(N)
    if seed is None:
        b[0] = 0.5 * H
        c = linear_phase_speed(lam, g)
        B = 0.5 * c * c
    else:
        m = min(N, seed.modes)
        b[:m] = seed.b[:m]
        scale = H / seed.wave_height if seed.wave_height > 0 else 1.0
        b *= scale
        if not np.any(b):
            b[0] = 0.5 * H
        c, B = seed.c, seed.B

    M = 4 * N
    theta = _theta(M)
    P = _galerkin_projector(N, theta)
    hrow = _height_row(N)
    scale_R = g * lam
    best, stalled = math.inf, 0

    for it in range(params.max_iterations + 1):
        R, J = _residual_and_jacobian(b, c, B, kappa, g, theta)
        h_err = 2.0 * b[0::2].sum() - H
        norm = float(np.max(np.abs(R))) / scale_R
        if it > 0 and norm <= params.newton_tol and abs(h_err) <= params.newton_tol * lam:
            return StokesWave(
                wavelength=lam,
                wave_height=H,
                gravity=g,
                c=float(c),
                B=float(B),
                coefficients=tuple(b),
                residual_norm=norm,
                iterations=it,
            )
        if it == params.max_iterations:
            break
        # a residual floor above tol means the truncation N is too small
        stalled = stalled + 1 if norm > 0.5 * best else 0
        best = min(best, norm)
        if stalled >= 4:
            break
        F = np.concatenate([P @ R, [h_err]])
        A = np.vstack([P @ J, hrow])
        step = np.linalg.solve(A, -F)
        b = b + step[:N]
        c = c + step[N]
        B = B + step[N + 1]
        if not (np.all(np.isfinite(b)) and np.isfinite(c) and c > 0):
            break

    raise NoConvergence(
        f"Newton did not reach residual {params.newton_tol:g} within "
        f"{params.max_iterations} iterations at H={H:g} (steepness {params.steepness:.4g}); "
        "try continuation_sweep or more modes",
        height=H,
    )


def continuation_sweep(params: WaveParameters, heights: Sequence[float]) -> list:
    """Solve a sequence of strictly increasing heights, each seeded by the last.

    Only the first height must lie under the direct-solve steepness cap.
    """
    heights = [float(h) for h in heights]
    if not heights:
        raise ValueError("heights must be non-empty")
    if any(h1 <= h0 for h0, h1 in zip(heights, heights[1:])):
        raise ValueError(f"heights must be strictly increasing, got {heights}")
    if heights[0] / params.wavelength > params.steepness_cap:
        raise ValueError("the first height must lie below the direct-solve steepness cap")

    from dataclasses import replace

    waves, seed = [], None
    for H in heights:
        try:
            wave = solve_stokes_wave(
                replace(params, wave_height=H), seed=seed, enforce_cap=seed is None
            )
        except NoConvergence as err:
            raise NoConvergence(
                f"continuation failed at H={H:g}: {err}", last_good=seed, height=H, waves=waves
            ) from err
        waves.append(wave)
        if H > 0:
            seed = wave
    return waves
