"""Chaotic seed field as an ensemble of random plane-wave modes.

The seed is a superposition of N plane waves with directions drawn
uniformly in the (theta, beta) disc of radius `angular_spread` and i.i.d.
circular complex Gaussian amplitudes.  The Gaussian amplitude law is what
produces thermal intensity statistics (P(I) = exp(-I/<I>)/<I>) in both the
spatial and the temporal ensembles.

Determinism: every ModeSet is a pure function of (master_seed, shot_index),
realized with numpy's SeedSequence spawn keys, so shots can be generated in
any order or in parallel with bit-identical results.  By default mode
directions are drawn once (shot 0 stream) and held fixed across shots while
amplitudes are re-randomized per shot, mimicking a ground-glass diffuser
that re-randomizes the field over a persistent set of grating directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .geometry import Direction
from .propagation import ScalarField

RNG_ALGORITHM = "pcg64-seedseq"


@dataclass(frozen=True)
class PlaneWaveMode:
    direction: Direction
    amplitude: complex


@dataclass(frozen=True)
class SourceSpec:
    """What to draw: N modes within `angular_spread`, complex-Gaussian
    amplitudes of r.m.s. `amplitude_scale`."""

    n_modes: int
    angular_spread: float
    amplitude_scale: float = 1.0
    fixed_directions: bool = True
    # "gaussian" draws circular complex Gaussian amplitudes (thermal
    # intensities); "fixed-modulus" keeps |a| = amplitude_scale and only
    # randomizes the phase (zero intensity variance control).
    amplitude_law: str = "gaussian"

    def __post_init__(self):
        if self.n_modes < 1:
            raise InvalidSpec("n_modes must be >= 1")
        if self.angular_spread <= 0:
            raise InvalidSpec("angular_spread must be positive")
        if self.amplitude_scale <= 0:
            raise InvalidSpec("amplitude_scale must be positive")
        if self.amplitude_law not in ("gaussian", "fixed-modulus"):
            raise InvalidSpec(f"unknown amplitude_law {self.amplitude_law!r}")


@dataclass(frozen=True)
class ModeSet:
    """One shot's worth of plane-wave modes (stored as parallel arrays)."""

    theta: np.ndarray
    beta: np.ndarray
    amplitude: np.ndarray
    shot_index: int
    master_seed: int

    @property
    def n_modes(self) -> int:
        return len(self.theta)

    @property
    def modes(self) -> list[PlaneWaveMode]:
        return [PlaneWaveMode(Direction(float(t), float(b)), complex(a))
                for t, b, a in zip(self.theta, self.beta, self.amplitude)]


def _rng(master_seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(ss))


def sample_modes(spec: SourceSpec, master_seed: int, shot_index: int) -> ModeSet:
    """Draw the ModeSet of one shot; deterministic in (master_seed, shot_index)."""
    if shot_index < 0:
        raise InvalidSpec("shot_index must be non-negative")
    dir_shot = 0 if spec.fixed_directions else shot_index
    rd = _rng(master_seed, 0, dir_shot)
    # uniform over the (theta, beta) disc
    rad = spec.angular_spread * np.sqrt(rd.random(spec.n_modes))
    phi = 2.0 * np.pi * rd.random(spec.n_modes)
    theta = rad * np.cos(phi)
    beta = rad * np.sin(phi)
    ra = _rng(master_seed, 1, shot_index)
    if spec.amplitude_law == "gaussian":
        amp = (ra.standard_normal(spec.n_modes) + 1j * ra.standard_normal(spec.n_modes))
        amp *= spec.amplitude_scale / np.sqrt(2.0)
    else:
        amp = spec.amplitude_scale * np.exp(2j * np.pi * ra.random(spec.n_modes))
    return ModeSet(theta=theta, beta=beta, amplitude=amp,
                   shot_index=shot_index, master_seed=master_seed)


def concatenate(a: ModeSet, b: ModeSet) -> ModeSet:
    return ModeSet(theta=np.concatenate([a.theta, b.theta]),
                   beta=np.concatenate([a.beta, b.beta]),
                   amplitude=np.concatenate([a.amplitude, b.amplitude]),
                   shot_index=a.shot_index, master_seed=a.master_seed)


def field_from_modes(m: ModeSet, template: ScalarField, chunk: int = 32) -> ScalarField:
    """Coherent sum of the plane-wave modes sampled on the template grid.

    field(x, y) = sum_n a_n exp(-i k (sin(beta_n) x + cos(beta_n) sin(theta_n) y))
    evaluated on the z = 0 plane.
    """
    k = 2.0 * np.pi / template.wavelength
    x, y = template.coords()
    sx = np.sin(m.beta)
    sy = np.cos(m.beta) * np.sin(m.theta)
    out = np.zeros(template.shape, dtype=complex)
    for lo in range(0, m.n_modes, chunk):
        hi = min(lo + chunk, m.n_modes)
        ph = (sx[lo:hi, None, None] * x[None, :, None]
              + sy[lo:hi, None, None] * y[None, None, :])
        out += np.einsum("n,nxy->xy", m.amplitude[lo:hi], np.exp(-1j * k * ph))
    return ScalarField(out, template.pitch, template.wavelength, plane_label=template.plane_label)


def mode_fourier_positions(m: ModeSet, f_lens: float) -> tuple[np.ndarray, np.ndarray]:
    """Detector-plane positions of the modes on the Fourier plane of the
    seed arm: (f sin(beta_n), f cos(beta_n) sin(theta_n))."""
    return f_lens * np.sin(m.beta), f_lens * np.cos(m.beta) * np.sin(m.theta)


def fourier_intensity(m: ModeSet, g, template: ScalarField) -> ScalarField:
    """Pixel-binned Fourier-plane intensity: one |a_n|^2 contribution per mode.

    `g` is the InteractionGeometry (only its Fourier-lens focal length is
    used).  Idealizes the continuum delta of the lens transform as a
    single-pixel bin; consistent with fourier_plane(field_from_modes(...))
    up to discretization leakage.
    """
    w, h = template.shape
    xs, ys = mode_fourier_positions(m, g.lens_fourier_f)
    ix = np.rint(xs / template.pitch).astype(int) + w // 2
    iy = np.rint(ys / template.pitch).astype(int) + h // 2
    out = np.zeros((w, h), dtype=float)
    ok = (ix >= 0) & (ix < w) & (iy >= 0) & (iy < h)
    np.add.at(out, (ix[ok], iy[ok]), np.abs(m.amplitude[ok]) ** 2)
    return ScalarField(out, template.pitch, template.wavelength, plane_label="fourier")
