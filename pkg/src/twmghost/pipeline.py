"""End-to-end simulation of the imaging experiment.

Coherent chain: object mask -> 2f-2f lens transform to the crystal plane ->
weak-conversion generation of the idler -> free propagation over s2 to the
detector.  The result is the object intensity, coordinate-inverted at unit
magnification and shifted by the offset set by the generated beam direction.

Chaotic chain: the generated intensity is the incoherent sum of one
shifted/inverted copy of the coherent image per seed mode, weighted by the
mode intensity, its geometric gain factor and the phase-matching acceptance
(this is the cross-terms-average-out shortcut; a coherent-sum mode that
squares the summed complex field is available for control studies).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import twm_core
from .chaotic_source import (ModeSet, PlaneWaveMode, SourceSpec, fourier_intensity,
                             mode_fourier_positions, sample_modes)
from .errors import InvalidSpec
from .geometry import (Direction, InteractionGeometry, direction_from_vector,
                       geometric_factor, image_offset)
from .propagation import ScalarField, free_propagate, lens_image_2f2f


@dataclass(frozen=True)
class ObjectMask:
    """Amplitude transmission in [0, 1] on its own grid."""

    transmission: np.ndarray
    pitch: float

    def __post_init__(self):
        t = np.asarray(self.transmission, dtype=float)
        if t.min() < 0 or t.max() > 1:
            raise InvalidSpec("mask transmission values must lie in [0, 1]")
        object.__setattr__(self, "transmission", t)


@dataclass(frozen=True)
class DetectorSpec:
    """Optional CCD model: binning, saturation clip, uniform quantization."""

    bit_depth: int = 0
    saturation_level: float = 0.0
    pixel_binning: int = 1

    def __post_init__(self):
        if self.bit_depth not in (0, 8, 12, 16):
            raise InvalidSpec("bit_depth must be one of 0, 8, 12, 16")
        if self.pixel_binning < 1:
            raise InvalidSpec("pixel_binning must be >= 1")


@dataclass
class ShotRecord:
    """One laser shot: Fourier-plane map of the seed and image-plane map of
    the generated field."""

    i1: np.ndarray
    i2: np.ndarray
    shot_index: int


def object_pitch_for_detector(g: InteractionGeometry, width: int, det_pitch: float) -> float:
    """Object-plane pitch that makes the crystal/detector grid pitch come out
    at `det_pitch` after the single-FFT lens transform."""
    return g.k3.wavelength / g.k3.index * g.d / (width * det_pitch)


def apply_detector(i: np.ndarray, det: DetectorSpec) -> np.ndarray:
    """Binning, saturation clipping and quantization; bit_depth 0 bypasses."""
    out = np.asarray(i, dtype=float)
    if det.pixel_binning > 1:
        b = det.pixel_binning
        w, h = out.shape
        out = out[:w - w % b, :h - h % b].reshape(w // b, b, h // b, b).sum(axis=(1, 3))
    if det.bit_depth == 0:
        return out.copy() if out is i else out
    sat = det.saturation_level if det.saturation_level > 0 else float(out.max()) or 1.0
    out = np.clip(out, 0.0, sat)
    levels = 2 ** det.bit_depth - 1
    return np.rint(out / sat * levels) * (sat / levels)


def phase_matching_filter(mode: PlaneWaveMode, g: InteractionGeometry,
                          hard_cutoff: bool = False) -> float:
    """Acceptance weight of one seed mode.

    The idler wavevector is taken along k3 - k1n (which minimizes the
    mismatch under energy conservation); the residual scalar mismatch is
    |k3 - k1n| - |k2| and the weight is sinc^2(dk L / 2), or a hard cutoff
    at |dk| L / 2 = pi.
    """
    w = _acceptance_weights(np.array([mode.direction.theta]),
                            np.array([mode.direction.beta]), g, hard_cutoff)
    return float(w[0])


def _acceptance_weights(theta, beta, g: InteractionGeometry, hard_cutoff=False):
    k1, k2, k3 = g.k1.magnitude, g.k2.magnitude, g.k3.magnitude
    u1 = np.stack([np.sin(beta), np.cos(beta) * np.sin(theta), np.cos(beta) * np.cos(theta)])
    k2vec = g.k3.vector()[:, None] - k1 * u1
    dk = np.linalg.norm(k2vec, axis=0) - k2
    arg = 0.5 * dk * g.crystal_length
    if hard_cutoff:
        return (np.abs(arg) < np.pi).astype(float)
    return np.sinc(arg / np.pi) ** 2


def _conjugate_directions(theta, beta, g: InteractionGeometry):
    """Idler directions for seed modes along (theta, beta): k2n || k3 - k1n."""
    k1 = g.k1.magnitude
    u1 = np.stack([np.sin(beta), np.cos(beta) * np.sin(theta), np.cos(beta) * np.cos(theta)])
    k2vec = g.k3.vector()[:, None] - k1 * u1
    ux, uy, uz = k2vec / np.linalg.norm(k2vec, axis=0)
    return np.arctan2(uy, uz), np.arcsin(np.clip(ux, -1, 1))


def _shift_zero_fill(a: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Integer shift with zero fill (no wraparound)."""
    out = np.zeros_like(a)
    w, h = a.shape
    sx0, sx1 = min(max(0, dx), w), max(min(w, w + dx), 0)
    sy0, sy1 = min(max(0, dy), h), max(min(h, h + dy), 0)
    if sx1 > sx0 and sy1 > sy0:
        out[sx0:sx1, sy0:sy1] = a[sx0 - dx:sx1 - dx, sy0 - dy:sy1 - dy]
    return out


def coherent_field(mask: ObjectMask, g: InteractionGeometry, seed_amp: complex = 1.0,
                   gain_arg: float = 0.01) -> ScalarField:
    """Complex generated field at the detector plane for a plane-wave seed.

    `gain_arg` is the weak-conversion argument g |a3| fgeo L used for the
    pointwise conversion at the crystal plane.
    """
    lam2 = g.k2.wavelength / g.k2.index
    obj = ScalarField(mask.transmission.astype(complex), mask.pitch,
                      g.k3.wavelength / g.k3.index, plane_label="object")
    a3_F = lens_image_2f2f(obj, g)
    # normalize the pump map so the weak-conversion argument peaks at gain_arg
    scale = max(np.abs(a3_F.grid).max(), 1e-300)
    ev = twm_core.evolve_weak(
        twm_core.CoupledAmplitudes(a1=np.full(a3_F.shape, seed_amp, dtype=complex),
                                   a2=np.zeros(a3_F.shape, dtype=complex)),
        twm_core.GainParams(g=gain_arg, a3=1.0, r=1.0), fgeo=1.0)
    a2 = ev.a2 * a3_F.grid / scale  # a2 = i g fgeo r conj(a1) a3(rF), pump map applied
    e2 = ScalarField(a2, a3_F.pitch, lam2, plane_label="crystal-out")
    return free_propagate(e2, g.s2, pad=2, bandlimit=True)


def coherent_image(mask: ObjectMask, g: InteractionGeometry, seed_amp: complex = 1.0,
                   seed_direction: Direction | None = None,
                   det: DetectorSpec | None = None) -> ScalarField:
    """Detected intensity of the coherent chain (plane-wave seed).

    For an off-axis seed the generated beam direction is the phase-matching
    conjugate of the seed and the image is shifted by the corresponding
    detector-plane offset (rounded to whole pixels).
    """
    e2 = coherent_field(mask, g, seed_amp=seed_amp)
    i2 = np.abs(e2.grid) ** 2
    if seed_direction is not None:
        t2, b2 = _conjugate_directions(np.array([seed_direction.theta]),
                                       np.array([seed_direction.beta]), g)
        xb, yb = image_offset(g.s2, Direction(float(t2[0]), float(b2[0])))
        i2 = _shift_zero_fill(i2, int(round(xb / e2.pitch)), int(round(yb / e2.pitch)))
    if det is not None:
        i2 = apply_detector(i2, det)
    return ScalarField(i2, e2.pitch, e2.wavelength, plane_label="image")


class ChaoticExperiment:
    """Precomputed machinery for many-shot chaotic runs.

    Holds the base coherent image, the per-mode conjugate directions,
    integer pixel offsets, geometric/acceptance weights and (in coherent-sum
    mode) the per-mode complex copy stack, so that one shot reduces to a
    weighted sum over modes.
    """

    def __init__(self, mask: ObjectMask, g: InteractionGeometry, spec: SourceSpec,
                 master_seed: int, det: DetectorSpec | None = None,
                 coherent_sum: bool = False, hard_cutoff: bool = False):
        if not spec.fixed_directions:
            raise InvalidSpec("ChaoticExperiment requires fixed mode directions; "
                              "use chaotic_shot for per-shot direction resampling")
        self.mask, self.g, self.spec = mask, g, spec
        self.master_seed = master_seed
        self.det = det or DetectorSpec()
        self.coherent_sum = coherent_sum
        base = coherent_field(mask, g)
        self.pitch = base.pitch
        self.base_field = base.grid
        self.base_image = np.abs(base.grid) ** 2
        m0 = sample_modes(spec, master_seed, 0)
        self.theta1, self.beta1 = m0.theta, m0.beta
        t2, b2 = _conjugate_directions(m0.theta, m0.beta, g)
        self.theta2, self.beta2 = t2, b2
        xb = g.s2 * np.sin(b2)
        yb = g.s2 * np.cos(b2) * np.sin(t2)
        self.px = np.rint(xb / self.pitch).astype(int)
        self.py = np.rint(yb / self.pitch).astype(int)
        self.accept = _acceptance_weights(m0.theta, m0.beta, g, hard_cutoff)
        fge = np.array([geometric_factor(Direction(float(ta), float(ba)),
                                         Direction(float(tb), float(bb)))
                        for ta, ba, tb, bb in zip(m0.theta, m0.beta, t2, b2)])
        self.mode_weight = self.accept * fge ** 2
        # detector-plane template for the Fourier arm
        w, h = self.base_image.shape
        self.template = ScalarField(np.zeros((w, h)), self.pitch,
                                    g.k1.wavelength / g.k1.index, plane_label="fourier")
        if coherent_sum:
            shape = (spec.n_modes,) + self.base_field.shape
            k2 = g.k2.magnitude
            x, yv = base.coords()
            self.copy_stack = np.empty(shape, dtype=complex)
            for n in range(spec.n_modes):
                ramp = np.exp(-1j * k2 * (np.sin(b2[n]) * x[:, None]
                                          + np.cos(b2[n]) * np.sin(t2[n]) * yv[None, :]))
                self.copy_stack[n] = (np.sqrt(self.mode_weight[n])
                                      * ramp * _shift_zero_fill(self.base_field,
                                                                self.px[n], self.py[n]))
            self.flat_stack = self.copy_stack.reshape(spec.n_modes, -1)
        else:
            stack = np.empty((spec.n_modes,) + self.base_image.shape, dtype=float)
            for n in range(spec.n_modes):
                stack[n] = self.mode_weight[n] * _shift_zero_fill(self.base_image,
                                                                  self.px[n], self.py[n])
            self.flat_stack = stack.reshape(spec.n_modes, -1)

    def modes_for_shot(self, shot_index: int) -> ModeSet:
        return sample_modes(self.spec, self.master_seed, shot_index)

    def shot(self, shot_index: int) -> ShotRecord:
        m = self.modes_for_shot(shot_index)
        if self.coherent_sum:
            e2 = np.conj(m.amplitude) @ self.flat_stack
            i2 = np.abs(e2.reshape(self.base_image.shape)) ** 2
        else:
            i2 = (np.abs(m.amplitude) ** 2 @ self.flat_stack).reshape(self.base_image.shape)
        i1 = fourier_intensity(m, self.g, self.template).grid
        return ShotRecord(i1=apply_detector(i1, self.det),
                          i2=apply_detector(i2, self.det), shot_index=shot_index)

    def shots(self, n_shots: int, start: int = 0):
        for idx in range(start, start + n_shots):
            yield self.shot(idx)

    def expected_image(self, ref_mode: int) -> np.ndarray:
        """Shifted/inverted object image the correlation map should recover
        when the reference pixel tracks mode `ref_mode`."""
        return self.mode_weight[ref_mode] * _shift_zero_fill(
            self.base_image, self.px[ref_mode], self.py[ref_mode])

    def reference_mode_for_pixel(self, ref_pixel: tuple[int, int]) -> int:
        """Index of the mode whose Fourier-plane bin is `ref_pixel` (nearest)."""
        xs, ys = mode_fourier_positions(self.modes_for_shot(0), self.g.lens_fourier_f)
        w, h = self.template.shape
        ix = np.rint(xs / self.pitch).astype(int) + w // 2
        iy = np.rint(ys / self.pitch).astype(int) + h // 2
        d2 = (ix - ref_pixel[0]) ** 2 + (iy - ref_pixel[1]) ** 2
        return int(np.argmin(d2))


def chaotic_shot(mask: ObjectMask, g: InteractionGeometry, modes: ModeSet,
                 det: DetectorSpec | None = None) -> ShotRecord:
    """One-off chaotic shot from an explicit ModeSet (builds the imaging
    chain from scratch; use ChaoticExperiment for many-shot runs)."""
    det = det or DetectorSpec()
    base = coherent_field(mask, g)
    base_image = np.abs(base.grid) ** 2
    t2, b2 = _conjugate_directions(modes.theta, modes.beta, g)
    accept = _acceptance_weights(modes.theta, modes.beta, g)
    i2 = np.zeros_like(base_image)
    for n in range(modes.n_modes):
        fge = geometric_factor(Direction(float(modes.theta[n]), float(modes.beta[n])),
                               Direction(float(t2[n]), float(b2[n])))
        xb, yb = image_offset(g.s2, Direction(float(t2[n]), float(b2[n])))
        i2 += (np.abs(modes.amplitude[n]) ** 2 * accept[n] * fge ** 2
               * _shift_zero_fill(base_image, int(round(xb / base.pitch)),
                                  int(round(yb / base.pitch))))
    template = ScalarField(np.zeros(base_image.shape), base.pitch,
                           g.k1.wavelength / g.k1.index)
    i1 = fourier_intensity(modes, g, template).grid
    return ShotRecord(i1=apply_detector(i1, det), i2=apply_detector(i2, det),
                      shot_index=modes.shot_index)
