"""Thermal-statistics diagnostics and intensity-correlation reconstruction.

The reconstruction estimator is the plain sample covariance (1/n
normalization) between the intensity at one reference pixel of the seed's
Fourier map and every pixel of the generated-field image map:

    G(x2, y2) = <I1(ref) I2(x2, y2)> - <I1(ref)> <I2(x2, y2)>

Accumulation is strictly sequential in shot order (double precision), so
results are bit-identical regardless of how shots were produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as sstats

from .errors import EmptyEnsemble, InsufficientSamples, ShapeMismatch
from .pipeline import ShotRecord


@dataclass
class CorrelationMap:
    """Per-pixel covariance map with the running means it was built from."""

    g_map: np.ndarray
    ref_pixel: tuple[int, int]
    n_shots: int
    mean_i1: float
    mean_i2: np.ndarray


@dataclass
class HistogramFit:
    bin_edges: np.ndarray
    counts: np.ndarray
    fitted_mean: float
    ks_statistic: float
    p_value: float


class CovarianceAccumulator:
    """Streaming accumulator for the reference-pixel covariance map."""

    def __init__(self, ref_pixel: tuple[int, int]):
        self.ref_pixel = (int(ref_pixel[0]), int(ref_pixel[1]))
        self.n = 0
        self.s1 = 0.0
        self.s2 = None
        self.s12 = None
        self.shape = None

    def add(self, shot: ShotRecord):
        if self.shape is None:
            self.shape = shot.i2.shape
            self.s2 = np.zeros(self.shape)
            self.s12 = np.zeros(self.shape)
            w, h = shot.i1.shape
            if not (0 <= self.ref_pixel[0] < w and 0 <= self.ref_pixel[1] < h):
                raise ShapeMismatch(f"ref_pixel {self.ref_pixel} outside i1 shape {shot.i1.shape}")
        elif shot.i2.shape != self.shape:
            raise ShapeMismatch(f"shot {shot.shot_index}: i2 shape {shot.i2.shape} != {self.shape}")
        x = float(shot.i1[self.ref_pixel])
        self.n += 1
        self.s1 += x
        self.s2 += shot.i2
        self.s12 += x * shot.i2

    def result(self) -> CorrelationMap:
        if self.n < 2:
            raise EmptyEnsemble(f"need at least 2 shots, got {self.n}")
        m1 = self.s1 / self.n
        m2 = self.s2 / self.n
        return CorrelationMap(g_map=self.s12 / self.n - m1 * m2,
                              ref_pixel=self.ref_pixel, n_shots=self.n,
                              mean_i1=m1, mean_i2=m2)


def correlate(shots: Iterable[ShotRecord], ref_pixel: tuple[int, int]) -> CorrelationMap:
    """Covariance map over an ensemble of shots (fixed iteration order)."""
    acc = CovarianceAccumulator(ref_pixel)
    for shot in shots:
        acc.add(shot)
    return acc.result()


def auto_reference_pixel(shots: Sequence[ShotRecord]) -> tuple[int, int]:
    """Brightest pixel of the time-averaged Fourier map (best SNR choice)."""
    mean = None
    for shot in shots:
        mean = shot.i1.astype(float) if mean is None else mean + shot.i1
    if mean is None:
        raise EmptyEnsemble("no shots")
    idx = np.unravel_index(int(np.argmax(mean)), mean.shape)
    return (int(idx[0]), int(idx[1]))


def thermal_test(samples, n_bins: int = 50) -> HistogramFit:
    """Kolmogorov-Smirnov test of the samples against the thermal law
    P(I) = exp(-I/<I>)/<I> with <I> the sample mean."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 100:
        raise InsufficientSamples(f"need >= 100 samples, got {samples.size}")
    mean = float(samples.mean())
    if mean <= 0:
        ks, p = 1.0, 0.0
    else:
        ks, p = sstats.kstest(samples, "expon", args=(0.0, mean))
    counts, edges = np.histogram(samples, bins=n_bins)
    return HistogramFit(bin_edges=edges, counts=counts, fitted_mean=mean,
                       ks_statistic=float(ks), p_value=float(p))


def _snr_from_map(cm: CorrelationMap, support: np.ndarray) -> float:
    inside = cm.g_map[support]
    outside = cm.g_map[~support]
    sd = float(outside.std())
    if sd == 0:
        return 0.0
    return float((inside.mean() - outside.mean()) / sd)


def snr_report(shots: Iterable[ShotRecord], ref_pixel: tuple[int, int],
               support: np.ndarray, checkpoints: Sequence[int] | None = None) -> list[dict]:
    """Reconstruction SNR at increasing shot counts, in one streaming pass.

    SNR = (mean G inside `support` - mean G outside) / std(G outside), with
    `support` a boolean map of the expected object footprint on the image
    grid (including the reference-mode shift).  The covariance map is
    snapshotted from the running accumulator at each requested checkpoint;
    the full-ensemble value is always reported last.  Entries with fewer
    than 10 shots are flagged low-confidence.
    """
    support = np.asarray(support, dtype=bool)
    cps = set(int(c) for c in checkpoints) if checkpoints else None
    acc = CovarianceAccumulator(ref_pixel)
    out = []
    for shot in shots:
        acc.add(shot)
        if cps is not None and acc.n in cps and acc.n >= 2:
            out.append({"n_shots": acc.n, "snr": _snr_from_map(acc.result(), support),
                        "low_confidence": acc.n < 10})
    if acc.n < 2:
        raise EmptyEnsemble("need at least 2 shots")
    if not out or out[-1]["n_shots"] != acc.n:
        out.append({"n_shots": acc.n, "snr": _snr_from_map(acc.result(), support),
                    "low_confidence": acc.n < 10})
    return out


def jackknife_error(shots: Sequence[ShotRecord], ref_pixel: tuple[int, int]) -> np.ndarray:
    """Leave-one-out standard error of the covariance map, per pixel.

    Needs a materialized (re-iterable) shot sequence; two passes are made.
    """
    shots = list(shots)
    n = len(shots)
    if n < 10:
        raise InsufficientSamples(f"jackknife needs >= 10 shots, got {n}")
    r = (int(ref_pixel[0]), int(ref_pixel[1]))
    x = np.array([float(s.i1[r]) for s in shots])
    sy = np.zeros(shots[0].i2.shape)
    sxy = np.zeros_like(sy)
    for s, xi in zip(shots, x):
        sy += s.i2
        sxy += xi * s.i2
    sx = float(x.sum())
    m = n - 1
    gsum = np.zeros_like(sy)
    gsq = np.zeros_like(sy)
    for s, xi in zip(shots, x):
        gi = (sxy - xi * s.i2) / m - (sx - xi) * (sy - s.i2) / (m * m)
        gsum += gi
        gsq += gi * gi
    gbar = gsum / n
    var = (m / n) * (gsq - n * gbar * gbar)
    return np.sqrt(np.maximum(var, 0.0))
