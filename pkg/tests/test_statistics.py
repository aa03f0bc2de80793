import numpy as np
import pytest

from twmghost.errors import EmptyEnsemble, InsufficientSamples, ShapeMismatch
from twmghost.pipeline import ShotRecord
from twmghost.statistics import (
    CovarianceAccumulator,
    auto_reference_pixel,
    correlate,
    jackknife_error,
    snr_report,
    thermal_test,
)


def _synthetic_shots(rng, n=60, w=16, coupled=False):
    """Exponential i1/i2 ensembles; `coupled` copies the reference value
    into a block of i2 so the covariance there is known."""
    shots = []
    for s in range(n):
        i1 = rng.exponential(1.0, size=(w, w))
        i2 = rng.exponential(1.0, size=(w, w))
        if coupled:
            i2[2:6, 2:6] = i1[3, 3]
        shots.append(ShotRecord(i1=i1, i2=i2, shot_index=s))
    return shots


def test_correlate_against_direct_covariance(rng):
    shots = _synthetic_shots(rng, n=40)
    ref = (3, 3)
    cm = correlate(shots, ref)
    i1r = np.array([s.i1[ref] for s in shots])
    i2 = np.array([s.i2 for s in shots])
    direct = (i2 * i1r[:, None, None]).mean(axis=0) - i1r.mean() * i2.mean(axis=0)
    assert np.allclose(cm.g_map, direct, atol=1e-12)
    assert cm.n_shots == 40
    assert cm.mean_i1 == pytest.approx(i1r.mean())
    assert np.allclose(cm.mean_i2, i2.mean(axis=0))


def test_correlate_recovers_self_covariance(rng):
    shots = _synthetic_shots(rng, n=400, coupled=True)
    cm = correlate(shots, (3, 3))
    i1r = np.array([s.i1[3, 3] for s in shots])
    var = i1r.var()  # 1/n convention matches the accumulator
    assert np.allclose(cm.g_map[2:6, 2:6], var, atol=1e-12)
    # uncoupled pixels stay near zero
    assert np.abs(cm.g_map[10:, 10:]).max() < 5.0 / np.sqrt(400)


def test_accumulator_streaming_equals_batch(rng):
    shots = _synthetic_shots(rng, n=25)
    acc = CovarianceAccumulator((5, 7))
    for s in shots:
        acc.add(s)
    cm = acc.result()
    assert np.allclose(cm.g_map, correlate(shots, (5, 7)).g_map, atol=1e-12)


def test_accumulator_errors(rng):
    acc = CovarianceAccumulator((0, 0))
    with pytest.raises(EmptyEnsemble):
        acc.result()
    acc.add(ShotRecord(i1=np.ones((4, 4)), i2=np.ones((4, 4)), shot_index=0))
    with pytest.raises(ShapeMismatch):
        acc.add(ShotRecord(i1=np.ones((8, 8)), i2=np.ones((8, 8)), shot_index=1))


def test_auto_reference_pixel(rng):
    shots = _synthetic_shots(rng, n=10)
    for s in shots:
        s.i1[9, 4] += 50.0
    assert auto_reference_pixel(shots) == (9, 4)


def test_thermal_test_accepts_exponential(rng):
    fit = thermal_test(rng.exponential(2.5, size=5000))
    assert fit.p_value > 0.01
    assert fit.fitted_mean == pytest.approx(2.5, rel=0.1)
    assert fit.counts.sum() == 5000


def test_thermal_test_rejects_gaussian(rng):
    samples = np.abs(rng.normal(5.0, 0.3, size=5000))
    fit = thermal_test(samples)
    assert fit.p_value < 1e-6


def test_thermal_test_needs_samples(rng):
    with pytest.raises(InsufficientSamples):
        thermal_test(rng.exponential(1.0, size=50))


def test_jackknife_matches_brute_force(rng):
    shots = _synthetic_shots(rng, n=15)
    ref = (3, 3)
    se = jackknife_error(shots, ref)
    n = len(shots)
    full = [correlate([s for j, s in enumerate(shots) if j != i], ref).g_map
            for i in range(n)]
    loo = np.array(full)
    mean_loo = loo.mean(axis=0)
    brute = np.sqrt((n - 1) / n * np.sum((loo - mean_loo) ** 2, axis=0))
    assert np.allclose(se, brute, rtol=1e-8, atol=1e-14)


def test_jackknife_independence_bound(rng):
    # for independent ensembles the covariance stays within 5 jackknife
    # errors everywhere (seeded; ~0.999^256 chance level per pixel)
    shots = _synthetic_shots(rng, n=200)
    cm = correlate(shots, (8, 8))
    se = jackknife_error(shots, (8, 8))
    assert np.all(np.abs(cm.g_map) < 5.0 * se)


def test_jackknife_requires_enough_shots(rng):
    with pytest.raises(InsufficientSamples):
        jackknife_error(_synthetic_shots(rng, n=5), (0, 0))


def test_snr_report_checkpoints(rng):
    shots = _synthetic_shots(rng, n=120, coupled=True)
    support = np.zeros((16, 16), dtype=bool)
    support[2:6, 2:6] = True
    rows = snr_report(shots, (3, 3), support, checkpoints=[30, 60, 120])
    assert [r["n_shots"] for r in rows] == [30, 60, 120]
    assert not any(r["low_confidence"] for r in rows)
    # final entry reproduces the batch computation
    cm = correlate(shots, (3, 3))
    inside = cm.g_map[support].mean()
    outside = cm.g_map[~support]
    assert rows[-1]["snr"] == pytest.approx((inside - outside.mean()) / outside.std())
    # a genuinely coupled block should stand far above the floor
    assert rows[-1]["snr"] > 5.0


def test_snr_report_appends_final(rng):
    shots = _synthetic_shots(rng, n=50, coupled=True)
    support = np.zeros((16, 16), dtype=bool)
    support[2:6, 2:6] = True
    rows = snr_report(shots, (3, 3), support, checkpoints=[20])
    assert [r["n_shots"] for r in rows] == [20, 50]
    rows = snr_report(shots, (3, 3), support)
    assert [r["n_shots"] for r in rows] == [50]


def test_snr_report_empty(rng):
    support = np.zeros((16, 16), dtype=bool)
    with pytest.raises(EmptyEnsemble):
        snr_report([], (0, 0), support)
