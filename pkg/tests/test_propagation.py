import numpy as np
import pytest

from twmghost.errors import SamplingViolation
from twmghost.geometry import Direction, InteractionGeometry, WaveVector
from twmghost.propagation import (
    ScalarField,
    fourier_plane,
    free_propagate,
    lens_image_2f2f,
)


def _gaussian_field(width=256, pitch=10e-6, w0=0.3e-3, lam=1064e-9):
    x = (np.arange(width) - width // 2) * pitch
    rho2 = x[:, None] ** 2 + x[None, :] ** 2
    return ScalarField(np.exp(-rho2 / w0 ** 2), pitch, lam)


def test_field_validation():
    with pytest.raises(SamplingViolation):
        ScalarField(np.zeros((100, 100)), 1e-5, 1e-6)   # not power of two
    with pytest.raises(SamplingViolation):
        ScalarField(np.zeros((64, 64)), -1e-5, 1e-6)
    bad = np.zeros((64, 64))
    bad[0, 0] = np.nan
    with pytest.raises(SamplingViolation):
        ScalarField(bad, 1e-5, 1e-6)


def test_coords_centered():
    f = _gaussian_field(width=64)
    x, y = f.coords()
    assert x[32] == 0.0 and y[32] == 0.0
    assert x[33] - x[32] == pytest.approx(f.pitch)


def test_power_riemann_sum():
    f = _gaussian_field()
    # closed form: integral of exp(-2 rho^2/w0^2) = pi w0^2 / 2
    expected = np.pi * (0.3e-3) ** 2 / 2
    assert f.power() == pytest.approx(expected, rel=1e-6)


def test_free_propagate_conserves_power():
    f = _gaussian_field()
    for dist in (0.01, 0.05, 0.2):
        out = free_propagate(f, dist)
        assert out.power() == pytest.approx(f.power(), rel=1e-3)


def test_free_propagate_zero_distance_identity():
    f = _gaussian_field()
    out = free_propagate(f, 0.0)
    assert np.array_equal(out.grid, f.grid)


def test_free_propagate_plane_wave_global_phase():
    # a uniform field is a DC eigenmode: only the exp(-i k z) factor applies
    f = ScalarField(np.ones((64, 64), dtype=complex), 16e-6, 1064e-9)
    z = 0.03
    out = free_propagate(f, z, bandlimit=False)
    expected = np.exp(-2j * np.pi / 1064e-9 * z)
    assert np.allclose(out.grid, expected, atol=1e-10)


def test_free_propagate_ramp_eigenmode():
    # a discrete ramp at grid frequency f0 is an eigenmode of the angular
    # spectrum with eigenvalue exp(i pi lam z f0^2) exp(-i k z)
    width, pitch, lam, z = 128, 16e-6, 1064e-9, 0.02
    m = 9
    f0 = m / (width * pitch)
    x = np.arange(width) * pitch
    ramp = np.exp(2j * np.pi * f0 * x)[:, None] * np.ones(width)[None, :]
    out = free_propagate(ScalarField(ramp, pitch, lam), z, bandlimit=False)
    eig = np.exp(1j * np.pi * lam * z * f0 ** 2) * np.exp(-2j * np.pi / lam * z)
    assert np.allclose(out.grid, eig * ramp, atol=1e-9)


def test_free_propagate_gaussian_abcd_oracle():
    # closed-form Gaussian beam: w(z) = w0 sqrt(1 + (z/zR)^2), peak 1/(1+(z/zR)^2)^.5
    w0, lam = 0.3e-3, 1064e-9
    zr = np.pi * w0 ** 2 / lam
    f = _gaussian_field(w0=w0, lam=lam)
    for z in (0.5 * zr, zr, 2.0 * zr):
        out = free_propagate(f, z, pad=2)
        wz = w0 * np.sqrt(1 + (z / zr) ** 2)
        mag = np.abs(out.grid)
        assert mag.max() == pytest.approx(w0 / wz, rel=1e-3)
        # 1/e radius of the amplitude along the central row
        x, _ = out.coords()
        row = mag[:, 128] / mag.max()
        measured = np.interp(-np.exp(-1.0), -row[128:], x[128:])  # 1/e crossing
        assert measured == pytest.approx(wz, rel=2e-3, abs=out.pitch)


def test_free_propagate_gaussian_1_over_e():
    w0, lam = 0.3e-3, 1064e-9
    zr = np.pi * w0 ** 2 / lam
    f = _gaussian_field(w0=w0, lam=lam)
    out = free_propagate(f, zr, pad=2)
    x, _ = out.coords()
    row = np.abs(out.grid[:, 128]) / np.abs(out.grid).max()
    crossing = x[128:][np.argmin(np.abs(row[128:] - np.exp(-1)))]
    assert crossing == pytest.approx(w0 * np.sqrt(2), rel=0.02)


def test_free_propagate_rejects_negative_distance():
    with pytest.raises(SamplingViolation):
        free_propagate(_gaussian_field(), -0.1)


def test_fourier_plane_parseval():
    f = _gaussian_field()
    out = fourier_plane(f, 0.15)
    assert out.power() == pytest.approx(f.power(), rel=1e-10)


def test_fourier_plane_tilt_position():
    # tilted plane wave exp(-i k (ux x + uy y)) focuses at
    # (f sin(beta), f cos(beta) sin(theta))
    width, pitch, lam, fl = 256, 16e-6, 1064e-9, 0.15
    k = 2 * np.pi / lam
    d = Direction(theta=1.5e-3, beta=-2.2e-3)
    ux, uy, _ = d.unit_vector()
    x = (np.arange(width) - width // 2) * pitch
    ramp = np.exp(-1j * k * (ux * x[:, None] + uy * x[None, :]))
    out = fourier_plane(ScalarField(ramp, pitch, lam), fl)
    ix, iy = np.unravel_index(np.argmax(np.abs(out.grid)), out.shape)
    xo, yo = out.coords()
    assert xo[ix] == pytest.approx(fl * np.sin(d.beta), abs=out.pitch)
    assert yo[iy] == pytest.approx(fl * np.cos(d.beta) * np.sin(d.theta), abs=out.pitch)


def test_fourier_plane_linearity():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    b = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    fa = fourier_plane(ScalarField(a, 16e-6, 1064e-9), 0.15).grid
    fb = fourier_plane(ScalarField(b, 16e-6, 1064e-9), 0.15).grid
    fab = fourier_plane(ScalarField(a + 2j * b, 16e-6, 1064e-9), 0.15).grid
    assert np.allclose(fab, fa + 2j * fb, atol=1e-10)


def test_fourier_plane_airy_first_null():
    # circular aperture of diameter D: first intensity null at 1.22 lam f / D
    width, pitch, lam, fl = 512, 10e-6, 1064e-9, 0.3
    diam = 0.6e-3
    x = (np.arange(width) - width // 2) * pitch
    rho = np.hypot(x[:, None], x[None, :])
    ap = (rho <= diam / 2).astype(complex)
    out = fourier_plane(ScalarField(ap, pitch, lam), fl)
    prof = np.abs(out.grid[width // 2 :, width // 2]) ** 2
    j = 1
    while not (prof[j] < prof[j - 1] and prof[j] <= prof[j + 1]):
        j += 1
    # parabolic refinement around the first local minimum
    num = prof[j - 1] - prof[j + 1]
    den = prof[j - 1] - 2 * prof[j] + prof[j + 1]
    null = (j + 0.5 * num / den) * out.pitch
    assert null == pytest.approx(1.22 * lam * fl / diam, rel=0.05)


def test_fourier_plane_residual_phase_flat_at_focal_spacing():
    f = _gaussian_field()
    a = fourier_plane(f, 0.15, d_lens=0.15)
    b = fourier_plane(f, 0.15, d_lens=0.10)
    # same magnitude, different residual quadratic phase
    assert np.allclose(np.abs(a.grid), np.abs(b.grid), atol=1e-12)
    assert not np.allclose(np.angle(a.grid), np.angle(b.grid))


def _small_geometry():
    k1 = WaveVector(Direction(0, 0), 1064e-9, 1.0)
    k2 = WaveVector(Direction(0, 0), 1064e-9, 1.0)
    k3 = WaveVector(Direction(0, 0), 532e-9, 1.0)
    return InteractionGeometry(k1, k2, k3, crystal_length=4e-3,
                               d_O=0.6, d_F=0.2, f=0.3, d=0.4, s2=0.2,
                               lens_fourier_f=0.15)


def test_lens_image_quadrature_oracle():
    # brute-force Fresnel sum for a handful of output pixels
    g = _small_geometry()
    rng = np.random.default_rng(5)
    width, pitch = 64, 52e-6
    grid = np.zeros((width, width), dtype=complex)
    # sparse random sources keep the occupied aperture small (chirp-safe)
    for _ in range(12):
        grid[rng.integers(20, 44), rng.integers(20, 44)] = rng.normal() + 1j * rng.normal()
    obj = ScalarField(grid, pitch, 532e-9)
    out = lens_image_2f2f(obj, g)

    k3, d, f = g.k3.magnitude, g.d, g.f
    x, y = obj.coords()
    chirped = grid * np.exp(0.5j * k3 * (f - d) / (d * f)
                            * (x[:, None] ** 2 + y[None, :] ** 2))
    xo, yo = out.coords()
    for ix, iy in [(32, 32), (10, 50), (40, 22), (0, 0)]:
        kernel = np.exp(1j * k3 * (x[:, None] * xo[ix] + y[None, :] * yo[iy]) / d)
        val = (k3 / (2j * np.pi * d)) * np.exp(0.5j * k3 * (xo[ix] ** 2 + yo[iy] ** 2) / d) \
            * np.sum(chirped * kernel) * pitch ** 2
        assert abs(out.grid[ix, iy] - val) <= 1e-10 * np.abs(out.grid).max()


def test_lens_image_output_pitch():
    g = _small_geometry()
    obj = ScalarField(np.zeros((256, 256), dtype=complex), 51.953125e-6, 532e-9)
    obj.grid[128, 128] = 1.0
    out = lens_image_2f2f(obj, g)
    assert out.pitch == pytest.approx(532e-9 * 0.4 / (256 * 51.953125e-6))
    assert out.pitch == pytest.approx(16e-6, rel=1e-3)


def test_lens_image_chirp_sampling_guard():
    # a bright field filling the whole coarse object grid aliases the input chirp
    g = _small_geometry()
    obj = ScalarField(np.ones((256, 256), dtype=complex), 52e-6, 532e-9)
    with pytest.raises(SamplingViolation):
        lens_image_2f2f(obj, g)
