import numpy as np
import pytest

from rydfloq.basis import build_basis
from rydfloq.floquet import FloquetSpectrum, floquet_spectrum
from rydfloq.model import DriveParams
from rydfloq.spectral import (
    ENSEMBLE,
    inverse_participation_ratio,
    level_spacing_ratios,
    mean_r_point,
    mean_r_scan,
    poisson_mean_r_monte_carlo,
)


def test_ratio_arithmetic():
    stats = level_spacing_ratios(np.array([0.1, 0.2, 0.4]))
    assert np.allclose(stats.ratios, [0.5])
    assert stats.mean_r == pytest.approx(0.5)
    assert stats.count == 1


def test_picket_fence_gives_unity():
    stats = level_spacing_ratios(np.linspace(0, 2 * np.pi, 100, endpoint=False))
    assert np.allclose(stats.ratios, 1.0)


def test_zero_gap_counts_as_zero():
    stats = level_spacing_ratios(np.array([0.0, 0.0, 0.3, 0.5]))
    assert stats.ratios[0] == 0.0
    assert stats.count == 2


def test_requires_sorted_and_enough_phases():
    with pytest.raises(ValueError, match="sorted"):
        level_spacing_ratios(np.array([0.3, 0.1, 0.2]))
    with pytest.raises(ValueError, match="at least 3"):
        level_spacing_ratios(np.array([0.1, 0.2]))


def test_invariance_under_shift_and_scale():
    rng = np.random.default_rng(11)
    phases = np.sort(rng.uniform(0, 1, 500))
    base = level_spacing_ratios(phases)
    shifted = level_spacing_ratios(phases + 0.77)
    scaled = level_spacing_ratios(phases * 3.2)
    assert np.allclose(base.ratios, shifted.ratios)
    assert np.allclose(base.ratios, scaled.ratios)


def test_poisson_monte_carlo_reference():
    mean, spread = poisson_mean_r_monte_carlo(2000, n_batches=10, seed=42)
    assert abs(mean - ENSEMBLE.poisson_mean_r) < 0.02
    assert abs(mean - ENSEMBLE.poisson_mean_r) < 3 * max(spread, 1e-3)


def test_ensemble_constants():
    assert ENSEMBLE.coe_mean_r == 0.527
    assert ENSEMBLE.poisson_mean_r == 0.386


def test_mean_r_point_ratios_in_unit_interval():
    p = DriveParams(n_sites=8, tau=np.pi, delta=2.93, v0=2.0)
    stats = mean_r_point(p, "even")
    assert 0.0 <= stats.mean_r <= 1.0
    assert np.all((stats.ratios >= 0) & (stats.ratios <= 1))


def test_scan_propagates_point_failures():
    good = DriveParams(n_sites=4, tau=np.pi, delta=1.2, v0=2.0)
    degenerate = DriveParams(n_sites=4, tau=np.pi, delta=0.0, v0=0.0, omega0=0.0)
    rows = mean_r_scan([good, degenerate, good], sector="even")
    assert rows[0].error is None and rows[2].error is None
    assert rows[1].error is not None and "degenerate" in rows[1].error
    assert rows[0].mean_r == pytest.approx(rows[2].mean_r)


def test_scan_rejects_empty_grid():
    with pytest.raises(ValueError):
        mean_r_scan([])


def test_ipr_localized_endpoint():
    basis = build_basis(4)
    d = basis.dimension
    spec = FloquetSpectrum(
        np.zeros(d), np.eye(d, dtype=complex), None, "full"
    )
    assert inverse_participation_ratio(spec, basis) == pytest.approx(1.0, abs=1e-10)


def test_ipr_uniform_frame_endpoint():
    basis = build_basis(4)
    d = basis.dimension
    dft = np.fft.fft(np.eye(d)) / np.sqrt(d)
    spec = FloquetSpectrum(np.zeros(d), dft, None, "full")
    assert inverse_participation_ratio(spec, basis) == pytest.approx(
        1.0 / d, abs=1e-10
    )


def test_ipr_requires_vectors():
    basis = build_basis(3)
    spec = FloquetSpectrum(np.zeros(8), None, None, "full")
    with pytest.raises(ValueError):
        inverse_participation_ratio(spec, basis)


def test_ipr_invariances():
    rng = np.random.default_rng(5)
    basis = build_basis(4)
    d = basis.dimension
    v = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0]
    spec = FloquetSpectrum(np.zeros(d), v, None, "full")
    base = inverse_participation_ratio(spec, basis)
    rephased = v * np.exp(1j * rng.uniform(0, 2 * np.pi, d))
    spec2 = FloquetSpectrum(np.zeros(d), rephased, None, "full")
    assert inverse_participation_ratio(spec2, basis) == pytest.approx(base, abs=1e-12)
    permuted = v[:, rng.permutation(d)][rng.permutation(d), :]
    spec3 = FloquetSpectrum(np.zeros(d), permuted, None, "full")
    assert inverse_participation_ratio(spec3, basis) == pytest.approx(base, abs=1e-12)


def test_ipr_dips_at_chaos_peak():
    # the participation ratio drops at the resonant shifted detuning
    tau, v0, n = np.pi, 2.0, 10
    values = {}
    for d0 in (4.5, 5.0, 5.5):
        p = DriveParams.from_delta0(n, tau, d0, v0)
        spec = floquet_spectrum(p, sector="full", vectors=True)
        values[d0] = inverse_participation_ratio(spec, build_basis(n))
    assert values[5.0] < 0.5 * values[4.5]
    assert values[5.0] < 0.5 * values[5.5]
