"""Qualitative signatures separating the resonant-chaotic and detuned phases.

These run at 10 sites (12 where the trend over sizes matters), where the
contrast is already unambiguous and the full spectra stay cheap.
"""

import numpy as np
import pytest

from rydfloq.basis import build_basis
from rydfloq.dynamics import (
    autocorrelation,
    edge_correlator,
    eigenstate_entropy_map,
    evolve_with_spectrum,
    initial_state,
    mazur_bound,
    page_value,
    pca_projections,
)
from rydfloq.floquet import (
    eigenphase_histogram,
    floquet_spectrum,
    floquet_unitary,
)
from rydfloq.model import DriveParams

N = 10
CHAOTIC = 4.93
INTEGRABLE = 3.53


def params(delta, n=N):
    return DriveParams(n_sites=n, tau=np.pi, delta=delta, v0=2.0)


@pytest.fixture(scope="module")
def basis():
    return build_basis(N)


@pytest.fixture(scope="module")
def chaotic_spec(basis):
    return floquet_spectrum(params(CHAOTIC), basis, sector="full")


@pytest.fixture(scope="module")
def integrable_spec(basis):
    return floquet_spectrum(params(INTEGRABLE), basis, sector="full")


def test_eigenphase_density_concentrates_at_resonance(basis):
    occupancy = {}
    for tag, d0 in (("peak", 5.0), ("valley", 5.53)):
        p = DriveParams.from_delta0(N, np.pi, d0, 2.0)
        spec = floquet_spectrum(p, basis, sector="full", vectors=False)
        _, density = eigenphase_histogram(spec, bins=32)
        occupancy[tag] = float(np.mean(density > 0.1 * density.max()))
    # a dominant mode at the resonance, a broader spread in the valley
    assert occupancy["peak"] < occupancy["valley"]


def test_pca_occupation_contrast(basis, chaotic_spec, integrable_spec):
    psi0 = initial_state("phi0", basis)
    stats = {}
    for tag, spec in (("chaotic", chaotic_spec), ("integrable", integrable_spec)):
        psi_t = evolve_with_spectrum(spec, psi0, [100_000])[:, 0]
        _, eigen_weights = pca_projections(psi_t, spec)
        participation = 1.0 / np.sum(eigen_weights**2) / eigen_weights.size
        stats[tag] = (participation, float(eigen_weights.max()))
    assert stats["chaotic"][0] > 50 * stats["integrable"][0]
    assert stats["chaotic"][1] < 0.1
    assert stats["integrable"][1] > 0.5


def test_eigenstate_entropy_contrast(basis, chaotic_spec, integrable_spec):
    ref = page_value(N, N // 2)
    chaotic = eigenstate_entropy_map(chaotic_spec, basis)
    integrable = eigenstate_entropy_map(integrable_spec, basis)
    assert np.mean(chaotic.entropies) / ref > 0.7
    assert np.mean(integrable.entropies) / ref < 0.5
    assert chaotic.low_fraction < 0.1
    assert integrable.low_fraction > 0.5


def test_low_entropy_fraction_shrinks_with_size():
    fractions = []
    for n in (8, 10, 12):
        spec = floquet_spectrum(params(CHAOTIC, n), build_basis(n),
                                sector="full")
        fractions.append(
            eigenstate_entropy_map(spec, build_basis(n)).low_fraction
        )
    assert fractions[0] > fractions[1] > fractions[2]


def test_edge_mode_persistence_contrast(basis):
    psi0 = initial_state("phi0", basis)
    late = {}
    for tag, delta in (("integrable", INTEGRABLE), ("chaotic", CHAOTIC)):
        u = floquet_unitary(params(delta), basis)
        series = edge_correlator(u, psi0, 600, basis)
        late[tag] = float(series.values[300:].mean())
    assert late["integrable"] > 0.15
    assert late["chaotic"] < 0.10
    assert late["integrable"] > 3 * late["chaotic"]


def test_local_autocorrelation_freeze_and_decay(basis):
    psi0 = initial_state("phi0", basis)
    late = {}
    for tag, delta in (("integrable", INTEGRABLE), ("chaotic", CHAOTIC)):
        u = floquet_unitary(params(delta), basis)
        values = np.mean(
            [autocorrelation(u, psi0, j, 300, basis).values
             for j in range(1, N + 1)],
            axis=0,
        )
        late[tag] = float(values[150:].mean())
    assert late["integrable"] > 0.9
    assert late["chaotic"] < 0.2


def test_autocorrelation_mazur_ordering(basis, chaotic_spec, integrable_spec):
    z1 = np.where(np.arange(basis.dimension) & 1, 1.0, -1.0)
    bound_chaotic = mazur_bound(z1, chaotic_spec)
    bound_integrable = mazur_bound(z1, integrable_spec)
    assert bound_integrable > bound_chaotic