import numpy as np
import pytest
import scipy.linalg

from rydfloq.basis import build_basis, parity_matrix
from rydfloq.effective import (
    bch_effective,
    bch_effective_bulk,
    bdg_quadratic_oracle,
    boundary_constants,
    dense_quadratic_ed,
    fermion_dispersion,
    fermion_many_body_spectrum,
    momentum_grid,
    pauli_term,
)
from rydfloq.floquet import floquet_unitary
from rydfloq.model import DriveParams, averaged_hamiltonian, harmonic_number


def test_pauli_term_site_placement():
    # z on site 1 acts on the least significant bit
    z1 = pauli_term(2, {1: "z"}).toarray()
    assert np.allclose(np.diag(z1), [-1, 1, -1, 1])
    z2 = pauli_term(2, {2: "z"}).toarray()
    assert np.allclose(np.diag(z2), [-1, -1, 1, 1])
    x1 = pauli_term(2, {1: "x"}).toarray()
    assert x1[0, 1] == 1.0 and x1[2, 3] == 1.0


def test_boundary_constants_match_closed_forms():
    p = DriveParams(n_sites=9, tau=0.3, delta=1.1, v0=2.0)
    c, v_b = boundary_constants(p)
    n = 9
    c_expect = n * p.delta / 2 + (p.v0 / 4) * (
        n * harmonic_number(6, n - 1) - harmonic_number(5, n - 1)
    )
    assert c == pytest.approx(c_expect, abs=1e-12)
    assert v_b == pytest.approx((p.v0 / 4) * harmonic_number(6, n - 2), abs=1e-12)


def test_order_zero_equals_time_average():
    p = DriveParams(n_sites=5, tau=0.4, delta=0.8, v0=2.0)
    eff = bch_effective(p, order=0)
    assert np.max(np.abs(eff.matrix - averaged_hamiltonian(p))) < 1e-14


def test_order_validation():
    p = DriveParams(n_sites=3, tau=0.2, delta=0.1, v0=1.0)
    with pytest.raises(ValueError):
        bch_effective(p, order=3)


@pytest.mark.parametrize("order", [0, 1, 2])
def test_effective_hermitian_and_parity_symmetric(order):
    p = DriveParams(n_sites=6, tau=0.3, delta=0.9, v0=2.0)
    eff = bch_effective(p, order)
    h = eff.matrix
    assert np.max(np.abs(h - h.conj().T)) < 1e-12
    pi = parity_matrix(build_basis(6)).toarray()
    assert np.max(np.abs(h @ pi - pi @ h)) < 1e-10


def test_series_shrinks_linearly_in_tau():
    p = DriveParams(n_sites=4, tau=0.4, delta=0.6, v0=2.0)
    gaps = []
    for tau in (0.4, 0.2, 0.1):
        q = p.with_(tau=tau)
        d = np.max(
            np.abs(bch_effective(q, 2).matrix - bch_effective(q, 0).matrix)
        )
        gaps.append(d)
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.15)
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=0.15)


def test_second_order_reconstruction_scaling():
    # reconstructed period map error must fall at least cubically in tau
    taus = [0.2, 0.1, 0.05]
    errors = []
    for tau in taus:
        p = DriveParams.from_delta0(6, tau, 0.0, 2.0)
        u_exact = floquet_unitary(p)
        h_eff = bch_effective(p, 2).matrix
        u_eff = scipy.linalg.expm(-1j * p.period * h_eff)
        errors.append(np.max(np.abs(u_eff - u_exact)))
    slopes = np.diff(np.log(errors)) / np.diff(np.log(taus))
    assert np.all(slopes >= 3.0)


def test_bulk_variant_relations():
    p = DriveParams(n_sites=6, tau=0.3, delta=0.5, v0=2.0)
    full = bch_effective_bulk(p, 2, boundary=True)
    bulk_only = bch_effective_bulk(p, 2, boundary=False)
    n = 6
    diff = full.matrix - bulk_only.matrix
    expect = full.c * np.eye(1 << n) + (
        -full.v_b
        * (
            (1 - p.omega0**2 * p.tau**2 / 24)
            * (pauli_term(n, {1: "z"}) + pauli_term(n, {n: "z"}))
            + (p.omega0 * p.tau / 4)
            * (pauli_term(n, {1: "y"}) + pauli_term(n, {n: "y"}))
        ).toarray()
    )
    assert np.max(np.abs(diff - expect)) < 1e-12


def test_dispersion_closed_form_points():
    # cosine = 1 at zero momentum
    eps0 = fermion_dispersion(8, 1.0, 2.0, 0.0)
    h = 1.0 * 8 / (2.0 * 7)
    assert eps0 == pytest.approx(2.0 * 7 / 16 * abs(1 - h))
    # large-chain edge of the zone
    big = 4000
    h_inf = 1.0 * big / (2.0 * (big - 1))
    eps_pi = fermion_dispersion(big, 1.0, 2.0, np.pi)
    assert eps_pi == pytest.approx((2.0 / 2) * (1 + h_inf), rel=1e-3)
    assert eps_pi == pytest.approx(1.5, rel=1e-3)


def test_dispersion_gap_closes_at_unit_field():
    # h = 1 requires omega0 = v0 (N-1)/N
    n = 10
    v0 = 2.0
    omega0 = v0 * (n - 1) / n
    k = 1e-6
    assert fermion_dispersion(n, omega0, v0, k) < 1e-5
    assert fermion_dispersion(n, omega0, v0, 0.3) == pytest.approx(
        fermion_dispersion(n, omega0, v0, -0.3)
    )


def test_dispersion_rejects_zero_coupling():
    with pytest.raises(ValueError):
        fermion_dispersion(8, 1.0, 0.0, 0.1)


@pytest.mark.parametrize("n", [4, 6, 8, 12])
def test_bdg_periodic_matches_dispersion(n):
    analytic = np.sort(fermion_dispersion(n, 1.0, 2.0, momentum_grid(n)))
    numeric = bdg_quadratic_oracle(n, 1.0, 2.0, "periodic")
    assert np.max(np.abs(numeric - analytic)) < 1e-10


def test_bdg_zero_coupling_free_spins():
    evals = bdg_quadratic_oracle(6, 1.0, 0.0, "open")
    assert np.allclose(evals, 0.5)


def test_bdg_particle_hole_pairs():
    a = omega0, v0 = 1.0, 2.0
    for boundary in ("open", "periodic"):
        n = 7
        hop = bdg_quadratic_oracle(n, omega0, v0, boundary)
        assert np.all(hop >= -1e-12)
        # reconstruct the full spectrum and check +- symmetry
        full_pos = hop
        assert full_pos.size == n


def test_open_chain_differs_from_ring_at_finite_size():
    n = 8
    ring = bdg_quadratic_oracle(n, 1.0, 2.0, "periodic")
    open_chain = bdg_quadratic_oracle(n, 1.0, 2.0, "open")
    assert np.max(np.abs(ring - open_chain)) > 1e-3


def test_many_body_ground_and_symmetry():
    n = 6
    eps = fermion_dispersion(n, 1.0, 2.0, momentum_grid(n))
    spectrum = fermion_many_body_spectrum(n, 1.0, 2.0)
    assert spectrum[0] == pytest.approx(-0.5 * eps.sum())
    assert spectrum[-1] == pytest.approx(+0.5 * eps.sum())
    # occupation complement flips the sign of every energy
    assert np.max(np.abs(spectrum + spectrum[::-1])) < 1e-10


def test_many_body_matches_dense_oracle():
    n = 8
    spectrum = fermion_many_body_spectrum(n, 1.0, 2.0)
    dense = dense_quadratic_ed(n, 1.0, 2.0, "periodic")
    a = spectrum - spectrum.mean()
    b = dense - dense.mean()
    assert np.max(np.abs(a - b)) < 1e-8


def test_many_body_rejects_open_boundary():
    with pytest.raises(ValueError):
        fermion_many_body_spectrum(6, 1.0, 2.0, boundary="open")
