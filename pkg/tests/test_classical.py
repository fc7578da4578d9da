import numpy as np
import pytest

from rydfloq.classical import (
    classical_energy,
    classical_ground_state,
    local_frequencies,
    noise_averaged_heating,
    period_map,
    tau1_map,
    tau2_map,
)
from rydfloq.model import DriveParams


def params(**kw):
    defaults = dict(n_sites=6, tau=np.pi, delta=4.93, v0=2.0, law="nearest")
    defaults.update(kw)
    return DriveParams(**defaults)


def test_requires_nearest_neighbor_law():
    p = params(law="power")
    spins = np.zeros((6, 3))
    spins[:, 2] = 1.0
    with pytest.raises(ValueError):
        tau1_map(spins, p)


def test_local_frequencies_bulk_and_edges():
    p = params(n_sites=4)
    spins = np.zeros((4, 3))
    spins[:, 2] = [1.0, -1.0, 1.0, -1.0]
    alpha = local_frequencies(spins, p)
    d, v = p.delta, p.v0
    assert alpha[0] == pytest.approx(d + v / 2 + v / 2 * (-1.0))
    assert alpha[1] == pytest.approx(d + v + v / 2 * (1.0 + 1.0))
    assert alpha[2] == pytest.approx(d + v + v / 2 * (-1.0 - 1.0))
    assert alpha[3] == pytest.approx(d + v / 2 + v / 2 * (1.0))


def test_tau1_pure_x_rotation_case():
    p = params(n_sites=3, delta=0.0, v0=0.0, tau=0.73)
    spins = np.zeros((3, 3))
    spins[:, 2] = 1.0
    out = tau1_map(spins, p)
    angle = p.omega0 * p.tau / 2
    for j in range(3):
        assert np.allclose(out[j], [0.0, -np.sin(angle), np.cos(angle)], atol=1e-14)


def test_tau1_fixed_point_on_axis():
    p = params(n_sites=1, delta=0.9, v0=0.6)
    alpha = p.delta + p.v0 / 2
    axis = np.array([p.omega0, 0.0, alpha])
    axis /= np.linalg.norm(axis)
    spins = axis[None, :].copy()
    out = tau1_map(spins, p)
    assert np.allclose(out, spins, atol=1e-14)


def test_tau1_preserves_norms():
    rng = np.random.default_rng(4)
    p = params(n_sites=8, tau=1.3)
    spins = rng.standard_normal((8, 3))
    spins /= np.linalg.norm(spins, axis=1, keepdims=True)
    out = tau1_map(spins, p)
    assert np.max(np.abs(np.linalg.norm(out, axis=1) - 1.0)) < 1e-12


def test_tau2_quarter_turn_and_z_invariance():
    p = params(n_sites=1, delta=1.0, v0=0.0, tau=np.pi)
    # alpha = delta = 1, angle = alpha*tau/2 = pi/2
    spins = np.array([[1.0, 0.0, 0.0]])
    out = tau2_map(spins, p)
    assert np.allclose(out, [[0.0, 1.0, 0.0]], atol=1e-14)

    rng = np.random.default_rng(1)
    p8 = params(n_sites=8)
    spins = rng.standard_normal((8, 3))
    spins /= np.linalg.norm(spins, axis=1, keepdims=True)
    out = tau2_map(spins, p8)
    assert np.array_equal(out[:, 2], spins[:, 2])


def test_norm_drift_over_many_periods():
    rng = np.random.default_rng(6)
    p = params(n_sites=10)
    spins = rng.standard_normal((10, 3))
    spins /= np.linalg.norm(spins, axis=1, keepdims=True)
    for _ in range(10_000):
        spins = period_map(spins, p)
    assert np.max(np.abs(np.linalg.norm(spins, axis=1) - 1.0)) < 1e-9


def test_zero_drive_conserves_diagonal_energy():
    rng = np.random.default_rng(8)
    p = params(n_sites=6, omega0=0.0)
    spins = rng.standard_normal((6, 3))
    spins /= np.linalg.norm(spins, axis=1, keepdims=True)
    e0 = classical_energy(spins, p)
    for _ in range(50):
        spins = period_map(spins, p)
    assert classical_energy(spins, p) == pytest.approx(e0, abs=1e-10)


def test_ground_state_field_dominated_limits():
    p = params(n_sites=5, omega0=0.0, delta=3.0, v0=0.0)
    spins, _ = classical_ground_state(p)
    assert np.allclose(spins[:, 2], -1.0, atol=1e-9)
    p_up = params(n_sites=5, omega0=0.0, delta=-3.0, v0=0.0)
    spins_up, _ = classical_ground_state(p_up)
    assert np.allclose(spins_up[:, 2], 1.0, atol=1e-9)


def test_ground_state_beats_uniform_candidates():
    p = params(n_sites=12)
    _, e = classical_ground_state(p)
    up = np.zeros((12, 3))
    up[:, 2] = 1.0
    down = np.zeros((12, 3))
    down[:, 2] = -1.0
    assert e <= classical_energy(up, p) + 1e-12
    assert e <= classical_energy(down, p) + 1e-12


def test_heating_zero_noise_zero_q():
    p = params(n_sites=10)
    result = noise_averaged_heating(p, n_periods=0, realizations=3, amplitude=0.0)
    assert result.q[0] == pytest.approx(0.0, abs=1e-12)
    assert result.dq[0] == pytest.approx(0.0, abs=1e-12)


def test_heating_reproducible_with_seed():
    p = params(n_sites=12)
    a = noise_averaged_heating(p, 40, realizations=5, seed=123)
    b = noise_averaged_heating(p, 40, realizations=5, seed=123)
    assert np.array_equal(a.q, b.q)
    assert np.array_equal(a.dq, b.dq)
    c = noise_averaged_heating(p, 40, realizations=5, seed=124)
    assert not np.array_equal(a.q, c.q)


def test_heating_validation():
    p = params()
    with pytest.raises(ValueError):
        noise_averaged_heating(p, 10, realizations=0)
    with pytest.raises(ValueError):
        noise_averaged_heating(p, 10, realizations=2, amplitude=-0.1)


def test_chaotic_heats_faster_than_detuned():
    # contrast between the resonant and off-resonant drive at modest size
    base = dict(n_sites=40, tau=np.pi, v0=2.0, law="nearest")
    hot = noise_averaged_heating(
        DriveParams(delta=4.93, **base), 400, realizations=20, seed=7
    )
    cold = noise_averaged_heating(
        DriveParams(delta=3.53, **base), 400, realizations=20, seed=7
    )
    assert hot.q[-50:].mean() > cold.q[-50:].mean()
