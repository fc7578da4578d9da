"""Classical spin-vector analogue of the drive: alternating half-period rotations.

Spins are unit 3-vectors, one per site, stored as an (..., N, 3) array so
noise ensembles broadcast over the leading axes. The model is defined for
nearest-neighbor coupling only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import DriveParams


def _require_nn(p: DriveParams):
    if p.law != "nearest":
        raise ValueError("the classical map is defined for the nearest-neighbor law")


def local_frequencies(spins: np.ndarray, p: DriveParams) -> np.ndarray:
    """Neighbor-dependent rotation frequencies, frozen at the input configuration.

    Bulk sites see the detuning shifted by the mean of both neighbor z
    components; the chain ends carry half the coupling shift.
    """
    _require_nn(p)
    sz = spins[..., 2]
    alpha = np.empty_like(sz)
    if p.n_sites == 1:
        alpha[..., 0] = p.delta + 0.5 * p.v0
        return alpha
    alpha[..., 1:-1] = (
        p.delta + p.v0 + 0.5 * p.v0 * (sz[..., :-2] + sz[..., 2:])
    )
    alpha[..., 0] = p.delta + 0.5 * p.v0 + 0.5 * p.v0 * sz[..., 1]
    alpha[..., -1] = p.delta + 0.5 * p.v0 + 0.5 * p.v0 * sz[..., -2]
    return alpha


def tau1_map(spins: np.ndarray, p: DriveParams) -> np.ndarray:
    """First half-period: rotation about the tilted axis (omega0, 0, alpha_j).

    All frequencies are evaluated from the pre-step configuration, then every
    spin is rotated simultaneously for the half-period duration.
    """
    _require_nn(p)
    alpha = local_frequencies(spins, p)
    om = p.omega0
    d = alpha * alpha + om * om
    sqrt_d = np.sqrt(d)
    angle = 0.5 * sqrt_d * p.tau
    cos_a, sin_a = np.cos(angle), np.sin(angle)

    sx, sy, sz = spins[..., 0], spins[..., 1], spins[..., 2]
    out = np.empty_like(spins)
    with np.errstate(invalid="ignore", divide="ignore"):
        inv_d = np.where(d > 0, 1.0 / d, 0.0)
        inv_s = np.where(d > 0, 1.0 / np.where(sqrt_d > 0, sqrt_d, 1.0), 0.0)
    cross = om * alpha * (1.0 - cos_a) * inv_d
    out[..., 0] = (
        sx * (om * om + alpha * alpha * cos_a) * inv_d
        - sy * alpha * inv_s * sin_a
        + sz * cross
    )
    out[..., 1] = (
        sx * alpha * inv_s * sin_a + sy * cos_a - sz * om * inv_s * sin_a
    )
    out[..., 2] = (
        sx * cross + sy * om * inv_s * sin_a
        + sz * (alpha * alpha + om * om * cos_a) * inv_d
    )
    if np.any(d == 0):
        # no field at all: the spin is left untouched
        out = np.where((d == 0)[..., None], spins, out)
    return out


def tau2_map(spins: np.ndarray, p: DriveParams) -> np.ndarray:
    """Second half-period: rotation about z, leaving every z component fixed."""
    _require_nn(p)
    alpha = local_frequencies(spins, p)
    angle = 0.5 * alpha * p.tau
    cos_a, sin_a = np.cos(angle), np.sin(angle)
    sx, sy = spins[..., 0], spins[..., 1]
    out = np.empty_like(spins)
    out[..., 0] = sx * cos_a - sy * sin_a
    out[..., 1] = sx * sin_a + sy * cos_a
    out[..., 2] = spins[..., 2]
    return out


def period_map(spins: np.ndarray, p: DriveParams) -> np.ndarray:
    return tau2_map(tau1_map(spins, p), p)


def classical_energy(spins: np.ndarray, p: DriveParams) -> np.ndarray:
    """Time-averaged energy of classical configurations (batched over leading axes)."""
    _require_nn(p)
    sx, sz = spins[..., 0], spins[..., 2]
    e = 0.25 * p.omega0 * sx.sum(axis=-1)
    e = e + 0.5 * (p.delta + p.v0) * sz.sum(axis=-1)
    if p.n_sites > 1:
        e = e + 0.25 * p.v0 * np.sum(sz[..., :-1] * sz[..., 1:], axis=-1)
        e = e - 0.25 * p.v0 * (sz[..., 0] + sz[..., -1])
    return e


def _spins_from_angles(phi: np.ndarray) -> np.ndarray:
    out = np.zeros(phi.shape + (3,))
    out[..., 0] = np.sin(phi)
    out[..., 2] = np.cos(phi)
    return out


def classical_ground_state(
    p: DriveParams,
    restarts: int = 4,
    seed: int = 0,
    max_sweeps: int = 10_000,
    tol: float = 1e-12,
) -> tuple[np.ndarray, float]:
    """Lowest-energy spin configuration confined to the xz plane.

    Site angles are relaxed by exact per-site minimization (each sweep solves
    the single-spin problem in the frozen field of its neighbors), from the
    two uniform configurations plus seeded random restarts. Non-convergence
    within the sweep cap emits a warning and returns the best point found.
    """
    _require_nn(p)
    n = p.n_sites
    rng = np.random.default_rng(seed)
    starts = [np.zeros(n), np.full(n, np.pi)]
    starts += [rng.uniform(0, 2 * np.pi, n) for _ in range(restarts)]

    best_phi, best_e = None, np.inf
    field = 0.5 * (p.delta + p.v0)
    for phi in starts:
        phi = phi.copy()
        energy = classical_energy(_spins_from_angles(phi), p)
        converged = False
        for _ in range(max_sweeps):
            cos = np.cos(phi)
            for j in range(n):
                b = field
                if j > 0:
                    b += 0.25 * p.v0 * cos[j - 1]
                if j < n - 1:
                    b += 0.25 * p.v0 * cos[j + 1]
                if j in (0, n - 1) and n > 1:
                    b -= 0.25 * p.v0
                # minimize a sin(phi) + b cos(phi)
                phi[j] = np.arctan2(-0.25 * p.omega0, -b)
                cos[j] = np.cos(phi[j])
            new_energy = classical_energy(_spins_from_angles(phi), p)
            if abs(new_energy - energy) < tol:
                energy = new_energy
                converged = True
                break
            energy = new_energy
        if not converged:
            warnings.warn("ground-state sweep cap reached; using best point found")
        if energy < best_e:
            best_e, best_phi = energy, phi.copy()
    return _spins_from_angles(best_phi), float(best_e)


@dataclass(frozen=True, eq=False)
class NoiseEnsembleResult:
    periods: np.ndarray
    q: np.ndarray
    dq: np.ndarray
    realizations: int
    seed: int
    e_gs: float


def noise_averaged_heating(
    p: DriveParams,
    n_periods: int,
    realizations: int,
    amplitude: float = np.pi / 100,
    seed: int = 0,
) -> NoiseEnsembleResult:
    """Heating of a noisy ground-state ensemble under the stroboscopic map.

    Each realization perturbs the ground-state angles with i.i.d. uniform
    noise drawn from its own child stream of the master seed, so results are
    reproducible and independent of realization order. The normalized energy
    rise is measured against the ground-state energy, the spread across
    realizations alongside it.
    """
    if realizations < 1:
        raise ValueError("need at least one realization")
    if amplitude < 0:
        raise ValueError("noise amplitude must be >= 0")
    gs_spins, e_gs = classical_ground_state(p)
    phi_gs = np.arctan2(gs_spins[:, 0], gs_spins[:, 2])

    streams = np.random.SeedSequence(seed).spawn(realizations)
    phis = np.stack(
        [
            phi_gs + np.random.default_rng(s).uniform(-amplitude, amplitude, p.n_sites)
            for s in streams
        ]
    )
    spins = _spins_from_angles(phis)

    periods = np.arange(n_periods + 1)
    q = np.empty(n_periods + 1)
    dq = np.empty(n_periods + 1)
    for n in periods:
        energies = classical_energy(spins, p)
        q[n] = (energies.mean() - e_gs) / (-e_gs)
        dq[n] = energies.std()
        if n < n_periods:
            spins = period_map(spins, p)
    return NoiseEnsembleResult(periods, q, dq, realizations, seed, e_gs)
