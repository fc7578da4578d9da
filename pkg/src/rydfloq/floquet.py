"""One-period propagator of the square-wave drive and its eigenphase spectra.

The period map is the product of two half-period propagators: the strongly
driven half acts first in time, the weakly driven (default: undriven,
diagonal) half second. Both halves commute with site reversal, so spectra can
be built per parity sector at a fraction of the full-space cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .basis import SpinBasis, ParityBlocks, build_basis, build_parity_blocks
from .model import DriveParams, build_h2_diagonal, sigma_x_total

SECTORS = ("full", "even", "odd")

#: grouping tolerance for degenerate quasienergies, in units of the high
#: Rabi frequency; well above arithmetic noise, well below physical gaps
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FloquetSpectrum:
    """Sorted eigenphases in [0, 2pi) with optional eigenvectors and labels.

    For sector spectra the eigenvectors are expressed in sector coordinates;
    `sector_transform` (columns of the parity map) lifts them back to the
    computational basis.
    """

    eigenphases: np.ndarray
    eigenvectors: np.ndarray | None
    parity_labels: np.ndarray | None
    sector: str
    params: DriveParams | None = None
    sector_transform: sp.csc_matrix | None = None

    @property
    def dimension(self) -> int:
        return self.eigenphases.size

    def quasienergies(self) -> np.ndarray:
        if self.params is None:
            raise ValueError("params snapshot required to convert phases to energies")
        return self.eigenphases / self.params.period

    def lifted_vectors(self) -> np.ndarray:
        """Eigenvectors as columns over the computational basis."""
        if self.eigenvectors is None:
            raise ValueError("spectrum carries no eigenvectors")
        if self.sector == "full" or self.sector_transform is None:
            return self.eigenvectors
        return self.sector_transform @ self.eigenvectors


def _expm_hermitian(h: np.ndarray, tau: float) -> np.ndarray:
    """exp(-i h tau) through the eigendecomposition of Hermitian h."""
    evals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * tau * evals)) @ vecs.conj().T


def floquet_unitary(p: DriveParams, basis: SpinBasis | None = None) -> np.ndarray:
    """Dense one-period propagator over the full computational basis."""
    basis = basis if basis is not None else build_basis(p.n_sites)
    h2 = build_h2_diagonal(p, basis)
    x = sigma_x_total(p.n_sites)
    h1 = (0.5 * p.omega0) * x.toarray()
    h1[np.diag_indices_from(h1)] += h2
    u1 = _expm_hermitian(h1, p.tau)
    if p.omega_low == 0.0:
        return np.exp(-1j * p.tau * h2)[:, None] * u1
    hl = (0.5 * p.omega_low) * x.toarray()
    hl[np.diag_indices_from(hl)] += h2
    return _expm_hermitian(hl, p.tau) @ u1


def sector_hamiltonian(
    p: DriveParams,
    blocks: ParityBlocks,
    sector: str,
    rabi: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Transverse-field Hamiltonian restricted to one parity sector.

    Returns the dense sector matrix and the sector diagonal of the undriven
    part (the diagonal is reflection invariant, so it carries over entrywise
    at the sector representatives).
    """
    h2 = build_h2_diagonal(p)
    b = blocks.sector(sector)
    x = sigma_x_total(p.n_sites)
    h_sp = (0.5 * rabi) * x + sp.diags(h2)
    h_sec = (b.conj().T @ (h_sp @ b)).toarray()
    reps = blocks.even_reps if sector == "even" else blocks.odd_reps
    return h_sec, h2[reps]


def sector_unitary(
    p: DriveParams,
    blocks: ParityBlocks,
    sector: str,
) -> np.ndarray:
    """One-period propagator restricted to a parity sector."""
    h1_sec, h2_sec = sector_hamiltonian(p, blocks, sector, p.omega0)
    u1 = _expm_hermitian(h1_sec, p.tau)
    if p.omega_low == 0.0:
        return np.exp(-1j * p.tau * h2_sec)[:, None] * u1
    hl_sec, _ = sector_hamiltonian(p, blocks, sector, p.omega_low)
    return _expm_hermitian(hl_sec, p.tau) @ u1


def _phases_from_eigvals(lam: np.ndarray) -> np.ndarray:
    # the propagator carries e^{-i theta}; fold into [0, 2pi)
    return np.mod(-np.angle(lam), 2.0 * np.pi)


def unitarity_residual(u: np.ndarray) -> float:
    d = u.shape[0]
    return float(np.max(np.abs(u.conj().T @ u - np.eye(d))))


def eigenphase_spectrum(
    u: np.ndarray,
    basis: SpinBasis | None = None,
    sector: str = "full",
    params: DriveParams | None = None,
    vectors: bool = True,
    parity_labels: bool = False,
    sector_transform: sp.csc_matrix | None = None,
    unitarity_tol: float = 1e-8,
) -> FloquetSpectrum:
    """Eigenphases (and optionally eigenvectors) of a unitary period map.

    With vectors, the complex Schur form is used: for a unitary matrix it is
    the eigendecomposition with an orthonormal eigenvector set. Parity labels
    (full sector only) are read from the reflection expectation value, with
    degenerate groups rotated into reflection eigenstates first.
    """
    if sector not in SECTORS:
        raise ValueError(f"sector must be one of {SECTORS}")
    if unitarity_residual(u) > unitarity_tol:
        raise ValueError("input matrix is not unitary within tolerance")

    if not vectors:
        phases = np.sort(_phases_from_eigvals(np.linalg.eigvals(u)))
        return FloquetSpectrum(phases, None, None, sector, params, sector_transform)

    t, z = scipy.linalg.schur(u, output="complex")
    phases = _phases_from_eigvals(np.diag(t))
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vecs = np.ascontiguousarray(z[:, order])

    labels = None
    if parity_labels:
        if sector != "full":
            raise ValueError("parity labels are resolved on the full spectrum only")
        if basis is None:
            raise ValueError("parity labels require the basis")
        labels = _label_parities(phases, vecs, basis, params)
    return FloquetSpectrum(phases, vecs, labels, sector, params, sector_transform)


def _label_parities(phases, vecs, basis, params) -> np.ndarray:
    from .basis import apply_reflection, resolve_degenerate_parity

    period = params.period if params is not None else 2.0 * np.pi
    theta_tol = DEGENERACY_TOL * period
    n = phases.size
    labels = np.zeros(n, dtype=np.int64)
    # group consecutive phases within the quasienergy tolerance
    start = 0
    groups = []
    for i in range(1, n):
        if phases[i] - phases[i - 1] > theta_tol:
            groups.append((start, i))
            start = i
    groups.append((start, n))
    # the spectrum is periodic, but a wrap-spanning group only matters for
    # exact degeneracy at 0/2pi, which the fold already maps to one branch
    for a, b in groups:
        if b - a == 1:
            v = vecs[:, a]
            expect = np.real(np.vdot(v, apply_reflection(v, basis)))
            labels[a] = 1 if expect >= 0 else -1
        else:
            rotated, labs = resolve_degenerate_parity(vecs[:, a:b], basis)
            vecs[:, a:b] = rotated
            labels[a:b] = labs
    return labels


def floquet_spectrum(
    p: DriveParams,
    basis: SpinBasis | None = None,
    blocks: ParityBlocks | None = None,
    sector: str = "full",
    vectors: bool = True,
    parity_labels: bool = False,
) -> FloquetSpectrum:
    """Convenience builder: period map plus spectrum for the chosen sector."""
    basis = basis if basis is not None else build_basis(p.n_sites)
    if sector == "full":
        u = floquet_unitary(p, basis)
        return eigenphase_spectrum(
            u, basis, "full", p, vectors=vectors, parity_labels=parity_labels
        )
    blocks = blocks if blocks is not None else build_parity_blocks(basis)
    u = sector_unitary(p, blocks, sector)
    return eigenphase_spectrum(
        u,
        basis,
        sector,
        p,
        vectors=vectors,
        sector_transform=blocks.sector(sector),
    )


def undriven_phase_variance(p: DriveParams, normalizer: float) -> float:
    """Concentration measure of the undriven diagonal energies on the phase circle.

    Folds E*T into (-pi, pi] per diagonal energy and returns
    normalizer / variance; an exactly degenerate fold returns +inf.
    """
    if normalizer <= 0:
        raise ValueError("normalizer must be positive")
    h2 = build_h2_diagonal(p)
    folded = np.mod(h2 * p.period + np.pi, 2.0 * np.pi) - np.pi
    var = float(np.var(folded))
    if var == 0.0:
        return float("inf")
    return normalizer / var


def eigenphase_histogram(
    spectrum: FloquetSpectrum | np.ndarray,
    bins: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized density of eigenphases over [0, 2pi). Returns (edges, density)."""
    if bins < 8:
        raise ValueError("at least 8 bins are required")
    phases = (
        spectrum.eigenphases
        if isinstance(spectrum, FloquetSpectrum)
        else np.asarray(spectrum)
    )
    density, edges = np.histogram(
        phases, bins=bins, range=(0.0, 2.0 * np.pi), density=True
    )
    return edges, density
