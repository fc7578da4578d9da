"""Static Hamiltonian pieces of the square-wave driven chain.

All energies are in units of the high Rabi frequency and times in its inverse;
the drive alternates between a transverse-field half-period and a purely
diagonal one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.special import zeta

from .basis import SpinBasis, build_basis, occupation_bits

INTERACTION_LAWS = ("power", "nearest", "all")


@dataclass(frozen=True)
class DriveParams:
    """Physical knobs of the driven chain.

    `law` selects the pair interaction: "power" with exponent `alpha`
    (alpha=6 is the van der Waals default), "nearest" for nearest-neighbor
    only, "all" for all-to-all.
    """

    n_sites: int
    tau: float
    delta: float
    v0: float
    omega0: float = 1.0
    omega_low: float = 0.0
    law: str = "power"
    alpha: float = 6.0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if self.tau <= 0:
            raise ValueError("half period tau must be positive")
        if self.law not in INTERACTION_LAWS:
            raise ValueError(f"law must be one of {INTERACTION_LAWS}")
        if self.law == "power" and self.alpha <= 0:
            raise ValueError("power-law exponent alpha must be positive")

    @property
    def period(self) -> float:
        return 2.0 * self.tau

    @property
    def delta0(self) -> float:
        """Shifted detuning, the natural control parameter of the chaos peaks."""
        return self.delta + self.v0

    @classmethod
    def from_delta0(cls, n_sites, tau, delta0, v0, **kw) -> "DriveParams":
        return cls(n_sites=n_sites, tau=tau, delta=delta0 - v0, v0=v0, **kw)

    def with_(self, **kw) -> "DriveParams":
        return replace(self, **kw)


def interaction_matrix(p: DriveParams) -> np.ndarray:
    """Symmetric N x N table of pair interactions, zero diagonal."""
    n = p.n_sites
    dist = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :]).astype(float)
    v = np.zeros((n, n))
    off = dist > 0
    if p.law == "power":
        v[off] = p.v0 / dist[off] ** p.alpha
    elif p.law == "nearest":
        v[dist == 1] = p.v0
    else:
        v[off] = p.v0
    return v


def build_h2_diagonal(p: DriveParams, basis: SpinBasis | None = None) -> np.ndarray:
    """Diagonal of the undriven Hamiltonian over the computational basis."""
    basis = basis if basis is not None else build_basis(p.n_sites)
    bits = occupation_bits(basis).astype(np.float64)
    v = interaction_matrix(p)
    pair = 0.5 * np.einsum("kj,jl,kl->k", bits, v, bits)
    return p.delta * bits.sum(axis=1) + pair


def sigma_x_total(n_sites: int) -> sp.csr_matrix:
    """Sparse sum of single-site flips, Sum_j sigma^x_j."""
    dim = 1 << n_sites
    idx = np.arange(dim, dtype=np.int64)
    rows = np.concatenate([idx ^ (1 << j) for j in range(n_sites)])
    cols = np.tile(idx, n_sites)
    return sp.csr_matrix(
        (np.ones(rows.size), (rows, cols)), shape=(dim, dim)
    )


def build_h1_matrix(p: DriveParams, rabi: float) -> np.ndarray:
    """Dense transverse-field Hamiltonian: rabi/2 single flips plus the diagonal."""
    basis = build_basis(p.n_sites)
    h = (0.5 * rabi) * sigma_x_total(p.n_sites).toarray()
    h[np.diag_indices_from(h)] = build_h2_diagonal(p, basis)
    return h


def averaged_hamiltonian(p: DriveParams) -> np.ndarray:
    """Half the sum of the two half-period Hamiltonians (time-averaged drive)."""
    h = build_h1_matrix(p, p.omega0)
    h2 = np.diag_indices_from(h)
    ham = 0.5 * h
    ham[h2] += 0.5 * build_h2_diagonal(p)
    return ham


def harmonic_number(order: int, count) -> float:
    """Partial sum of j^-order for j = 1..count; count=inf gives the zeta value."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if count is None or count == math.inf:
        if order == 1:
            raise ValueError("the order-1 series diverges; count must be finite")
        return float(zeta(order))
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return 0.0
    j = np.arange(1, int(count) + 1, dtype=np.float64)
    return float(np.sum(j ** (-float(order))))


def all_rydberg_energy(p: DriveParams) -> float:
    """Diagonal energy of the fully excited chain from the closed tail sums."""
    if p.law != "power" or p.alpha != 6.0:
        raise ValueError("closed form requires the power law with alpha = 6")
    n = p.n_sites
    l6 = harmonic_number(6, n - 1)
    l5 = harmonic_number(5, n - 1)
    return n * (p.delta + p.v0 * l6 - p.v0 * l5 / n)
