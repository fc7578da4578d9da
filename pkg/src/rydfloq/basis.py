"""Computational basis, reflection symmetry, and parity sectors for an open chain.

Conventions: site j (1-indexed) lives on bit j-1, so site order ascends with
bit significance. A set bit means the atom is in the Rydberg state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

MAX_SITES = 20


@dataclass(frozen=True, eq=False)
class SpinBasis:
    """Descriptor of the 2^N computational basis of an N-site chain."""

    n_sites: int
    dimension: int
    reflect: np.ndarray   # reflect[k] = index of the site-reversed bitstring
    popcount: np.ndarray  # popcount[k] = number of Rydberg excitations


def _reflect_table(n_sites: int) -> np.ndarray:
    dim = 1 << n_sites
    idx = np.arange(dim, dtype=np.int64)
    out = np.zeros(dim, dtype=np.int64)
    for j in range(n_sites):
        out |= ((idx >> j) & 1) << (n_sites - 1 - j)
    return out


def build_basis(n_sites: int) -> SpinBasis:
    """Enumerate the computational basis of an open chain of two-level atoms."""
    if not isinstance(n_sites, (int, np.integer)) or not 1 <= n_sites <= MAX_SITES:
        raise ValueError(
            f"n_sites must be an integer in [1, {MAX_SITES}], got {n_sites!r}"
        )
    dim = 1 << n_sites
    pop = np.bitwise_count(np.arange(dim, dtype=np.uint64)).astype(np.int64)
    return SpinBasis(int(n_sites), dim, _reflect_table(n_sites), pop)


def reflect_index(k: int, basis: SpinBasis) -> int:
    """Index of the bitstring with sites 1..N reversed. Involution."""
    if not 0 <= k < basis.dimension:
        raise IndexError(f"basis index {k} out of range [0, {basis.dimension})")
    return int(basis.reflect[k])


def occupation_bits(basis: SpinBasis) -> np.ndarray:
    """(D, N) array of occupation numbers, bits[k, j] = occupation of site j+1."""
    idx = np.arange(basis.dimension, dtype=np.int64)
    return ((idx[:, None] >> np.arange(basis.n_sites)) & 1).astype(np.int8)


def parity_matrix(basis: SpinBasis) -> sp.csr_matrix:
    """Sparse permutation matrix of the site-reversal operator."""
    dim = basis.dimension
    return sp.csr_matrix(
        (np.ones(dim), (basis.reflect, np.arange(dim))), shape=(dim, dim)
    )


@dataclass(frozen=True, eq=False)
class ParityBlocks:
    """Orthonormal map from the computational basis to the reflection sectors.

    Columns [0, even_dim) of `transform` span the symmetric sector, the rest
    the antisymmetric one. `even_reps` / `odd_reps` hold one computational
    representative per column (used e.g. to read off reflection-invariant
    diagonals in sector coordinates).
    """

    even_dim: int
    odd_dim: int
    transform: sp.csc_matrix
    even_reps: np.ndarray
    odd_reps: np.ndarray

    @property
    def even(self) -> sp.csc_matrix:
        return self.transform[:, : self.even_dim]

    @property
    def odd(self) -> sp.csc_matrix:
        return self.transform[:, self.even_dim :]

    def sector(self, which: str) -> sp.csc_matrix:
        if which == "even":
            return self.even
        if which == "odd":
            return self.odd
        raise ValueError(f"unknown sector {which!r}")


def build_parity_blocks(basis: SpinBasis) -> ParityBlocks:
    """Build the symmetric/antisymmetric combinations of reflection pairs."""
    dim = basis.dimension
    refl = basis.reflect
    idx = np.arange(dim, dtype=np.int64)
    even_reps = idx[refl >= idx]      # palindromes and lower member of each pair
    odd_reps = idx[refl > idx]
    inv = 1.0 / np.sqrt(2.0)

    rows, cols, vals = [], [], []
    for col, k in enumerate(even_reps):
        r = refl[k]
        if r == k:
            rows.append(k)
            cols.append(col)
            vals.append(1.0)
        else:
            rows.extend((k, r))
            cols.extend((col, col))
            vals.extend((inv, inv))
    n_even = len(even_reps)
    for col, k in enumerate(odd_reps):
        r = refl[k]
        rows.extend((k, r))
        cols.extend((n_even + col, n_even + col))
        vals.extend((inv, -inv))

    transform = sp.csc_matrix(
        (vals, (rows, cols)), shape=(dim, n_even + len(odd_reps))
    )
    return ParityBlocks(n_even, len(odd_reps), transform, even_reps, odd_reps)


def apply_reflection(vectors: np.ndarray, basis: SpinBasis) -> np.ndarray:
    """Apply the site-reversal permutation to one state or a column stack."""
    return vectors[basis.reflect]


def resolve_degenerate_parity(
    eigvecs: np.ndarray,
    basis: SpinBasis,
    tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Rotate a degenerate eigenspace into reflection eigenstates.

    Parameters
    ----------
    eigvecs : (D, m) orthonormal columns spanning one degenerate subspace.
    tol : tolerance both for the orthonormality of the input and for the
        restricted reflection operator squaring to the identity.

    Returns
    -------
    (rotated, labels) : rotated columns satisfying reflection eigenvalue
        labels[i] in {-1, +1}, ordered with -1 first.
    """
    w = np.atleast_2d(np.asarray(eigvecs))
    if w.shape[0] == basis.dimension and w.ndim == 2:
        pass
    else:
        raise ValueError("eigvecs must be a (D, m) column stack")
    gram = w.conj().T @ w
    if np.max(np.abs(gram - np.eye(w.shape[1]))) > tol:
        raise ValueError("input vectors are not orthonormal within tol")
    p_sub = w.conj().T @ apply_reflection(w, basis)
    if np.max(np.abs(p_sub @ p_sub - np.eye(w.shape[1]))) > tol:
        raise ValueError(
            "restricted reflection is not an involution within tol; "
            "the degenerate group is likely misidentified"
        )
    evals, rot = np.linalg.eigh((p_sub + p_sub.conj().T) / 2)
    if np.max(np.abs(np.abs(evals) - 1.0)) > tol:
        raise ValueError("reflection eigenvalues in subspace deviate from +/-1")
    labels = np.where(evals < 0, -1, 1).astype(np.int64)
    return w @ rot, labels
