"""Chaos diagnostics: level-spacing ratios, ensemble references, participation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SpinBasis, ParityBlocks, build_basis, build_parity_blocks
from .floquet import FloquetSpectrum, floquet_spectrum
from .model import DriveParams


@dataclass(frozen=True)
class EnsembleConstants:
    """Reference mean spacing ratios of the circular orthogonal and Poisson ensembles."""

    coe_mean_r: float = 0.527
    poisson_mean_r: float = 0.386


ENSEMBLE = EnsembleConstants()


@dataclass(frozen=True, eq=False)
class RStatistics:
    ratios: np.ndarray
    mean_r: float
    count: int


def level_spacing_ratios(phases: np.ndarray) -> RStatistics:
    """Ratios of consecutive sorted gaps, min over max per adjacent gap pair.

    The wrap-around gap is excluded. Zero gaps are kept: paired with a
    nonzero gap they contribute 0 (a pair of zero gaps also counts as 0),
    so unresolved symmetry degeneracies show up instead of being masked.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.size < 3:
        raise ValueError("need at least 3 phases for spacing ratios")
    if np.any(np.diff(phases) < 0):
        raise ValueError("phases must be sorted ascending")
    gaps = np.diff(phases)
    lo = np.minimum(gaps[:-1], gaps[1:])
    hi = np.maximum(gaps[:-1], gaps[1:])
    ratios = np.divide(lo, hi, out=np.zeros_like(lo), where=hi > 0)
    return RStatistics(ratios, float(np.mean(ratios)), int(ratios.size))


@dataclass(frozen=True)
class ScanRow:
    delta0: float
    tau: float
    sector: str
    mean_r: float | None
    count: int | None
    error: str | None = None


def mean_r_point(
    p: DriveParams,
    sector: str = "even",
    blocks: ParityBlocks | None = None,
) -> RStatistics:
    """Mean spacing ratio of one parameter point in the chosen sector."""
    spec = floquet_spectrum(p, blocks=blocks, sector=sector, vectors=False)
    phases = spec.eigenphases
    distinct = 1 + int(np.sum(np.diff(phases) > 1e-12))
    if distinct < 3:
        raise ValueError(
            "spectrum is too degenerate for spacing statistics "
            f"({distinct} distinct phases)"
        )
    return level_spacing_ratios(phases)


def mean_r_scan(grid: list[DriveParams], sector: str = "even") -> list[ScanRow]:
    """One row per grid point, order preserved; failures recorded per point."""
    if not grid:
        raise ValueError("parameter grid is empty")
    shared_blocks: dict[int, ParityBlocks] = {}
    rows = []
    for p in grid:
        try:
            if sector in ("even", "odd"):
                if p.n_sites not in shared_blocks:
                    shared_blocks[p.n_sites] = build_parity_blocks(
                        build_basis(p.n_sites)
                    )
                blocks = shared_blocks[p.n_sites]
            else:
                blocks = None
            stats = mean_r_point(p, sector, blocks)
            rows.append(ScanRow(p.delta0, p.tau, sector, stats.mean_r, stats.count))
        except Exception as exc:  # keep scanning, attach point identity
            rows.append(ScanRow(p.delta0, p.tau, sector, None, None, str(exc)))
    return rows


def inverse_participation_ratio(
    spec: FloquetSpectrum,
    basis: SpinBasis,
) -> float:
    """Participation of eigenvectors in the computational basis, T_I / D.

    1 for a fully localized eigenbasis, 1/D for a uniform-magnitude frame.
    Sector spectra are lifted to the computational basis first.
    """
    if spec.eigenvectors is None:
        raise ValueError("spectrum carries no eigenvectors")
    vecs = spec.lifted_vectors()
    if vecs.shape[0] != basis.dimension:
        raise ValueError("eigenvector length does not match the basis")
    amp2 = np.abs(vecs) ** 2
    return float(np.sum(amp2 * amp2) / spec.dimension)


def poisson_mean_r_monte_carlo(
    n_phases: int,
    n_batches: int,
    seed: int = 0,
) -> tuple[float, float]:
    """Mean and batch spread of <r> for i.i.d. uniform phases on the circle."""
    rng = np.random.default_rng(seed)
    means = []
    for _ in range(n_batches):
        phases = np.sort(rng.uniform(0.0, 2.0 * np.pi, n_phases))
        means.append(level_spacing_ratios(phases).mean_r)
    means = np.asarray(means)
    return float(means.mean()), float(means.std(ddof=1))
