"""Simulation toolkit for square-wave driven Rydberg atom chains."""

__version__ = "0.1.0"

from .basis import (
    SpinBasis,
    ParityBlocks,
    build_basis,
    build_parity_blocks,
    parity_matrix,
    reflect_index,
    resolve_degenerate_parity,
)
from .model import (
    DriveParams,
    all_rydberg_energy,
    averaged_hamiltonian,
    build_h1_matrix,
    build_h2_diagonal,
    harmonic_number,
    interaction_matrix,
)
from .floquet import (
    FloquetSpectrum,
    eigenphase_histogram,
    eigenphase_spectrum,
    floquet_spectrum,
    floquet_unitary,
    sector_unitary,
    undriven_phase_variance,
)
from .spectral import (
    ENSEMBLE,
    EnsembleConstants,
    RStatistics,
    inverse_participation_ratio,
    level_spacing_ratios,
    mean_r_point,
    mean_r_scan,
)
from .dynamics import (
    ObservableSeries,
    autocorrelation,
    edge_correlator,
    eigenstate_entropy_map,
    entanglement_entropy,
    initial_state,
    mazur_bound,
    page_value,
    pca_projections,
    stroboscopic_evolve,
    sz_expectation,
)
from .opensystem import LindbladResult, evolve_master, lindblad_rhs
from .effective import (
    EffectiveHamiltonian,
    bch_effective,
    bdg_quadratic_oracle,
    fermion_dispersion,
    fermion_many_body_spectrum,
)
from .classical import (
    NoiseEnsembleResult,
    classical_energy,
    classical_ground_state,
    noise_averaged_heating,
    tau1_map,
    tau2_map,
)

__all__ = [
    "SpinBasis",
    "ParityBlocks",
    "build_basis",
    "build_parity_blocks",
    "parity_matrix",
    "reflect_index",
    "resolve_degenerate_parity",
    "DriveParams",
    "all_rydberg_energy",
    "averaged_hamiltonian",
    "build_h1_matrix",
    "build_h2_diagonal",
    "harmonic_number",
    "interaction_matrix",
    "FloquetSpectrum",
    "eigenphase_histogram",
    "eigenphase_spectrum",
    "floquet_spectrum",
    "floquet_unitary",
    "sector_unitary",
    "undriven_phase_variance",
    "ENSEMBLE",
    "EnsembleConstants",
    "RStatistics",
    "inverse_participation_ratio",
    "level_spacing_ratios",
    "mean_r_point",
    "mean_r_scan",
    "ObservableSeries",
    "autocorrelation",
    "edge_correlator",
    "eigenstate_entropy_map",
    "entanglement_entropy",
    "initial_state",
    "mazur_bound",
    "page_value",
    "pca_projections",
    "stroboscopic_evolve",
    "sz_expectation",
    "LindbladResult",
    "evolve_master",
    "lindblad_rhs",
    "EffectiveHamiltonian",
    "bch_effective",
    "bdg_quadratic_oracle",
    "fermion_dispersion",
    "fermion_many_body_spectrum",
    "NoiseEnsembleResult",
    "classical_energy",
    "classical_ground_state",
    "noise_averaged_heating",
    "tau1_map",
    "tau2_map",
]
