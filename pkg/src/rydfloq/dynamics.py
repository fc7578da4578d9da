"""Closed-system stroboscopic evolution and its observables.

States are norm-1 complex vectors over the computational basis. Spin-z
operators carry no 1/2: the z expectation of a single atom is -1 in the
ground state and +1 in the Rydberg state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SpinBasis, build_basis, occupation_bits
from .floquet import FloquetSpectrum
from .model import DriveParams, build_h2_diagonal

STATE_KINDS = ("phi0", "phi1", "all_rydberg")


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    tag: str
    periods: np.ndarray
    values: np.ndarray

    def window_mean(self, lo: int, hi: int) -> float:
        """Mean over recorded periods n with lo <= n <= hi."""
        mask = (self.periods >= lo) & (self.periods <= hi)
        if not np.any(mask):
            raise ValueError(f"window [{lo}, {hi}] contains no recorded periods")
        return float(np.mean(self.values[mask]))

    def window_std(self, lo: int, hi: int) -> float:
        mask = (self.periods >= lo) & (self.periods <= hi)
        return float(np.std(self.values[mask]))


def initial_state(kind: str, basis: SpinBasis) -> np.ndarray:
    """Product states used as experimentally preparable starting points.

    "phi0" is all atoms in the ground state; "phi1" places (|g>+|s>)/sqrt(2)
    on the odd sites 1, 3, ... and |g> on the even sites; "all_rydberg" is the
    fully excited string. Any other value is parsed as an explicit bitstring
    over {g,s} or {0,1}, site 1 first.
    """
    dim = basis.dimension
    psi = np.zeros(dim, dtype=complex)
    if kind == "phi0":
        psi[0] = 1.0
    elif kind == "all_rydberg":
        psi[dim - 1] = 1.0
    elif kind == "phi1":
        plus_sites = [j for j in range(basis.n_sites) if j % 2 == 0]
        amp = 1.0 / np.sqrt(2.0) ** len(plus_sites)
        idx = np.arange(dim)
        even_site_mask = 0
        for j in range(1, basis.n_sites, 2):
            even_site_mask |= 1 << j
        support = (idx & even_site_mask) == 0
        psi[support] = amp
    else:
        cleaned = kind.strip().lower()
        if len(cleaned) != basis.n_sites or any(c not in "gs01" for c in cleaned):
            raise ValueError(
                f"bitstring {kind!r} does not match a {basis.n_sites}-site chain"
            )
        k = 0
        for j, c in enumerate(cleaned):
            if c in "s1":
                k |= 1 << j
        psi[k] = 1.0
    return psi


def sz_expectation(psi: np.ndarray, basis: SpinBasis) -> float:
    """Site-averaged z magnetization, in [-1, 1]."""
    prob = np.abs(psi) ** 2
    return float(prob @ (2.0 * basis.popcount - basis.n_sites) / basis.n_sites)


def sigma_x_site_expectations(psi: np.ndarray, basis: SpinBasis) -> np.ndarray:
    out = np.empty(basis.n_sites)
    idx = np.arange(basis.dimension)
    for j in range(basis.n_sites):
        out[j] = np.real(np.vdot(psi, psi[idx ^ (1 << j)]))
    return out


def averaged_energy_expectation(
    psi: np.ndarray,
    basis: SpinBasis,
    params: DriveParams,
    h2: np.ndarray | None = None,
) -> float:
    """Expectation of the time-averaged Hamiltonian without building it densely."""
    h2 = h2 if h2 is not None else build_h2_diagonal(params, basis)
    diag = float(np.abs(psi) ** 2 @ h2)
    x = float(np.sum(sigma_x_site_expectations(psi, basis)))
    return 0.25 * params.omega0 * x + diag


def entanglement_entropy(psi: np.ndarray, cut: int, basis: SpinBasis) -> float:
    """Von Neumann entropy (nats) of the left `cut` sites of a pure state."""
    n = basis.n_sites
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut must be in [1, {n - 1}]")
    mat = np.reshape(psi, (1 << (n - cut), 1 << cut))
    s = np.linalg.svd(mat, compute_uv=False)
    lam = s * s
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log(lam)))


def page_value(n_sites: int, cut: int) -> float:
    """Random-state half-chain entropy benchmark, (N/2) ln 2 - 1/2."""
    if n_sites % 2 != 0 or cut != n_sites // 2:
        raise ValueError("closed form applies to the half cut of an even chain")
    return 0.5 * n_sites * np.log(2.0) - 0.5


def _observable_fn(tag: str, basis: SpinBasis, params: DriveParams | None):
    if tag == "sz":
        return lambda psi: sz_expectation(psi, basis)
    if tag == "energy_avg":
        if params is None:
            raise ValueError("energy_avg requires drive parameters")
        h2 = build_h2_diagonal(params, basis)
        return lambda psi: averaged_energy_expectation(psi, basis, params, h2)
    if tag == "entropy_half":
        return lambda psi: entanglement_entropy(psi, basis.n_sites // 2, basis)
    if tag.startswith("entropy_"):
        cut = int(tag.split("_", 1)[1])
        return lambda psi: entanglement_entropy(psi, cut, basis)
    raise ValueError(f"unknown observable tag {tag!r}")


def stroboscopic_evolve(
    propagator: np.ndarray | FloquetSpectrum,
    psi0: np.ndarray,
    n_periods: int,
    observables: tuple[str, ...],
    basis: SpinBasis,
    params: DriveParams | None = None,
    sample_points: np.ndarray | None = None,
) -> dict[str, ObservableSeries]:
    """Record observables along psi(nT), n = 0..n_periods (period 0 included).

    A dense period map is applied sequentially; a spectrum with eigenvectors
    evaluates directly at the requested periods through its phases, which is
    the cheaper route when only a sparse set of samples is needed.
    """
    if n_periods < 0:
        raise ValueError("n_periods must be >= 0")
    if sample_points is None:
        ns = np.arange(n_periods + 1)
    else:
        ns = np.unique(np.asarray(sample_points, dtype=np.int64))
        if ns.size == 0 or ns[0] < 0 or ns[-1] > n_periods:
            raise ValueError("sample points must lie in [0, n_periods]")
        if ns[0] != 0:
            ns = np.concatenate([[0], ns])
    fns = {tag: _observable_fn(tag, basis, params) for tag in observables}
    records = {tag: np.empty(ns.size) for tag in observables}

    if isinstance(propagator, FloquetSpectrum):
        states = _spectrum_states(propagator, psi0, ns)
        for i, psi in enumerate(states):
            for tag in observables:
                records[tag][i] = fns[tag](psi)
    else:
        u = propagator
        psi = psi0.astype(complex)
        pos = 0
        for n in range(n_periods + 1):
            if pos < ns.size and n == ns[pos]:
                for tag in observables:
                    records[tag][pos] = fns[tag](psi)
                pos += 1
            if n < n_periods:
                psi = u @ psi
    return {
        tag: ObservableSeries(tag, ns.copy(), records[tag]) for tag in observables
    }


def _spectrum_states(spec: FloquetSpectrum, psi0: np.ndarray, ns: np.ndarray):
    if spec.eigenvectors is None:
        raise ValueError("spectrum evolution requires eigenvectors")
    if spec.sector != "full":
        raise ValueError("spectrum evolution over the full basis only")
    v = spec.eigenvectors
    c0 = v.conj().T @ psi0
    for n in ns:
        yield v @ (np.exp(-1j * spec.eigenphases * int(n)) * c0)


def stroboscopic_evolve_sectors(
    p: DriveParams,
    psi0: np.ndarray,
    n_periods: int,
    observables: tuple[str, ...],
    basis: SpinBasis,
    blocks=None,
    sample_points: np.ndarray | None = None,
) -> dict[str, ObservableSeries]:
    """Sector-resolved sequential evolution, for chains too large to hold
    the full period map.

    The state is split into its reflection-symmetric and antisymmetric
    components, each evolved with its own sector map, and reassembled at the
    recording periods. Components with no weight are skipped entirely.
    """
    from .basis import build_parity_blocks
    from .floquet import sector_unitary

    blocks = blocks if blocks is not None else build_parity_blocks(basis)
    if sample_points is None:
        ns = np.arange(n_periods + 1)
    else:
        ns = np.unique(np.asarray(sample_points, dtype=np.int64))
        if ns.size == 0 or ns[0] < 0 or ns[-1] > n_periods:
            raise ValueError("sample points must lie in [0, n_periods]")
        if ns[0] != 0:
            ns = np.concatenate([[0], ns])
    fns = {tag: _observable_fn(tag, basis, p) for tag in observables}
    records = {tag: np.empty(ns.size) for tag in observables}

    parts = []
    for name in ("even", "odd"):
        lift = blocks.sector(name)
        coords = lift.T @ psi0.astype(complex)
        if np.linalg.norm(coords) > 1e-14:
            parts.append([lift, sector_unitary(p, blocks, name), coords])

    pos = 0
    for n in range(n_periods + 1):
        if pos < ns.size and n == ns[pos]:
            psi = np.zeros(basis.dimension, dtype=complex)
            for lift, _, coords in parts:
                psi += lift @ coords
            for tag in observables:
                records[tag][pos] = fns[tag](psi)
            pos += 1
        if n < n_periods:
            for part in parts:
                part[2] = part[1] @ part[2]
    return {
        tag: ObservableSeries(tag, ns.copy(), records[tag]) for tag in observables
    }


def edge_correlator_sectors(
    p: DriveParams,
    psi0: np.ndarray,
    n_periods: int,
    basis: SpinBasis,
    blocks=None,
) -> ObservableSeries:
    """Edge two-time correlator through sector-resolved propagation."""
    from .basis import build_parity_blocks
    from .floquet import sector_unitary

    blocks = blocks if blocks is not None else build_parity_blocks(basis)
    idx = np.arange(basis.dimension)
    flip1 = idx ^ 1
    vectors = [psi0.astype(complex), psi0[flip1].astype(complex)]
    units = {}
    coords = []
    for vec in vectors:
        comps = []
        for name in ("even", "odd"):
            lift = blocks.sector(name)
            c = lift.T @ vec
            if np.linalg.norm(c) > 1e-14:
                if name not in units:
                    units[name] = sector_unitary(p, blocks, name)
                comps.append((lift, name, c))
        coords.append(comps)

    values = np.empty(n_periods + 1)
    for n in range(n_periods + 1):
        full = []
        for comps in coords:
            psi = np.zeros(basis.dimension, dtype=complex)
            for lift, _, c in comps:
                psi += lift @ c
            full.append(psi)
        values[n] = np.abs(np.vdot(full[0], full[1][flip1]))
        if n < n_periods:
            for comps in coords:
                for i, (lift, name, c) in enumerate(comps):
                    comps[i] = (lift, name, units[name] @ c)
    return ObservableSeries("edge_x", np.arange(n_periods + 1), values)


def evolve_with_spectrum(
    spec: FloquetSpectrum, coords0: np.ndarray, ns: np.ndarray
) -> np.ndarray:
    """Stack of states at the given periods, columns in spectrum coordinates."""
    if spec.eigenvectors is None:
        raise ValueError("spectrum carries no eigenvectors")
    v = spec.eigenvectors
    c0 = v.conj().T @ coords0
    phases = np.exp(-1j * np.outer(spec.eigenphases, np.asarray(ns, dtype=float)))
    return v @ (phases * c0[:, None])


def edge_correlator(
    u: np.ndarray,
    psi0: np.ndarray,
    n_periods: int,
    basis: SpinBasis,
) -> ObservableSeries:
    """Two-time x correlation of the first site, |<psi0| x1(nT) x1 |psi0>|."""
    idx = np.arange(basis.dimension)
    flip1 = idx ^ 1
    a = psi0.astype(complex)
    b = psi0[flip1].astype(complex)
    values = np.empty(n_periods + 1)
    for n in range(n_periods + 1):
        values[n] = np.abs(np.vdot(a, b[flip1]))
        if n < n_periods:
            a = u @ a
            b = u @ b
    return ObservableSeries("edge_x", np.arange(n_periods + 1), values)


def autocorrelation(
    u: np.ndarray,
    psi0: np.ndarray,
    site: int | None,
    n_periods: int,
    basis: SpinBasis,
) -> ObservableSeries:
    """Two-time z correlation <psi0| z_j(nT) z_j |psi0>, real part.

    `site` is 1-indexed; None evaluates the global (site-averaged operator)
    correlation with the same initial-state convention.
    """
    idx = np.arange(basis.dimension)
    if site is None:
        zdiag = (2.0 * basis.popcount - basis.n_sites) / basis.n_sites
        tag = "autocorr_z_global"
    else:
        if not 1 <= site <= basis.n_sites:
            raise ValueError(f"site must be in [1, {basis.n_sites}]")
        zdiag = np.where((idx >> (site - 1)) & 1, 1.0, -1.0)
        tag = f"autocorr_z_{site}"
    a = psi0.astype(complex)
    b = zdiag * psi0
    values = np.empty(n_periods + 1)
    for n in range(n_periods + 1):
        values[n] = np.real(np.vdot(a, zdiag * b))
        if n < n_periods:
            a = u @ a
            b = u @ b
    return ObservableSeries(tag, np.arange(n_periods + 1), values)


def mazur_bound(observable: np.ndarray, spec: FloquetSpectrum) -> float:
    """Mean squared diagonal matrix element in the period-map eigenbasis.

    Accepts a dense Hermitian matrix or a real vector (diagonal observable).
    """
    if spec.eigenvectors is None:
        raise ValueError("spectrum carries no eigenvectors")
    v = spec.eigenvectors
    a = np.asarray(observable)
    if a.ndim == 1:
        if a.size != v.shape[0]:
            raise ValueError("diagonal observable length mismatch")
        diag = (np.abs(v) ** 2).T @ a
    elif a.ndim == 2:
        if a.shape != (v.shape[0], v.shape[0]):
            raise ValueError("observable shape mismatch")
        if np.max(np.abs(a - a.conj().T)) > 1e-10:
            raise ValueError("observable must be Hermitian")
        diag = np.real(np.einsum("kn,kl,ln->n", v.conj(), a, v, optimize=True))
    else:
        raise ValueError("observable must be a vector or a matrix")
    return float(np.mean(np.abs(diag) ** 2))


def pca_projections(
    psi: np.ndarray, spec: FloquetSpectrum
) -> tuple[np.ndarray, np.ndarray]:
    """Probability weights of a state over the computational and eigenbases."""
    if spec.eigenvectors is None:
        raise ValueError("spectrum carries no eigenvectors")
    basis_weights = np.abs(psi) ** 2
    eigen_weights = np.abs(spec.eigenvectors.conj().T @ psi) ** 2
    return basis_weights, eigen_weights


@dataclass(frozen=True, eq=False)
class EigenstateEntropyMap:
    eigenphases: np.ndarray
    entropies: np.ndarray
    low_fraction: float


def eigenstate_entropy_map(
    spec: FloquetSpectrum, basis: SpinBasis
) -> EigenstateEntropyMap:
    """Half-chain entropy of every eigenstate, and the low-entropy fraction.

    The fraction counts eigenstates below half the random-state benchmark.
    """
    if basis.n_sites % 2 != 0:
        raise ValueError("half-chain map requires an even number of sites")
    vecs = spec.lifted_vectors()
    vecs = np.asarray(vecs.todense()) if hasattr(vecs, "todense") else vecs
    cut = basis.n_sites // 2
    entropies = np.array(
        [entanglement_entropy(np.ascontiguousarray(v), cut, basis) for v in vecs.T]
    )
    ref = page_value(basis.n_sites, cut)
    low_fraction = float(np.mean(entropies / ref < 0.5))
    return EigenstateEntropyMap(spec.eigenphases.copy(), entropies, low_fraction)
