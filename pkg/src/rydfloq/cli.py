"""Command-line interface: presets, config files, parallel sweeps, CSV/JSON output."""

from __future__ import annotations

import os

# Pin the BLAS pools before any numeric import so results do not depend on
# the worker count or run-to-run thread scheduling; parallelism comes from
# the process pool instead.
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS",
             "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
    os.environ.setdefault(_var, "1")

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_PARTIAL = 3

SCENARIOS = ("rstat", "dynamics", "lindblad", "classical", "effective",
             "oracle-check")

_COMMON_KEYS = {
    "n_sites", "omega0", "omega_low", "tau", "delta", "delta0", "v0",
    "law", "alpha",
}
_SCENARIO_KEYS = {
    "rstat": _COMMON_KEYS | {"delta0_min", "delta0_max", "delta0_step",
                             "tau_min", "tau_max", "tau_step", "sector"},
    "dynamics": _COMMON_KEYS | {"init_state", "n_periods", "observables",
                                "window_lo", "window_hi", "sample_every",
                                "delta_list"},
    "lindblad": _COMMON_KEYS | {"gamma", "dt", "n_periods", "init_state",
                                "compare", "precision", "delta_list",
                                "omega0_mhz"},
    "classical": _COMMON_KEYS | {"n_periods", "realizations", "amplitude",
                                 "delta_list"},
    "effective": _COMMON_KEYS | {"order", "fields"},
    "oracle-check": set(),
}


@dataclass(frozen=True)
class UnitContext:
    """Conversion between scaled quantities and laboratory units."""

    omega0_mhz: float

    def __post_init__(self):
        if self.omega0_mhz <= 0:
            raise ValueError("physical Rabi frequency must be positive")

    def to_microseconds(self, scaled_time: float) -> float:
        return scaled_time / self.omega0_mhz

    def to_scaled_time(self, micro_seconds: float) -> float:
        return micro_seconds * self.omega0_mhz

    def to_scaled_rate(self, rate_khz: float) -> float:
        return rate_khz * 1e-3 / self.omega0_mhz


PRESETS: dict[str, dict] = {
    # spectral-statistics maps of the main phase diagrams (long runs)
    "fig2a": dict(scenario="rstat", n_sites=14, v0=2.0, tau=np.pi,
                  delta0_min=-8.0, delta0_max=8.0, delta0_step=0.05,
                  sector="both"),
    "fig2ef": dict(scenario="rstat", n_sites=12, v0=2.0,
                   delta0_min=-8.0, delta0_max=8.0, delta0_step=0.1,
                   tau_min=0.5, tau_max=4.5, tau_step=0.1, sector="both"),
    # stroboscopic observables in both phases
    "fig1": dict(scenario="dynamics", n_sites=14, v0=2.0, tau=np.pi,
                 delta_list="4.93,3.53", init_state="phi0", n_periods=10_000,
                 observables="sz,energy_avg,entropy_half",
                 window_lo=1000, window_hi=10_000, sample_every=25),
    "fig3cd": dict(scenario="dynamics", n_sites=14, v0=2.0, tau=np.pi,
                   delta_list="3.53,4.93", init_state="phi0", n_periods=2000,
                   observables="edge_x", window_lo=1000, window_hi=2000,
                   sample_every=1),
    # dissipative runs at laboratory parameters
    "fig4": dict(scenario="lindblad", n_sites=12, v0=2.0, tau=np.pi,
                 delta_list="4.93,3.53", gamma=8e-4, n_periods=100,
                 init_state="phi0", compare=1, precision="single",
                 dt=np.pi / 112, omega0_mhz=5.0),
    # classical heating ensembles
    "figS12": dict(scenario="classical", n_sites=100, v0=2.0, tau=np.pi,
                   law="nearest", delta_list="4.93,3.53", n_periods=2000,
                   realizations=100, amplitude=np.pi / 100),
    # small, fast variants used for smoke testing and reproducibility checks
    "smoke-rstat": dict(scenario="rstat", n_sites=8, v0=2.0, tau=np.pi,
                        delta0_min=3.5, delta0_max=6.5, delta0_step=0.25,
                        sector="even"),
    "smoke-dynamics": dict(scenario="dynamics", n_sites=8, v0=2.0, tau=np.pi,
                           delta_list="4.93", init_state="phi0", n_periods=200,
                           observables="sz,entropy_half", window_lo=100,
                           window_hi=200, sample_every=1),
    "smoke-lindblad": dict(scenario="lindblad", n_sites=4, v0=2.0, tau=np.pi,
                           delta_list="4.93", gamma=1e-3, n_periods=20,
                           init_state="phi0", compare=1, precision="double"),
    "smoke-classical": dict(scenario="classical", n_sites=30, v0=2.0,
                            tau=np.pi, law="nearest", delta_list="4.93,3.53",
                            n_periods=200, realizations=10,
                            amplitude=np.pi / 100),
}


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{x:.11e}"
    return str(x)


def _round12(x):
    return float(f"{x:.11e}") if isinstance(x, (float, np.floating)) else x


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config_file(path: str) -> dict:
    config = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            config[key] = value
    return config


def _coerce(config: dict) -> dict:
    out = {}
    for key, value in config.items():
        if key in ("law", "sector", "init_state", "observables", "precision",
                   "delta_list", "scenario", "fields"):
            out[key] = str(value)
        elif key in ("n_sites", "n_periods", "realizations", "sample_every",
                     "window_lo", "window_hi", "compare", "order"):
            out[key] = int(float(value))
        else:
            out[key] = float(value)
    return out


def _resolve_config(args, scenario: str) -> dict:
    config: dict = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise ValueError(f"unknown preset {args.preset!r}")
        preset = dict(PRESETS[args.preset])
        if preset.pop("scenario") != scenario:
            raise ValueError(
                f"preset {args.preset!r} belongs to another subcommand"
            )
        config.update(preset)
    if args.config:
        config.update(_coerce(_load_config_file(args.config)))
    for item in args.set or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        config.update(_coerce({key.strip(): value.strip()}))
    allowed = _SCENARIO_KEYS[scenario]
    unknown = set(config) - allowed
    if unknown:
        raise ValueError(f"unknown config keys for {scenario}: {sorted(unknown)}")
    return config


def _drive_params(config: dict, delta=None, delta0=None, tau=None):
    from .model import DriveParams

    kw = dict(
        n_sites=config["n_sites"],
        tau=tau if tau is not None else config["tau"],
        v0=config["v0"],
        omega0=config.get("omega0", 1.0),
        omega_low=config.get("omega_low", 0.0),
        law=config.get("law", "power"),
        alpha=config.get("alpha", 6.0),
    )
    if delta0 is not None:
        return DriveParams.from_delta0(delta0=delta0, **kw)
    if delta is not None:
        return DriveParams(delta=delta, **kw)
    if "delta" in config:
        return DriveParams(delta=config["delta"], **kw)
    return DriveParams.from_delta0(delta0=config["delta0"], **kw)


def _meta_lines(scenario: str, config: dict, seed, extra: dict | None = None):
    lines = [f"# rydfloq {__version__} scenario={scenario}"]
    for key in sorted(config):
        lines.append(f"# {key} = {config[key]}")
    lines.append(f"# seed = {seed}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key} = {value}")
    return lines


def _emit(out_path, fmt, meta_lines, columns, rows):
    if fmt == "csv":
        text_lines = list(meta_lines)
        text_lines.append(",".join(columns))
        for row in rows:
            text_lines.append(",".join(_fmt(x) for x in row))
        payload = "\n".join(text_lines) + "\n"
        if out_path in (None, "-"):
            sys.stdout.write(payload)
        else:
            with open(out_path, "w") as fh:
                fh.write(payload)
    else:
        doc = {
            "meta": [line[2:] for line in meta_lines],
            "columns": list(columns),
            "rows": [[_round12(x) for x in row] for row in rows],
        }
        payload = json.dumps(doc, indent=1) + "\n"
        if out_path in (None, "-"):
            sys.stdout.write(payload)
        else:
            with open(out_path, "w") as fh:
                fh.write(payload)


def _rstat_task(task):
    (n_sites, tau, delta, v0, omega0, omega_low, law, alpha, sector) = task
    from .model import DriveParams
    from .spectral import mean_r_point

    p = DriveParams(n_sites=n_sites, tau=tau, delta=delta, v0=v0,
                    omega0=omega0, omega_low=omega_low, law=law, alpha=alpha)
    try:
        stats = mean_r_point(p, sector)
        return (stats.mean_r, stats.count, "")
    except Exception as exc:
        return (None, None, str(exc))


def _grid_values(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


def run_rstat(config, out, fmt, workers, seed) -> int:
    from .spectral import ENSEMBLE

    if "delta0_min" not in config:
        raise ValueError("rstat needs a shifted-detuning grid")
    delta0s = _grid_values(config["delta0_min"], config["delta0_max"],
                           config["delta0_step"])
    if "tau_min" in config:
        taus = _grid_values(config["tau_min"], config["tau_max"],
                            config["tau_step"])
    else:
        taus = [config["tau"]]
    if not delta0s or not taus:
        raise ValueError("empty parameter grid")
    sector = config.get("sector", "even")
    sectors = ("even", "odd") if sector == "both" else (sector,)

    tasks = []
    keys = []
    for tau in taus:
        for d0 in delta0s:
            for sec in sectors:
                p = _drive_params(config, delta0=d0, tau=tau)
                tasks.append((p.n_sites, p.tau, p.delta, p.v0, p.omega0,
                              p.omega_low, p.law, p.alpha, sec))
                keys.append((d0, tau, sec))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_rstat_task, tasks, chunksize=1))
    else:
        results = [_rstat_task(t) for t in tasks]

    rows = []
    failed = 0
    for (d0, tau, sec), (mean_r, count, err) in zip(keys, results):
        if err:
            failed += 1
            rows.append((d0, tau, sec, "", "", err.replace(",", ";")))
        else:
            rows.append((d0, tau, sec, mean_r, count, ""))
    meta = _meta_lines("rstat", config, seed, {
        "coe_mean_r": ENSEMBLE.coe_mean_r,
        "poisson_mean_r": ENSEMBLE.poisson_mean_r,
    })
    _emit(out, fmt, meta, ("delta0", "tau", "sector", "mean_r", "count",
                           "error"), rows)
    return EXIT_PARTIAL if failed else EXIT_OK


def _parse_deltas(config) -> list[float]:
    if "delta_list" in config:
        return [float(x) for x in config["delta_list"].split(",") if x.strip()]
    if "delta" in config:
        return [config["delta"]]
    return [config["delta0"] - config["v0"]]


def run_dynamics(config, out, fmt, workers, seed) -> int:
    from .basis import build_basis, build_parity_blocks
    from .dynamics import (
        edge_correlator,
        edge_correlator_sectors,
        initial_state,
        stroboscopic_evolve,
        stroboscopic_evolve_sectors,
    )
    from .floquet import floquet_unitary

    deltas = _parse_deltas(config)
    observables = tuple(
        t.strip() for t in config.get("observables", "sz").split(",") if t.strip()
    )
    n_periods = config["n_periods"]
    every = config.get("sample_every", 1)
    samples = np.arange(0, n_periods + 1, every)
    if samples[-1] != n_periods:
        samples = np.append(samples, n_periods)
    window = (config.get("window_lo", max(1, n_periods // 2)),
              config.get("window_hi", n_periods))
    # above this size the full period map no longer pays for itself
    use_sectors = config["n_sites"] >= 13

    per_tag_rows: dict[str, list] = {tag: [] for tag in observables}
    for delta in deltas:
        p = _drive_params(config, delta=delta)
        basis = build_basis(p.n_sites)
        psi0 = initial_state(config.get("init_state", "phi0"), basis)
        plain = tuple(t for t in observables if t != "edge_x")
        series = {}
        if use_sectors:
            blocks = build_parity_blocks(basis)
            if plain:
                series = stroboscopic_evolve_sectors(
                    p, psi0, n_periods, plain, basis, blocks,
                    sample_points=samples,
                )
            if "edge_x" in observables:
                series["edge_x"] = edge_correlator_sectors(
                    p, psi0, n_periods, basis, blocks
                )
        else:
            u = floquet_unitary(p, basis)
            if plain:
                series = stroboscopic_evolve(
                    u, psi0, n_periods, plain, basis, params=p,
                    sample_points=samples,
                )
            if "edge_x" in observables:
                series["edge_x"] = edge_correlator(u, psi0, n_periods, basis)
        for tag in observables:
            s = series[tag]
            for n, value in zip(s.periods, s.values):
                per_tag_rows[tag].append((delta, int(n), value))
            per_tag_rows[tag].append(
                (delta, "window_mean", s.window_mean(*window))
            )

    meta = _meta_lines("dynamics", config, seed,
                       {"window": f"[{window[0]}, {window[1]}]"})
    for tag in observables:
        path = out if len(observables) == 1 or out in (None, "-") else (
            f"{out}.{tag}.csv" if fmt == "csv" else f"{out}.{tag}.json"
        )
        _emit(path, fmt, meta + [f"# observable = {tag}"],
              ("delta", "n", "value"), per_tag_rows[tag])
    return EXIT_OK


def run_lindblad(config, out, fmt, workers, seed) -> int:
    from .basis import build_basis
    from .dynamics import initial_state
    from .opensystem import evolve_master

    if config["n_sites"] > 12:
        raise ValueError("dense density-matrix runs are capped at 12 sites")
    gamma = config["gamma"]
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    deltas = _parse_deltas(config)
    gammas = (0.0, gamma) if config.get("compare", 0) else (gamma,)
    rows = []
    for delta in deltas:
        p = _drive_params(config, delta=delta)
        basis = build_basis(p.n_sites)
        psi0 = initial_state(config.get("init_state", "phi0"), basis)
        for g in gammas:
            result = evolve_master(
                p, g, psi0, config["n_periods"],
                dt=config.get("dt"),
                precision=config.get("precision", "double"),
            )
            s = result.series["sz"]
            for n, value in zip(s.periods, s.values):
                rows.append((delta, g, int(n), value))
    extra = {}
    if "omega0_mhz" in config:
        units = UnitContext(config["omega0_mhz"])
        p0 = _drive_params(config, delta=deltas[0])
        extra["physical_time_us_at_last_period"] = _fmt(
            units.to_microseconds(config["n_periods"] * p0.period)
        )
    meta = _meta_lines("lindblad", config, seed, extra)
    _emit(out, fmt, meta, ("delta", "gamma", "n", "sz"), rows)
    return EXIT_OK


def run_classical(config, out, fmt, workers, seed) -> int:
    from .classical import noise_averaged_heating

    deltas = _parse_deltas(config)
    rows = []
    for delta in deltas:
        p = _drive_params(config, delta=delta)
        result = noise_averaged_heating(
            p, config["n_periods"], config["realizations"],
            amplitude=config.get("amplitude", np.pi / 100), seed=seed,
        )
        for n, q, dq in zip(result.periods, result.q, result.dq):
            rows.append((delta, int(n), q, dq))
    meta = _meta_lines("classical", config, seed)
    _emit(out, fmt, meta, ("delta", "n", "q", "dq"), rows)
    return EXIT_OK


def run_effective(config, out, fmt, workers, seed) -> int:
    from .effective import bch_effective

    order = config.get("order", 2)
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1, or 2")
    p = _drive_params(config)
    eff = bch_effective(p, order, fields=config.get("fields", "exact"))
    evals = np.linalg.eigvalsh(eff.matrix)
    rows = [(i, v) for i, v in enumerate(evals)]
    meta = _meta_lines("effective", config, seed, {
        "order": order, "constant_c": _fmt(eff.c), "edge_v_b": _fmt(eff.v_b),
    })
    _emit(out, fmt, meta, ("index", "eigenvalue"), rows)
    return EXIT_OK


def run_oracle_check(config, out, fmt, workers, seed) -> int:
    import scipy.linalg

    from .effective import (
        bch_effective,
        bdg_quadratic_oracle,
        dense_quadratic_ed,
        fermion_dispersion,
        fermion_many_body_spectrum,
        momentum_grid,
    )
    from .floquet import floquet_unitary
    from .model import DriveParams

    checks = []

    # reconstructed period map must converge at least cubically
    taus = [0.2, 0.1, 0.05]
    errors = []
    for tau in taus:
        p = DriveParams.from_delta0(6, tau, 0.0, 2.0)
        u = floquet_unitary(p)
        ueff = scipy.linalg.expm(-1j * p.period * bch_effective(p, 2).matrix)
        errors.append(float(np.max(np.abs(ueff - u))))
    slopes = np.diff(np.log(errors)) / np.diff(np.log(taus))
    checks.append(("bch_scaling_slope", float(np.min(slopes)), 3.0, ">="))

    # quadratic-form solver against the closed-form dispersion
    worst = 0.0
    for n in (4, 6, 8, 12):
        analytic = np.sort(fermion_dispersion(n, 1.0, 2.0, momentum_grid(n)))
        numeric = bdg_quadratic_oracle(n, 1.0, 2.0, "periodic")
        worst = max(worst, float(np.max(np.abs(numeric - analytic))))
    checks.append(("bdg_vs_dispersion_max_err", worst, 1e-10, "<="))

    # mode-occupation spectrum against a dense diagonalization
    spectrum = fermion_many_body_spectrum(8, 1.0, 2.0)
    dense = dense_quadratic_ed(8, 1.0, 2.0, "periodic")
    err = float(np.max(np.abs(
        (spectrum - spectrum.mean()) - (dense - dense.mean())
    )))
    checks.append(("fermion_vs_ed_max_err", err, 1e-8, "<="))

    rows = []
    all_ok = True
    for name, value, threshold, op in checks:
        ok = value >= threshold if op == ">=" else value <= threshold
        all_ok &= ok
        rows.append((name, value, threshold, op, "pass" if ok else "FAIL"))
        print(f"{name}: {value:.3e} {op} {threshold:.3e} "
              f"-> {'pass' if ok else 'FAIL'}")
    if out not in (None, "-"):
        meta = _meta_lines("oracle-check", config, seed)
        _emit(out, fmt, meta,
              ("check", "value", "threshold", "comparison", "status"), rows)
    return EXIT_OK if all_ok else EXIT_TOLERANCE


_RUNNERS = {
    "rstat": run_rstat,
    "dynamics": run_dynamics,
    "lindblad": run_lindblad,
    "classical": run_classical,
    "effective": run_effective,
    "oracle-check": run_oracle_check,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="rydfloq",
                     description="Driven Rydberg chain simulation toolkit")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--preset", help="named built-in configuration")
        p.add_argument("--out", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a single config entry")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = _resolve_config(args, args.scenario)
        return _RUNNERS[args.scenario](
            config, args.out, args.format, args.workers, args.seed
        )
    except (ValueError, KeyError, OSError) as exc:
        print(f"rydfloq: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
