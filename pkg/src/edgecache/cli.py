"""Command-line front end: experiment orchestration and report emission.

Configuration comes from a flat JSON file (explicit units in the key names)
with CLI flags taking precedence.  All user-facing SNRs are in dB and are
converted to linear scale here, at a single point, before reaching the
numerical modules.  Report files are deterministic: fixed column order,
12-significant-digit scientific notation, and LF line endings; curve-shaped
reports also render a PNG figure next to the delimited output.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .analysis import OutageQuery, outage_closed_form, system_outage
from .config import ConfigError, PlacementPolicy, SystemConfig, db_to_linear
from .montecarlo import mc_outage, mc_system_outage
from .optimizer import (
    full_cooperation_baseline,
    optimize_placement,
    optimize_sweep,
)
from .popularity import zipf_popularity
from . import plots

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_VALIDATION_FAILURE = 2

VALIDATE_Z_LIMIT = 4.0
VALIDATE_K_GRID = (2, 3, 5, 8)
VALIDATE_SNR_DB = (0.0, 10.0, 20.0)

MODES = ("outage", "sweep", "optimize", "simulate", "validate", "table1", "fig2")
PLOTTING_MODES = {"outage", "sweep", "simulate", "fig2"}

SWEEP_FIELDS = (
    "snr_db", "scheme", "M", "n0", "t_vector",
    "outage_closed_form", "outage_mc_mean", "outage_mc_stderr",
)

DEFAULT_PROFILE = {
    "k_ens": 5,
    "n_files": 10,
    "cache_size_files": 3,
    "zipf_rho": 0.8,
    "rate_bps_hz": 1.0,
    "snr_db": [0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0],
}
_CONFIG_KEYS = set(DEFAULT_PROFILE) | {"trials", "seed"}

_DEFAULT_TRIALS = {"simulate": 100_000, "validate": 1_000_000}
_DEFAULT_SEED = 12345
_DEFAULT_CACHE_SIZES = (1, 3, 5, 7, 9)


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully resolved experiment: configuration, mode, and output plan."""

    config: SystemConfig
    mode: str
    mc_trials: int
    seed: int
    output_path: Path
    output_format: str
    cache_sizes: tuple[int, ...] = _DEFAULT_CACHE_SIZES
    t_d: int | None = None
    policy: PlacementPolicy | None = None
    full_enumeration: bool = False
    plot: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.output_format!r}")
        if self.mc_trials < 0:
            raise ConfigError(f"trials must be >= 0, got {self.mc_trials}")
        if self.mode == "outage" and self.t_d is None:
            raise ConfigError("outage mode requires --t-d")
        for m in self.cache_sizes:
            if not (1 <= m < self.config.n_files):
                raise ConfigError(
                    f"cache size {m} must satisfy 1 <= M < N={self.config.n_files}"
                )


# ---------------------------------------------------------------------------
# deterministic formatting / file emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    """12 significant digits, scientific notation: the pinned output format."""
    return format(float(x), ".11e")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def _json_cell(value):
    if isinstance(value, float):
        return float(_fmt(value))
    return value


def _write_report(path: Path, fieldnames: tuple[str, ...], rows: list[dict],
                  output_format: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if output_format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(fieldnames)
            for row in rows:
                writer.writerow([_csv_cell(row.get(k)) for k in fieldnames])
    else:
        payload = [{k: _json_cell(row.get(k)) for k in fieldnames} for row in rows]
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")


# ---------------------------------------------------------------------------
# configuration assembly
# ---------------------------------------------------------------------------

def load_config_file(path: str | Path) -> dict:
    """Flat JSON configuration; unknown keys are rejected loudly."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(
            f"config file {path}: unknown keys {unknown}; known keys are "
            f"{sorted(_CONFIG_KEYS)}"
        )
    return data


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc
    if not values:
        raise ConfigError(f"empty numeric list {text!r}")
    return values


def _parse_int_list(text: str) -> tuple[int, ...]:
    values = _parse_float_list(text)
    out = []
    for v in values:
        if v != int(v):
            raise ConfigError(f"expected integers, got {text!r}")
        out.append(int(v))
    return tuple(out)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; we own exit codes
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="edgecache",
        description="Outage analysis and cache-placement optimization for "
                    "partition-based multi-cell edge caching.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat JSON config file")
    common.add_argument("--snr-db", metavar="LIST", help="comma-separated SNR grid in dB")
    common.add_argument("--trials", type=int, help="Monte Carlo trials (0 disables MC)")
    common.add_argument("--seed", type=int, help="base RNG seed")
    common.add_argument("--out", metavar="PATH", help="output file path")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--full-enumeration", action="store_true",
                        help="disable monotonicity pruning in the optimizer")
    common.add_argument("--no-plot", action="store_true",
                        help="skip PNG rendering for curve reports")
    common.add_argument("--k-ens", type=int, help="number of edge nodes K")
    common.add_argument("--n-files", type=int, help="library size N")
    common.add_argument("--cache-size", type=int, help="per-node cache size M (files)")
    common.add_argument("--rho", type=float, help="Zipf skewness")
    common.add_argument("--rate", type=float, help="target rate (bits/s/Hz)")

    help_by_mode = {
        "outage": "closed-form (and optionally MC) outage of one replication degree",
        "sweep": "optimal placement at every SNR grid point",
        "optimize": "optimal placement at a single SNR point",
        "simulate": "Monte Carlo check of system outage against the closed form",
        "validate": "closed-form vs MC z-score battery across (K, t_d, SNR) cells",
        "table1": "optimal (n0, t) policy table across cache sizes and SNRs",
        "fig2": "proposed vs all-or-split baseline outage curves across cache sizes",
    }
    mode_parsers = {}
    for mode in MODES:
        mode_parsers[mode] = sub.add_parser(mode, parents=[common],
                                            help=help_by_mode[mode])
    mode_parsers["outage"].add_argument("--t-d", type=int,
                                        help="replication degree to evaluate")
    mode_parsers["simulate"].add_argument(
        "--policy", metavar="T_VECTOR",
        help="fixed policy as semicolon-joined degrees, e.g. '5;3;2' "
             "(default: per-point optimum)")
    for mode in ("table1", "fig2"):
        mode_parsers[mode].add_argument(
            "--cache-sizes", metavar="LIST",
            help="comma-separated cache sizes M (default 1,3,5,7,9)")
    return parser


def build_spec(args: argparse.Namespace) -> ExperimentSpec:
    profile = dict(DEFAULT_PROFILE)
    if args.config:
        profile.update(load_config_file(args.config))

    overrides = {
        "k_ens": args.k_ens,
        "n_files": args.n_files,
        "cache_size_files": args.cache_size,
        "zipf_rho": args.rho,
        "rate_bps_hz": args.rate,
    }
    for key, value in overrides.items():
        if value is not None:
            profile[key] = value

    if args.snr_db is not None:
        snr_db = _parse_float_list(args.snr_db)
    elif args.mode == "validate" and "snr_db" not in (
            load_config_file(args.config) if args.config else {}):
        snr_db = VALIDATE_SNR_DB
    else:
        snr_db = tuple(float(x) for x in profile["snr_db"]) \
            if isinstance(profile["snr_db"], (list, tuple)) else (float(profile["snr_db"]),)

    config = SystemConfig(
        k_ens=int(profile["k_ens"]),
        n_files=int(profile["n_files"]),
        cache_size=int(profile["cache_size_files"]),
        rho=float(profile["zipf_rho"]),
        rate=float(profile["rate_bps_hz"]),
        snr_db=snr_db,
    )

    if args.trials is not None:
        trials = args.trials
    elif "trials" in profile:
        trials = int(profile["trials"])
    else:
        trials = _DEFAULT_TRIALS.get(args.mode, 0)

    seed = args.seed if args.seed is not None else int(profile.get("seed", _DEFAULT_SEED))

    suffix = ".json" if args.format == "json" else ".csv"
    out = Path(args.out) if args.out else Path(f"{args.mode}{suffix}")

    cache_sizes = _DEFAULT_CACHE_SIZES
    if getattr(args, "cache_sizes", None):
        cache_sizes = _parse_int_list(args.cache_sizes)

    policy = None
    if getattr(args, "policy", None):
        policy = PlacementPolicy.from_t_vector_str(args.policy)

    return ExperimentSpec(
        config=config,
        mode=args.mode,
        mc_trials=trials,
        seed=seed,
        output_path=out,
        output_format=args.format,
        cache_sizes=cache_sizes,
        t_d=getattr(args, "t_d", None),
        policy=policy,
        full_enumeration=args.full_enumeration,
        plot=not args.no_plot,
    )


# ---------------------------------------------------------------------------
# mode handlers
# ---------------------------------------------------------------------------

def _plot_path(spec: ExperimentSpec) -> Path:
    return spec.output_path.with_suffix(".png")


def _maybe_render(spec: ExperimentSpec, curves, title: str) -> None:
    if spec.plot and spec.mode in PLOTTING_MODES:
        png = plots.render_outage_curves(curves, _plot_path(spec), title=title)
        print(f"wrote {png}")


def _run_outage(spec: ExperimentSpec) -> int:
    cfg = spec.config
    if not (1 <= spec.t_d <= cfg.k_ens):
        raise ConfigError(f"--t-d must lie in [1, {cfg.k_ens}], got {spec.t_d}")
    rows = []
    values = []
    for snr in cfg.snr_grid:
        q = OutageQuery(cfg.k_ens, spec.t_d, db_to_linear(snr), cfg.rate)
        p = outage_closed_form(q)
        values.append(p)
        row = {
            "snr_db": float(snr), "k_ens": cfg.k_ens, "t_d": spec.t_d,
            "outage_closed_form": p,
            "outage_mc_mean": None, "outage_mc_stderr": None,
        }
        if spec.mc_trials > 0:
            est = mc_outage(q, spec.mc_trials, spec.seed)
            row["outage_mc_mean"] = est.mean
            row["outage_mc_stderr"] = est.std_error
        rows.append(row)
    fields = ("snr_db", "k_ens", "t_d",
              "outage_closed_form", "outage_mc_mean", "outage_mc_stderr")
    _write_report(spec.output_path, fields, rows, spec.output_format)
    print(f"wrote {spec.output_path}")
    if len(values) == 1:
        print(f"outage(K={cfg.k_ens}, t_d={spec.t_d}, "
              f"snr={cfg.snr_grid[0]:g} dB, R={cfg.rate:g}) = {_fmt(values[0])}")
    _maybe_render(
        spec,
        [(f"K={cfg.k_ens}, t_d={spec.t_d}", cfg.snr_grid, values, {})],
        title="Per-file outage probability",
    )
    return EXIT_OK


def _policy_row(snr_db: float, scheme: str, m: int, policy: PlacementPolicy,
                outage: float) -> dict:
    return {
        "snr_db": float(snr_db), "scheme": scheme, "M": m,
        "n0": policy.n0, "t_vector": policy.t_vector_str(),
        "outage_closed_form": outage,
        "outage_mc_mean": None, "outage_mc_stderr": None,
    }


def _run_sweep(spec: ExperimentSpec) -> int:
    cfg = spec.config
    results = optimize_sweep(cfg, full_enumeration=spec.full_enumeration)
    rows = [
        _policy_row(r.snr_db, "proposed", cfg.cache_size, r.best, r.objective)
        for r in results
    ]
    _write_report(spec.output_path, SWEEP_FIELDS, rows, spec.output_format)
    print(f"wrote {spec.output_path}")
    _maybe_render(
        spec,
        [(f"proposed M={cfg.cache_size}", cfg.snr_grid,
          [r.objective for r in results], plots.scheme_style("proposed", 0))],
        title="Optimal system outage",
    )
    return EXIT_OK


def _run_optimize(spec: ExperimentSpec) -> int:
    cfg = spec.config
    if len(cfg.snr_grid) != 1:
        raise ConfigError("optimize mode expects a single SNR point; use sweep for grids")
    res = optimize_placement(cfg, full_enumeration=spec.full_enumeration)
    rows = [{
        "snr_db": res.snr_db, "M": cfg.cache_size,
        "n0": res.best.n0, "t_vector": res.best.t_vector_str(),
        "objective": res.objective, "explored": res.explored,
    }]
    fields = ("snr_db", "M", "n0", "t_vector", "objective", "explored")
    _write_report(spec.output_path, fields, rows, spec.output_format)
    print(f"wrote {spec.output_path}")
    print(f"optimal: n0={res.best.n0} t=({res.best.t_vector_str()}) "
          f"objective={_fmt(res.objective)} explored={res.explored}")
    return EXIT_OK


def _run_simulate(spec: ExperimentSpec) -> int:
    cfg = spec.config
    if spec.mc_trials < 1:
        raise ConfigError("simulate mode requires --trials >= 1")
    pop = zipf_popularity(cfg.n_files, cfg.rho)
    scheme = "fixed" if spec.policy is not None else "proposed"
    rows = []
    closed_curve, mc_curve = [], []
    for snr in cfg.snr_grid:
        at = cfg.at_snr(snr)
        policy = spec.policy if spec.policy is not None \
            else optimize_placement(at, full_enumeration=spec.full_enumeration).best
        policy.validate(at)
        closed = system_outage(at, policy, pop)
        est = mc_system_outage(at, policy, pop, spec.mc_trials, spec.seed)
        row = _policy_row(snr, scheme, cfg.cache_size, policy, closed)
        row["outage_mc_mean"] = est.mean
        row["outage_mc_stderr"] = est.std_error
        rows.append(row)
        closed_curve.append(closed)
        mc_curve.append(est.mean)
    _write_report(spec.output_path, SWEEP_FIELDS, rows, spec.output_format)
    print(f"wrote {spec.output_path}")
    _maybe_render(
        spec,
        [
            (f"closed form ({scheme})", cfg.snr_grid, closed_curve,
             plots.scheme_style("proposed", 0)),
            (f"MC ({spec.mc_trials} trials)", cfg.snr_grid, mc_curve,
             {"linestyle": "none", "color": "C1"}),
        ],
        title="System outage: closed form vs Monte Carlo",
    )
    return EXIT_OK


def _validate_cells(snr_grid) -> list[tuple[int, int, float]]:
    cells = []
    for k in VALIDATE_K_GRID:
        for t_d in sorted({1, math.ceil(k / 2), k}):
            for snr in snr_grid:
                cells.append((k, t_d, float(snr)))
    return cells


def _run_validate(spec: ExperimentSpec) -> int:
    cfg = spec.config
    if spec.mc_trials < 1:
        raise ConfigError("validate mode requires --trials >= 1")
    rows = []
    worst = 0.0
    for idx, (k, t_d, snr) in enumerate(_validate_cells(cfg.snr_grid)):
        q = OutageQuery(k, t_d, db_to_linear(snr), cfg.rate)
        p = outage_closed_form(q)
        est = mc_outage(q, spec.mc_trials, spec.seed + idx)
        # z-score against the closed form's own binomial spread; the plug-in
        # standard error degenerates to 0 in deep-outage cells.
        null_se = math.sqrt(p * (1.0 - p) / spec.mc_trials)
        z = (est.mean - p) / null_se if null_se > 0 else 0.0
        worst = max(worst, abs(z))
        rows.append({
            "k_ens": k, "t_d": t_d, "snr_db": snr, "trials": spec.mc_trials,
            "outage_closed_form": p, "outage_mc_mean": est.mean,
            "outage_mc_stderr": est.std_error, "z_score": z,
        })
    fields = ("k_ens", "t_d", "snr_db", "trials", "outage_closed_form",
              "outage_mc_mean", "outage_mc_stderr", "z_score")
    _write_report(spec.output_path, fields, rows, spec.output_format)
    print(f"wrote {spec.output_path}")
    print(f"validate: {len(rows)} cells, max |z| = {worst:.3f}")
    if worst > VALIDATE_Z_LIMIT:
        print(f"validation FAILED: |z| exceeds {VALIDATE_Z_LIMIT:g}", file=sys.stderr)
        return EXIT_VALIDATION_FAILURE
    return EXIT_OK


def _run_table1(spec: ExperimentSpec) -> int:
    cfg = spec.config
    fields = ("M", "snr_db", "n0") + tuple(f"t_{i}" for i in range(1, cfg.n_files + 1))
    rows = []
    for m in spec.cache_sizes:
        cfg_m = dataclasses.replace(cfg, cache_size=m)
        for res in optimize_sweep(cfg_m, full_enumeration=spec.full_enumeration):
            row = {"M": m, "snr_db": res.snr_db, "n0": res.best.n0}
            padded = res.best.t + (0,) * (cfg.n_files - res.best.n0)
            for i, t in enumerate(padded, start=1):
                row[f"t_{i}"] = t
            rows.append(row)
    _write_report(spec.output_path, fields, rows, spec.output_format)
    print(f"wrote {spec.output_path}")
    return EXIT_OK


def _run_fig2(spec: ExperimentSpec) -> int:
    cfg = spec.config
    pop = zipf_popularity(cfg.n_files, cfg.rho)
    rows = []
    curves = []
    for series, m in enumerate(spec.cache_sizes):
        cfg_m = dataclasses.replace(cfg, cache_size=m)
        proposed = optimize_sweep(cfg_m, full_enumeration=spec.full_enumeration)
        baseline = full_cooperation_baseline(cfg_m)
        for s, snr in enumerate(cfg.snr_grid):
            prop_row = _policy_row(snr, "proposed", m, proposed[s].best,
                                   proposed[s].objective)
            base_row = _policy_row(snr, "baseline", m, baseline.policies[s],
                                   float(baseline.system[s]))
            if spec.mc_trials > 0:
                at = cfg_m.at_snr(snr)
                for row, pol in ((prop_row, proposed[s].best),
                                 (base_row, baseline.policies[s])):
                    est = mc_system_outage(at, pol, pop, spec.mc_trials, spec.seed)
                    row["outage_mc_mean"] = est.mean
                    row["outage_mc_stderr"] = est.std_error
            rows.extend([prop_row, base_row])
        curves.append((f"proposed M={m}", cfg.snr_grid,
                       [r.objective for r in proposed],
                       plots.scheme_style("proposed", series)))
        curves.append((f"baseline M={m}", cfg.snr_grid,
                       list(baseline.system),
                       plots.scheme_style("baseline", series)))
    _write_report(spec.output_path, SWEEP_FIELDS, rows, spec.output_format)
    print(f"wrote {spec.output_path}")
    _maybe_render(spec, curves, title="Proposed vs all-or-split baseline")
    return EXIT_OK


_HANDLERS = {
    "outage": _run_outage,
    "sweep": _run_sweep,
    "optimize": _run_optimize,
    "simulate": _run_simulate,
    "validate": _run_validate,
    "table1": _run_table1,
    "fig2": _run_fig2,
}


def run_experiment(spec: ExperimentSpec) -> int:
    """Execute one experiment spec; returns the process exit code."""
    return _HANDLERS[spec.mode](spec)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = build_spec(args)
        return run_experiment(spec)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
