"""Batch command-line front end.

Subcommands: gen (statistics synthesis), optimize (run one design),
evaluate (Monte-Carlo check of a stored design), sweep (power sweep over
schemes and decoding modes), validate (oracle suites). All tabular output
uses one fixed CSV schema so downstream tooling can consume any table:

    scenario_id,decoding,scheme,p_dbm,de_rate_bits,mc_rate_bits,
    mc_stderr_bits,ao_iterations,wall_time_s,seed

Numbers are written with 12 significant digits and rows are newline
terminated, so identical inputs produce byte-identical tables. Wall times
are reported as 0 unless --timing is given, keeping default output
deterministic. Exit codes: 0 success, 1 validation/convergence failure,
2 usage or I/O errors. MIMOSEL_THREADS > 1 runs sweep cells concurrently
(results are buffered and written in deterministic order regardless).
"""

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import generate_stats, load_stats, save_stats
from .config import SystemConfig, watts_to_dbm
from .detequiv import de_rate_indep, de_rate_joint, solve_fp_indep, solve_fp_joint
from .errors import MimoselError
from .optindep import ao_optimize_indep, uniform_covariances
from .optjoint import ao_optimize_joint, random_selection, uniform_powers
from .rates import mc_sum_rate
from .rng import DOMAIN_BASELINE, derive_seed, stream
from .structures import DesignResult, Selection, covariances_from_powers
from .validation import SUITES, run_suite

TABLE_HEADER = (
    "scenario_id,decoding,scheme,p_dbm,de_rate_bits,mc_rate_bits,"
    "mc_stderr_bits,ao_iterations,wall_time_s,seed"
)
DESIGN_SCHEMA_VERSION = 1
DECODING_MODES = ("joint", "independent")
SCHEMES = ("proposed", "baseline")
DEFAULT_SWEEP_DBM = (0.0, 5.0, 10.0, 15.0, 20.0)


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def _bits(nats: float) -> float:
    return nats / math.log(2.0)


@dataclass(frozen=True)
class RunRecord:
    """One table row: a (scenario, decoding, scheme, power) result."""

    scenario_id: str
    decoding: str
    scheme: str
    p_dbm: float
    de_rate_bits: float
    mc_rate_bits: float
    mc_stderr_bits: float
    ao_iterations: int
    wall_time_s: float
    seed: int

    def to_row(self) -> str:
        return ",".join(
            (
                self.scenario_id,
                self.decoding,
                self.scheme,
                _fmt(self.p_dbm),
                _fmt(self.de_rate_bits),
                _fmt(self.mc_rate_bits),
                _fmt(self.mc_stderr_bits),
                str(int(self.ao_iterations)),
                _fmt(self.wall_time_s),
                str(int(self.seed)),
            )
        )


def write_table(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TABLE_HEADER + "\n")
        for record in records:
            fh.write(record.to_row() + "\n")


def _scenario_id(path) -> str:
    return Path(path).stem


def save_design(result: DesignResult, path) -> None:
    payload = {
        "schema_version": DESIGN_SCHEMA_VERSION,
        "decoding": result.decoding,
        "n_antennas": result.selection.n_antennas,
        "selection": list(result.selection.indices),
        "rate_nats": result.rate_nats,
        "rate_trace_nats": [float(v) for v in result.rate_trace],
        "ao_iterations": result.ao_iterations,
        "converged": bool(result.converged),
        "fp_converged": bool(result.fp_converged),
        "seed": int(result.seed),
    }
    if result.eigen_powers is not None:
        payload["eigen_powers"] = [[float(v) for v in p] for p in result.eigen_powers]
    if result.covariances is not None:
        payload["covariances"] = [
            {
                "shape": list(cov.shape),
                "entries": [
                    [float(v.real), float(v.imag)]
                    for v in np.ascontiguousarray(cov).reshape(-1)
                ],
            }
            for cov in result.covariances
        ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_design(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise MimoselError("design payload must be a mapping")
    if payload.get("schema_version") != DESIGN_SCHEMA_VERSION:
        raise MimoselError(
            f"unsupported design schema version: {payload.get('schema_version')!r}"
        )
    for key in ("decoding", "n_antennas", "selection"):
        if key not in payload:
            raise MimoselError(f"design file is missing key {key!r}")
    if payload["decoding"] not in DECODING_MODES:
        raise MimoselError(f"unknown decoding mode {payload['decoding']!r}")
    return payload


def _design_covariances(payload, stats):
    """Transmit covariances stored in (or implied by) a design payload."""
    if "covariances" in payload:
        covs = []
        for entry in payload["covariances"]:
            shape = tuple(entry["shape"])
            arr = np.asarray(entry["entries"], dtype=float)
            covs.append((arr[:, 0] + 1j * arr[:, 1]).reshape(shape))
        return covs
    if "eigen_powers" in payload:
        return covariances_from_powers(stats, payload["eigen_powers"])
    raise MimoselError("design file carries neither eigen powers nor covariances")


def _optimize(stats, decoding: str, seed=None) -> DesignResult:
    if decoding == "joint":
        return ao_optimize_joint(stats, seed=seed)
    return ao_optimize_indep(stats, seed=seed)


def cmd_gen(args) -> int:
    config = SystemConfig.from_file(args.config)
    stats = generate_stats(config)
    save_stats(stats, args.out)
    print(f"wrote statistics for scenario {_scenario_id(args.config)!r} to {args.out}")
    return 0


def cmd_optimize(args) -> int:
    stats = load_stats(args.stats)
    decoding = "independent" if args.decoding == "indep" else args.decoding
    start = time.perf_counter()
    result = _optimize(stats, decoding)
    elapsed = time.perf_counter() - start

    if args.out:
        save_design(result, args.out)
    scenario = _scenario_id(args.stats)
    cfg = stats.config
    record = RunRecord(
        scenario_id=scenario,
        decoding=decoding,
        scheme="proposed",
        p_dbm=watts_to_dbm(cfg.power_budgets[0]),
        de_rate_bits=_bits(result.rate_nats),
        mc_rate_bits=0.0,
        mc_stderr_bits=0.0,
        ao_iterations=result.ao_iterations,
        wall_time_s=elapsed if args.timing else 0.0,
        seed=cfg.rng_seed,
    )
    if args.table:
        write_table(args.table, [record])
    if args.trace:
        trace_records = [
            RunRecord(
                scenario_id=scenario,
                decoding=decoding,
                scheme="proposed",
                p_dbm=watts_to_dbm(cfg.power_budgets[0]),
                de_rate_bits=_bits(value),
                mc_rate_bits=0.0,
                mc_stderr_bits=0.0,
                ao_iterations=iteration,
                wall_time_s=0.0,
                seed=cfg.rng_seed,
            )
            for iteration, value in enumerate(result.rate_trace)
        ]
        write_table(args.trace, trace_records)
    print(record.to_row())
    if not result.converged:
        print(
            "warning: optimization did not meet the convergence tolerance "
            f"(fixed point converged: {result.fp_converged})",
            file=sys.stderr,
        )
    return 0


def cmd_evaluate(args) -> int:
    stats = load_stats(args.stats)
    payload = load_design(args.design)
    cfg = stats.config
    if payload["n_antennas"] != cfg.n_antennas:
        raise MimoselError(
            f"design was made for {payload['n_antennas']} antennas, "
            f"statistics have {cfg.n_antennas}"
        )
    selection = Selection(tuple(int(i) for i in payload["selection"]), cfg.n_antennas)
    if len(selection) != cfg.n_chains:
        raise MimoselError(
            f"design keeps {len(selection)} antennas, scenario has {cfg.n_chains} chains"
        )
    covs = _design_covariances(payload, stats)
    decoding = payload["decoding"]
    mode = decoding
    seed = cfg.rng_seed if args.seed is None else args.seed

    start = time.perf_counter()
    estimate = mc_sum_rate(
        stats, covs, selection, cfg.noise_power,
        mode=mode, n_samples=args.samples, seed=seed,
    )
    elapsed = time.perf_counter() - start
    record = RunRecord(
        scenario_id=_scenario_id(args.stats),
        decoding=decoding,
        scheme=args.scheme,
        p_dbm=watts_to_dbm(cfg.power_budgets[0]),
        de_rate_bits=_bits(payload.get("rate_nats", float("nan"))),
        mc_rate_bits=_bits(estimate.mean_nats),
        mc_stderr_bits=_bits(estimate.stderr_nats),
        ao_iterations=int(payload.get("ao_iterations", 0)),
        wall_time_s=elapsed if args.timing else 0.0,
        seed=seed,
    )
    if args.table:
        write_table(args.table, [record])
    print(record.to_row())
    if estimate.low_confidence:
        print("warning: single-sample estimate; stderr reported as 0", file=sys.stderr)
    return 0


def _sweep_cell(base_stats, scenario, p_dbm, scheme, decoding, samples, master_seed, timing):
    """One (power, scheme, decoding) result; pure given its seed lineage."""
    cell_seed = derive_seed(master_seed, f"{_fmt(p_dbm)}|{scheme}|{decoding}", 0)
    cell_cfg = base_stats.config.with_power_dbm(p_dbm)
    stats = dataclasses.replace(base_stats, config=cell_cfg)
    start = time.perf_counter()
    if scheme == "proposed":
        result = _optimize(stats, decoding, seed=cell_seed)
        selection = result.selection
        covs = (
            covariances_from_powers(stats, result.eigen_powers)
            if result.eigen_powers is not None
            else result.covariances
        )
        de_rate = result.rate_nats
        iterations = result.ao_iterations
    else:
        selection = random_selection(
            cell_cfg.n_antennas, cell_cfg.n_chains, stream(cell_seed, DOMAIN_BASELINE, 0)
        )
        covs = uniform_covariances(cell_cfg)
        if decoding == "joint":
            fp = solve_fp_joint(stats, uniform_powers(cell_cfg), selection, cell_cfg.noise_power)
            de_rate = de_rate_joint(
                stats, uniform_powers(cell_cfg), selection, cell_cfg.noise_power, fp
            )
        else:
            fp = solve_fp_indep(stats, covs, selection, cell_cfg.noise_power)
            de_rate = de_rate_indep(stats, covs, selection, cell_cfg.noise_power, fp)
        iterations = 0
    estimate = mc_sum_rate(
        stats, covs, selection, cell_cfg.noise_power,
        mode=decoding, n_samples=samples, seed=cell_seed,
    )
    elapsed = time.perf_counter() - start
    return RunRecord(
        scenario_id=scenario,
        decoding=decoding,
        scheme=scheme,
        p_dbm=p_dbm,
        de_rate_bits=_bits(de_rate),
        mc_rate_bits=_bits(estimate.mean_nats),
        mc_stderr_bits=_bits(estimate.stderr_nats),
        ao_iterations=iterations,
        wall_time_s=elapsed if timing else 0.0,
        seed=cell_seed,
    )


def cmd_sweep(args) -> int:
    config = SystemConfig.from_file(args.config)
    scenario = _scenario_id(args.config)
    base_stats = generate_stats(config)
    try:
        powers = [float(v) for v in args.p_dbm.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise MimoselError(f"bad --p-dbm list: {exc}") from exc
    if not powers:
        raise MimoselError("--p-dbm must list at least one power budget")
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise MimoselError(f"unknown scheme {scheme!r} (expected one of {SCHEMES})")
    if args.decoding == "both":
        modes = list(DECODING_MODES)
    else:
        modes = ["independent" if args.decoding == "indep" else args.decoding]

    cells = [
        (p, scheme, mode) for p in powers for scheme in schemes for mode in modes
    ]
    n_threads = max(1, int(os.environ.get("MIMOSEL_THREADS", "1")))

    def run_cell(cell):
        p_dbm, scheme, mode = cell
        try:
            return _sweep_cell(
                base_stats, scenario, p_dbm, scheme, mode,
                args.samples, config.rng_seed, args.timing,
            ), None
        except Exception as exc:  # cell isolation: sweep must continue
            return None, f"cell p={p_dbm} {scheme}/{mode}: {exc}"

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            outcomes = list(pool.map(run_cell, cells))
    else:
        outcomes = [run_cell(cell) for cell in cells]

    records, failures = [], []
    for cell, (record, failure) in zip(cells, outcomes):
        if record is not None:
            records.append(record)
        else:
            failures.append(failure)
            p_dbm, scheme, mode = cell
            records.append(
                RunRecord(
                    scenario_id=scenario, decoding=mode, scheme=scheme, p_dbm=p_dbm,
                    de_rate_bits=0.0, mc_rate_bits=0.0, mc_stderr_bits=0.0,
                    ao_iterations=0, wall_time_s=0.0,
                    seed=derive_seed(config.rng_seed, f"{_fmt(p_dbm)}|{scheme}|{mode}", 0),
                )
            )
    write_table(args.out, records)
    print(f"wrote {len(records)} rows to {args.out}")
    for failure in failures:
        print(f"warning: {failure}", file=sys.stderr)
    return 1 if failures else 0


def cmd_validate(args) -> int:
    reports = run_suite(args.suite)
    name_width = max(len(r.name) for r in reports)
    inst_width = max(len(r.instance) for r in reports)
    failures = 0
    for report in reports:
        status = "pass" if report.passed else "FAIL"
        failures += 0 if report.passed else 1
        print(
            f"{status}  {report.name:<{name_width}}  {report.instance:<{inst_width}}  "
            f"reference={_fmt(report.reference):>18s} candidate={_fmt(report.candidate):>18s} "
            f"rel_err={report.rel_error:.3e}"
        )
    print(f"{len(reports) - failures}/{len(reports)} checks passed")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("name,instance,reference,candidate,abs_error,rel_error,passed\n")
            for r in reports:
                fh.write(
                    f"{r.name},{r.instance},{_fmt(r.reference)},{_fmt(r.candidate)},"
                    f"{_fmt(r.abs_error)},{_fmt(r.rel_error)},{int(r.passed)}\n"
                )
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimosel",
        description="Statistics-driven antenna selection and covariance design runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="synthesize channel statistics from a config file")
    p.add_argument("config", help="scenario config (JSON)")
    p.add_argument("out", help="output statistics file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("optimize", help="run the alternating design on stored statistics")
    p.add_argument("stats", help="statistics file from gen")
    p.add_argument("--decoding", choices=("joint", "indep", "independent"), default="joint")
    p.add_argument("--out", help="design output file (JSON)")
    p.add_argument("--table", help="write the run record as a one-row CSV table")
    p.add_argument("--trace", help="write per-iteration objective values as a CSV table")
    p.add_argument("--timing", action="store_true", help="record wall time (non-deterministic)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="Monte-Carlo evaluation of a stored design")
    p.add_argument("stats", help="statistics file from gen")
    p.add_argument("design", help="design file from optimize")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None, help="Monte-Carlo seed (default: scenario seed)")
    p.add_argument("--scheme", choices=SCHEMES, default="proposed", help="scheme label for the record")
    p.add_argument("--table", help="write the run record as a one-row CSV table")
    p.add_argument("--timing", action="store_true", help="record wall time (non-deterministic)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="power sweep over schemes and decoding modes")
    p.add_argument("config", help="scenario config (JSON)")
    p.add_argument("--p-dbm", default=",".join(_fmt(v) for v in DEFAULT_SWEEP_DBM),
                   help="comma-separated power budgets in dBm")
    p.add_argument("--schemes", default="proposed,baseline")
    p.add_argument("--decoding", choices=("joint", "indep", "independent", "both"), default="both")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", required=True, help="output CSV table")
    p.add_argument("--timing", action="store_true", help="record wall times (non-deterministic)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run oracle cross-check suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--out", help="write the report rows as CSV")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MimoselError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
