"""Command line front end.

Subcommands::

    analyze    estimate -> factorize -> predict -> causality, JSON report
    psd        estimate the spectral density matrix only (CSV)
    factorize  spectral factor coefficients of the full spectrum (JSON)
    verify     spectral vs finite-history cross-validation on VAR fixtures
    simulate   write a VAR fixture realisation as CSV

Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .causality import CausalityReport, GroupSpec, evaluate_grouping
from .config import AnalysisConfig, GroupDefinition, load_config
from .core import FrequencyGrid, MultichannelSeries, SpectralDensityMatrix, check_paley_wiener
from .errors import InputError, NumericalError
from .estimation import estimate_psd
from .fixtures import FIXTURES, get_fixture
from .io import atomic_write_text, read_series_csv, write_series_csv, write_table_csv
from .matrix_factor import factorize_with_config
from .oracle import simulate_var
from .verification import format_table, run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _finite(value):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def dumps(obj) -> str:
    return json.dumps(_finite(obj), indent=2, allow_nan=False) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(output, text)


def _settings(args) -> AnalysisConfig:
    cfg = load_config(args.config)
    if getattr(args, "grid_size", None) is not None:
        FrequencyGrid(args.grid_size)
        cfg = replace(cfg, grid_size=args.grid_size)
    if getattr(args, "threshold", None) is not None:
        if not args.threshold > 0:
            raise InputError("--threshold must be positive")
        cfg = replace(cfg, threshold=args.threshold)
    return cfg


def _groupings(cfg: AnalysisConfig, series: MultichannelSeries) -> list[tuple[str, GroupSpec]]:
    defs = list(cfg.groups)
    if not defs:
        names = series.channel_names
        defs = [GroupDefinition(f"{s}->{t}", (t,), (s,)) for t in names for s in names if s != t]
    if not defs:
        raise InputError("need at least two channels (or explicit groups) for causality analysis")
    return [(g.name, GroupSpec(tuple(series.index_of(g.sources)), tuple(series.index_of(g.targets))))
            for g in defs]


def _psd_rows(S: SpectralDensityMatrix, names):
    header = ["theta"]
    pairs = [(k, l) for k in range(S.dim) for l in range(k, S.dim)]
    for k, l in pairs:
        header += [f"{names[k]}|{names[l]}_real", f"{names[k]}|{names[l]}_imag"]
    rows = []
    for i, th in enumerate(S.grid.theta):
        row = [th]
        for k, l in pairs:
            row += [S.values[i, k, l].real, S.values[i, k, l].imag]
        rows.append(row)
    return header, rows


def _write_plot_data(plot_dir: Path, S: SpectralDensityMatrix, names, results) -> None:
    plot_dir.mkdir(parents=True, exist_ok=True)
    pairs = [(k, l) for k in range(S.dim) for l in range(k, S.dim)]
    header = ["theta"] + [f"abs_{names[k]}|{names[l]}" for k, l in pairs]
    rows = [[th] + [abs(S.values[i, k, l]) for k, l in pairs] for i, th in enumerate(S.grid.theta)]
    write_table_csv(plot_dir / "psd_magnitude.csv", header, rows)

    header = ["n"]
    columns = []
    for res in results:
        header += [f"{res.name}_joint", f"{res.name}_marginal"]
        columns += [np.linalg.norm(res.joint_factor.coeffs, axis=(1, 2)),
                    np.linalg.norm(res.marginal_factor.coeffs, axis=(1, 2))]
    n = min(len(c) for c in columns)
    write_table_csv(plot_dir / "factor_norms.csv", header,
                    [[i] + [c[i] for c in columns] for i in range(n)])


def cmd_analyze(args) -> int:
    cfg = _settings(args)
    series = read_series_csv(args.input)
    S = estimate_psd(series, cfg.estimator, cfg.grid)
    pw = check_paley_wiener(S)
    results = [evaluate_grouping(S, spec, sorted(set(cfg.lags)), cfg.factorization, name)
               for name, spec in _groupings(cfg, series)]
    report = CausalityReport(
        channel_names=series.channel_names,
        results=results,
        threshold=cfg.threshold,
        grid_size=cfg.grid_size,
        n_samples=series.length,
        estimator=cfg.estimator.to_dict(),
        factorization=cfg.factorization.to_dict(),
        paley_wiener={"satisfied": pw.satisfied, "log_det_mean": pw.log_det_mean},
    )
    text = dumps(report.to_dict())
    if args.plot_dir:
        _write_plot_data(Path(args.plot_dir), S, series.channel_names, results)
    _emit(text, args.output)
    return EXIT_OK


def cmd_psd(args) -> int:
    cfg = _settings(args)
    series = read_series_csv(args.input)
    S = estimate_psd(series, cfg.estimator, cfg.grid)
    header, rows = _psd_rows(S, series.channel_names)
    if args.output is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([repr(float(v)) for v in row] for row in rows)
    else:
        write_table_csv(args.output, header, rows)
    return EXIT_OK


def cmd_factorize(args) -> int:
    cfg = _settings(args)
    series = read_series_csv(args.input)
    S = estimate_psd(series, cfg.estimator, cfg.grid)
    F = factorize_with_config(S, cfg.factorization)
    out = {
        "schema_version": CausalityReport.SCHEMA_VERSION,
        "channel_names": list(series.channel_names),
        "grid_size": cfg.grid_size,
        "residual": F.residual,
        "iterations": F.iterations,
        "truncated": F.truncated,
        "coefficients": [
            {"n": n, "real": c.real.tolist(), "imag": c.imag.tolist()}
            for n, c in enumerate(F.coeffs)
        ],
    }
    _emit(dumps(out), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = None
    if args.fixtures:
        names = [n.strip() for n in args.fixtures.split(",") if n.strip()]
        unknown = [n for n in names if n not in FIXTURES]
        if unknown:
            raise InputError(f"unknown fixture(s) {unknown}; available: {', '.join(FIXTURES)}")
    grid = FrequencyGrid(args.grid_size) if args.grid_size is not None else None
    rows = run_verification(names, tolerance=args.tolerance, grid=grid)
    print(format_table(rows))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_VERIFY_FAILED


def cmd_simulate(args) -> int:
    try:
        model = get_fixture(args.fixture)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    names = [n.strip() for n in args.names.split(",")] if args.names else ()
    series = simulate_var(model, args.length, args.seed, names)
    if args.output is None:
        sys.stdout.write(",".join(series.channel_names) + "\n")
        for row in series.data.T:
            sys.stdout.write(",".join(repr(float(v)) for v in row) + "\n")
    else:
        write_series_csv(args.output, series)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-granger",
        description="Wiener-Granger causality via matrix spectral factorization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def pipeline(name, help_text, func):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="CSV: header of channel names, one sample per row")
        p.add_argument("--config", help="INI configuration file")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--grid-size", type=int, help="frequency grid size K (power of two)")
        p.set_defaults(func=func)
        return p

    p = pipeline("analyze", "full causality analysis, JSON report", cmd_analyze)
    p.add_argument("--threshold", type=float, help="significance threshold on log_index")
    p.add_argument("--plot-dir", help="directory for plot-ready CSV data")
    pipeline("psd", "estimate the spectral density matrix (CSV)", cmd_psd)
    pipeline("factorize", "spectral factor coefficients of the full spectrum (JSON)", cmd_factorize)

    p = sub.add_parser("verify", help="cross-validate spectral and finite-history errors")
    p.add_argument("--fixtures", help=f"comma-separated subset of: {', '.join(FIXTURES)}")
    p.add_argument("--tolerance", type=float, default=1e-3, help="relative tolerance (default 1e-3)")
    p.add_argument("--grid-size", type=int, help="frequency grid size K (power of two)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="write a simulated VAR fixture as CSV")
    p.add_argument("--fixture", default="var1", help=f"one of: {', '.join(FIXTURES)}")
    p.add_argument("--length", type=int, default=2**17, help="number of samples")
    p.add_argument("--seed", type=int, default=0, help="PCG64 seed")
    p.add_argument("--names", help="comma-separated channel names")
    p.add_argument("--output", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
