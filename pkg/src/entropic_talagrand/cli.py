"""Command-line front end.

Subcommands: ``check <suite>`` (one or more verification suites),
``converge-w2`` (noise ladder toward the quadratic-transport limit),
``sweep --param lambda|epsilon|t`` (one-parameter ladders), and
``dump-kernel`` (log transition matrix as CSV).  Every run writes
results.csv, results.jsonl, summary.txt, and manifest.json into the output
directory.  Exit code 0 means every non-control check was satisfied and
every negative control failed as expected; 1 flags violations or unconverged
solves; 2 flags configuration problems.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ALL_SUITES, EPSILON_LADDER, RunConfig, T_LADDER
from .draws import tilted_measure
from .errors import NotConvergedError, ParameterError
from .inequalities import (write_reports_csv, write_reports_jsonl, eti_check,
                           eti_m_check)
from .reference import kernel_to_csv
from .suites import SUITE_RUNNERS, Workspace, run_suites

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eti",
        description="verify entropy-transport inequalities on grid kernels")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=str, default=None,
                       help="JSON config file")
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--t", type=float, default=None)
        p.add_argument("--s", type=float, default=None)
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument("--grid-n", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", type=str, default=None,
                       help="output directory")
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--draws", type=int, default=None,
                       help="override the per-suite draw counts")
        p.add_argument("--control-lambda", type=float, default=None,
                       help="constant for negative-control rows")
        p.add_argument("--full-output", action="store_true", default=None)

    p_check = sub.add_parser("check", help="run verification suites")
    p_check.add_argument("suites", nargs="*", metavar="suite",
                         help=f"suites to run (default: all of {', '.join(ALL_SUITES)})")
    p_check.add_argument("--dump-kernel", action="store_true",
                         help="also export the base kernel's log matrix as CSV")
    add_common(p_check)

    p_conv = sub.add_parser("converge-w2",
                            help="noise ladder toward the transport limit")
    add_common(p_conv)

    p_sweep = sub.add_parser("sweep", help="ladder over one parameter")
    p_sweep.add_argument("--param", required=True,
                         choices=["lambda", "epsilon", "t"])
    p_sweep.add_argument("--values", type=str, default=None,
                         help="comma-separated ladder values")
    add_common(p_sweep)

    p_dump = sub.add_parser("dump-kernel",
                            help="export the log transition matrix as CSV")
    add_common(p_dump)
    return parser


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        try:
            payload = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config: {exc}") from exc
        cfg = RunConfig.from_json_dict(payload)
    cfg = cfg.with_overrides(
        epsilon=args.epsilon, t=args.t, s=args.s, lam=args.lam,
        grid_n=getattr(args, "grid_n", None), seed=args.seed, tol=args.tol,
        out_dir=args.out, jobs=args.jobs, draws=args.draws,
        control_lambda=args.control_lambda, full_output=args.full_output)
    return cfg


def _config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(cfg.canonical_json().encode()).hexdigest()


def _write_outputs(cfg: RunConfig, results: dict, wall_time: float,
                   out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    ordered = []
    for name in cfg.suites:
        if name in results:
            ordered.extend(results[name])
    write_reports_csv(ordered, out_dir / "results.csv")
    write_reports_jsonl(ordered, out_dir / "results.jsonl")

    failures = [r for r in ordered
                if r.applicable and not r.control and not r.satisfied]
    vacuous_controls = [r for r in ordered if r.control and r.satisfied]
    lines = []
    for name in cfg.suites:
        if name not in results:
            continue
        rows = results[name]
        main = [r for r in rows if not r.control and r.applicable]
        controls = [r for r in rows if r.control]
        n_ok = sum(r.satisfied for r in main)
        worst = min((r.slack for r in main), default=float("nan"))
        line = (f"suite {name}: {n_ok}/{len(main)} satisfied, "
                f"worst slack {worst:.3e}")
        if controls:
            n_failed = sum(not r.satisfied for r in controls)
            line += (f"; {n_failed}/{len(controls)} negative controls "
                     f"failed as EXPECTED")
        lines.append(line)
    verdict = "PASS" if not failures and not vacuous_controls else "FAIL"
    lines.append(f"overall: {verdict} ({len(failures)} violations, "
                 f"{len(vacuous_controls)} vacuous controls)")
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")

    manifest = {
        "config": cfg.to_json_dict(),
        "config_hash": _config_hash(cfg),
        "versions": {
            "package": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_time_s": wall_time,
        "n_reports": len(ordered),
        "n_failures": len(failures),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2,
                                                      sort_keys=True))
    for line in lines:
        print(line)
    return EXIT_OK if verdict == "PASS" else EXIT_FAILED


def run_suite(cfg: RunConfig) -> int:
    """Execute the configured suites and write the report files."""
    start = time.perf_counter()
    try:
        results = run_suites(cfg)
    except NotConvergedError as exc:
        print(f"unconverged solve: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return _write_outputs(cfg, results, time.perf_counter() - start,
                          Path(cfg.out_dir))


def _sweep_values(args, cfg: RunConfig):
    if args.values:
        return [float(v) for v in args.values.split(",")]
    if args.param == "lambda":
        ws = Workspace(cfg)
        return [f * ws.lam for f in (0.25, 0.5, 1.0, 2.0, 4.0)]
    if args.param == "epsilon":
        return list(EPSILON_LADDER)
    return list(T_LADDER)


def run_sweep(cfg: RunConfig, param: str, values) -> int:
    start = time.perf_counter()
    ws = Workspace(cfg)
    rng = ws.rng("sweep")
    m = ws.measure()
    pairs = [(tilted_measure(m, rng), tilted_measure(m, rng))
             for _ in range(4)]
    reports = []
    for value in values:
        if param == "lambda":
            p = ws.params(lam=value)
            kernel = ws.kernel()
        elif param == "epsilon":
            p = ws.params(epsilon=value)
            kernel = ws.kernel(epsilon=value)
        else:
            p = ws.params(t=value, s=min(cfg.s, 0.5 * value))
            kernel = ws.kernel(t=value)
        for mu, nu in pairs:
            rep = eti_check(kernel, ws.measure(), mu, nu, p, cfg.tol)
            rep.name = "sweep_eti"
            rep.extras["sweep_param"] = param
            reports.append(rep)
            rep_m = eti_m_check(kernel, ws.measure(), mu, p, cfg.tol)
            rep_m.name = "sweep_eti_m"
            rep_m.extras["sweep_param"] = param
            reports.append(rep_m)
    results = {cfg.suites[0]: reports} if cfg.suites else {"eti": reports}
    cfg_one = cfg.with_overrides(suites=(next(iter(results)),))
    return _write_outputs(cfg_one, results, time.perf_counter() - start,
                          Path(cfg.out_dir))


def dump_kernel(cfg: RunConfig) -> int:
    ws = Workspace(cfg)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "kernel_log.csv"
    kernel_to_csv(ws.kernel(), path)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "check":
            if args.suites:
                cfg = cfg.with_overrides(suites=tuple(args.suites))
            code = run_suite(cfg)
            if args.dump_kernel:
                dump_kernel(cfg)
            return code
        if args.command == "converge-w2":
            cfg = cfg.with_overrides(suites=("converge-w2",))
            return run_suite(cfg)
        if args.command == "sweep":
            return run_sweep(cfg, args.param, _sweep_values(args, cfg))
        if args.command == "dump-kernel":
            return dump_kernel(cfg)
    except ParameterError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
