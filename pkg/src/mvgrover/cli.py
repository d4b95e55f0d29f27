"""Command-line front end: run searches, verify invariants, move state files.

Exit codes: 0 success, 1 configuration/file problems, 2 runs whose readout
is degenerate or not univocal.  Reports are JSON with every float written to
17 significant digits, so reading one back reproduces each value bit for bit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .config import load_config
from .errors import (
    BadMagic,
    ConfigInvalid,
    DegenerateWeights,
    MvGroverError,
    TruncatedFile,
)
from .kernel import load_state, quad_norm, save_state, state_to_bytes
from .search import SearchReport, build_list, final_state, run_search


@dataclass(frozen=True)
class RunRecord:
    """One run's archived result: config echo, report, timing, provenance."""

    config: dict
    report: Optional[SearchReport]
    wall_time_ms: float
    grid: dict
    version: str
    error: Optional[str] = None


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"  # JSON has no NaN/Infinity
    text = format(x, ".17g")
    if not any(c in text for c in ".eE"):  # bare integers keep float-ness
        text += ".0"
    return text


def _write_json(obj, out: list) -> None:
    """Minimal JSON writer so floats always carry 17 significant digits."""
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, complex):
        _write_json([obj.real, obj.imag], out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _write_json(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _write_json(value, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_record(record) -> str:
    buf: list = []
    _write_json(record, buf)
    return "".join(buf)


def _report_doc(report: SearchReport) -> dict:
    return {
        "norm_constant": report.norm_constant,
        "overlaps": {k: v for k, v in sorted(report.overlaps.items())},
        "identified": list(report.identified)
        if isinstance(report.identified, tuple)
        else report.identified,
        "per_cell_max_error": report.per_cell_max_error,
        "iterations_used": report.iterations_used,
        "ancilla_branch_norms": report.ancilla_branch_norms,
        "branch_identified": report.branch_identified,
        "failure": report.failure,
    }


def _record_doc(record: RunRecord) -> dict:
    return {
        "config": record.config,
        "report": _report_doc(record.report) if record.report else None,
        "wall_time_ms": record.wall_time_ms,
        "grid": record.grid,
        "version": record.version,
        "error": record.error,
    }


def _execute_run(config_path: str) -> tuple[Optional[str], int]:
    """Run one config; returns (record line or None on invalid config, exit code)."""
    try:
        cfg, echo = load_config(config_path)
    except ConfigInvalid as exc:
        print(f"config invalid ({config_path}): {exc}", file=sys.stderr)
        return None, 1

    started = time.perf_counter()
    try:
        report = run_search(cfg)
        error = None
    except DegenerateWeights as exc:
        report, error = None, f"DegenerateWeights: {exc}"
        print(f"{config_path}: {error}", file=sys.stderr)
    wall = (time.perf_counter() - started) * 1000.0

    record = RunRecord(
        config=echo,
        report=report,
        wall_time_ms=wall,
        grid={"n_modes": cfg.n_modes, "g_theta": cfg.g_theta, "g_k": cfg.g_k},
        version=__version__,
        error=error,
    )
    line = dumps_record(_record_doc(record))
    if report is None:
        return line, 2
    if report.identified is None:
        print(f"readout failed: {report.failure}", file=sys.stderr)
        return line, 2
    print(f"identified {report.identified} in {report.iterations_used} iteration(s)")
    return line, 0


def cmd_run(config_path: str, out_path: str) -> int:
    """Run one search; exit 0 on univocal identification, 2 otherwise."""
    line, code = _execute_run(config_path)
    if line is None:
        return code
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(line)
        fh.write("\n")
    return code


def cmd_run_batch(config_paths: list[str], out_path: str) -> int:
    """Run several configs; line-delimited records, worst exit code wins."""
    worst = 0
    lines = []
    for path in config_paths:
        line, code = _execute_run(path)
        worst = max(worst, code)
        lines.append(line if line is not None else dumps_record({"config_path": path, "error": "config invalid"}))
    with open(out_path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")
    return worst


def cmd_verify(level: str, corrupt: Optional[str] = None) -> int:
    from .verify import run_suite

    return 0 if run_suite(level, corrupt=corrupt) else 1


def cmd_state_save(config_path: str, path: str, stage: str) -> int:
    try:
        cfg, _ = load_config(config_path)
    except ConfigInvalid as exc:
        print(f"config invalid: {exc}", file=sys.stderr)
        return 1
    try:
        if stage == "list":
            state = build_list(cfg.envelopes, cfg.grid)
        else:
            state = final_state(cfg)
    except MvGroverError as exc:
        print(f"cannot build {stage} state: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    save_state(state, path)
    print(f"saved {stage} state ({len(state_to_bytes(state))} bytes) to {path}")
    return 0


def cmd_state_load(path: str, resave: Optional[str] = None) -> int:
    try:
        state = load_state(path)
    except FileNotFoundError:
        print(f"no such file: {path}", file=sys.stderr)
        return 1
    except (BadMagic, TruncatedFile) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    g = state.grid
    print(
        f"state: n_modes={g.n_modes} g_theta={g.g_theta} g_k={g.g_k} "
        f"quad_norm={quad_norm(state):.12g}"
    )
    if resave:
        save_state(state, resave)
        print(f"resaved to {resave}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvgrover",
        description="Grover search on qubits encoded in a discretized modular-variable grid",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a search from a JSON config")
    run.add_argument("--config", required=True, nargs="+", help="config file(s)")
    run.add_argument("--out", required=True, help="report file (JSONL for several configs)")

    verify = sub.add_parser("verify", help="run the invariant suites")
    verify.add_argument("--level", choices=("fast", "full"), default="fast")
    verify.add_argument("--corrupt", help=argparse.SUPPRESS)  # test hook

    state = sub.add_parser("state", help="save or load binary state files")
    state_sub = state.add_subparsers(dest="state_command", required=True)
    save = state_sub.add_parser("save", help="run a config and save the state")
    save.add_argument("--config", required=True)
    save.add_argument("--path", required=True)
    save.add_argument("--stage", choices=("list", "final"), default="final")
    load = state_sub.add_parser("load", help="load and summarize a state file")
    load.add_argument("--path", required=True)
    load.add_argument("--resave", help="write the loaded state back out")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        if len(args.config) == 1:
            return cmd_run(args.config[0], args.out)
        return cmd_run_batch(args.config, args.out)
    if args.command == "verify":
        return cmd_verify(args.level, corrupt=args.corrupt)
    if args.command == "state":
        if args.state_command == "save":
            return cmd_state_save(args.config, args.path, args.stage)
        return cmd_state_load(args.path, resave=args.resave)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
