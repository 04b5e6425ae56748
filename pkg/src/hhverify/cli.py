"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a tolerance failure (or a
counterexample found where none is expected, or an expected one missing),
2 on usage and configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from .errors import HHVerifyError
from .harness import (
    REGISTRY,
    TARGETS,
    CampaignReport,
    SearchConfig,
    get_entry,
    get_target,
    replay_report,
    replay_witness,
    run_campaign,
    search_counterexample,
)
from .matrix import SymMatrix

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
REPLAY_RTOL = 1e-12
CSV_HEADER = ("inequality", "seed", "trials", "dim", "order", "power", "min_margin", "failures", "elapsed_ms")
DEMO_TARGETS = ("popoviciu-exp", "neg-sqrt-2diff", "cubic-monotone")

_FLAG_KEYS = {
    "dim": "dim", "order": "order", "p": "power", "rho": "rho", "alpha": "alpha",
    "trials": "trials", "seed": "seed", "tol": "tol", "distribution": "distribution",
    "k": "k", "l": "l", "function": "function", "character": "character",
    "shift": "shift", "max_cond": "max_cond",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# serialization -----------------------------------------------------------------

def format_float(x: float) -> str:
    """Round-trip text for a float (17 significant digits)."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _json(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(obj: Any) -> str:
    return _json(obj) + "\n"


def serialize_report(report: CampaignReport, fmt: str = "json") -> str:
    """JSON object or one CSV row under the fixed header."""
    d = report.to_dict()
    if fmt == "json":
        return to_json(d)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        cfg = d["config"]
        writer.writerow([
            d["inequality"], cfg["seed"], d["trials"], cfg["dim"], cfg["order"], cfg["power"],
            format_float(d["min_margin"]), d["failures"], format_float(d["elapsed_ms"]),
        ])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(text: str) -> CampaignReport:
    return CampaignReport.from_dict(json.loads(text))


# config --------------------------------------------------------------------------

def read_config_file(path: str) -> dict[str, str]:
    """Plain ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def build_config(args: argparse.Namespace) -> SearchConfig:
    """Flags override the config file, which overrides the defaults."""
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    return SearchConfig.from_mapping(values)


# parser ---------------------------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--distribution")
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--function")
    p.add_argument("--character")
    p.add_argument("--shift", type=float)
    p.add_argument("--max-cond", dest="max_cond", type=float)
    p.add_argument("--config")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hhverify", description="Randomized verification of Hornich-Hlawka type inequalities.")
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)
    sub.required = True

    p_list = sub.add_parser("list", help="list registered inequalities")
    p_list.add_argument("--targets", action="store_true", help="list search targets instead")

    p_verify = sub.add_parser("verify", help="run a verification campaign")
    p_verify.add_argument("inequality")
    _add_config_flags(p_verify)

    p_search = sub.add_parser("search", help="search for a counterexample")
    p_search.add_argument("target")
    _add_config_flags(p_search)

    p_replay = sub.add_parser("replay", help="re-evaluate a report witness or explicit matrices")
    p_replay.add_argument("inequality", nargs="?")
    p_replay.add_argument("--report", help="JSON report to replay")
    p_replay.add_argument("--matrix", action="append", default=[], metavar="NAME=PATH")
    _add_config_flags(p_replay)

    p_demo = sub.add_parser("demo", help="reproduce the built-in counterexamples")
    p_demo.add_argument("what", choices=("counterexamples",))
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.add_argument("--trials", type=int, default=10000)
    p_demo.add_argument("--out")
    return parser


# verbs ------------------------------------------------------------------------------

def _emit(text: str, out: str | None, stdout) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _cmd_list(args, stdout) -> int:
    entries = TARGETS if args.targets else REGISTRY
    for e in entries.values():
        stdout.write(f"{e.id}\t{e.anchor}\n")
    return EXIT_OK


def _cmd_verify(args, stdout) -> int:
    entry = get_entry(args.inequality)
    cfg = build_config(args)
    report = run_campaign(entry.id, cfg, threads=args.threads)
    _emit(serialize_report(report, args.format), args.out, stdout)
    if report.exploratory:
        return EXIT_OK
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_search(args, stdout) -> int:
    entry = get_target(args.target)
    cfg = build_config(args)
    found = search_counterexample(entry.id, cfg, threads=args.threads)
    payload = {"target": entry.id, "found": found is not None, "witness": None if found is None else found.to_dict()}
    _emit(to_json(payload), args.out, stdout)
    if entry.exploratory:
        return EXIT_OK
    return EXIT_OK if (found is not None) == entry.expect_violation else EXIT_FAIL


def _cmd_replay(args, stdout) -> int:
    if args.report:
        with open(args.report, encoding="utf-8") as fh:
            report = parse_report(fh.read())
        margin, scale = replay_report(report)
        ref = report.min_margin
        ok = abs(margin - ref) <= REPLAY_RTOL * max(abs(ref), 1e-300) or margin == ref
        payload = {"inequality": report.inequality, "margin": margin, "reported": ref, "scale": scale, "reproduced": ok}
        _emit(to_json(payload), args.out, stdout)
        return EXIT_OK if ok else EXIT_FAIL
    if not args.inequality or not args.matrix:
        raise UsageError("replay needs --report PATH or an inequality id with --matrix NAME=PATH")
    get_entry(args.inequality)
    witness = {}
    for spec in args.matrix:
        if "=" not in spec:
            raise UsageError(f"--matrix expects NAME=PATH, got {spec!r}")
        name, path = spec.split("=", 1)
        with open(path, encoding="utf-8") as fh:
            m = SymMatrix.from_text(fh.read())
        if name in ("As", "xs"):
            witness.setdefault(name, []).append(m.a)
        else:
            witness[name] = m.a
    cfg = build_config(args)
    try:
        margin, scale = replay_witness(args.inequality, witness, cfg)
    except KeyError as exc:
        raise UsageError(f"missing matrix {exc.args[0]!r} for {args.inequality}") from None
    passed = margin >= -cfg.tol * scale
    _emit(to_json({"inequality": args.inequality, "margin": margin, "scale": scale, "passed": passed}), args.out, stdout)
    return EXIT_OK if passed else EXIT_FAIL


def _cmd_demo(args, stdout) -> int:
    cfg = SearchConfig(seed=args.seed, trials=args.trials)
    results, ok = [], True
    for target in DEMO_TARGETS:
        found = search_counterexample(target, cfg)
        ok &= found is not None
        results.append({
            "target": target,
            "statement": TARGETS[target].anchor,
            "found": found is not None,
            "witness": None if found is None else found.to_dict(),
        })
    _emit(to_json(results), args.out, stdout)
    return EXIT_OK if ok else EXIT_FAIL


_COMMANDS = {"list": _cmd_list, "verify": _cmd_verify, "search": _cmd_search, "replay": _cmd_replay, "demo": _cmd_demo}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.verb](args, stdout)
    except UsageError as exc:
        stderr.write(f"hhverify: error: {exc}\n")
    except (HHVerifyError, ValueError, OSError, json.JSONDecodeError) as exc:
        stderr.write(f"hhverify: error: {exc}\n")
    except KeyError as exc:
        stderr.write(f"hhverify: error: missing field {exc}\n")
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())
