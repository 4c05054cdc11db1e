"""Command-line experiment runner.

Exit codes: 0 success, 2 usage or configuration error, 3 protocol error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from collections import Counter
from contextlib import contextmanager
from pathlib import Path

from . import protocol
from .analysis import classify_growth, typicality_test, write_fits_csv
from .chaitin import chaitin_progression
from .clientserver import client_filter, equivalence_report, serve
from .complexity import (
    all_strings,
    complexity_profile,
    enumeration_table,
    inversion_table,
)
from .machines import get_machine
from .model import RuleDomainError, RuleError, random_path
from .protocol import ProtocolError
from .rules import RuleSyntaxError, load_rule

EXIT_USAGE, EXIT_PROTOCOL, EXIT_INVARIANT = 2, 3, 4

DEFAULTS = {
    "root": 1,
    "depth": 64,
    "count": 4096,
    "seeds": "10",
    "machine": "rm1",
    "budget": None,
    "out": None,
    "port": None,
    "host": "127.0.0.1",
    "tolerance": 2.0,
    "r": None,
    "max_len": 8,
    "method": "inversion",
    "input": None,
    "rule": None,
}


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


def parse_seeds(text) -> list[int]:
    """``"10"`` means seeds 0..9; ``"3,7,11"`` lists seeds explicitly."""
    if isinstance(text, int):
        return list(range(text))
    if isinstance(text, list):
        return [int(s) for s in text]
    text = str(text).strip()
    try:
        if "," in text:
            return [int(s) for s in text.split(",") if s.strip()]
        return list(range(int(text)))
    except ValueError:
        raise UsageError(f"bad --seeds value {text!r}") from None


def parse_budget(value):
    if value is None or value in ("", "unbounded", "none"):
        return None
    budget = int(value)
    if budget < 0:
        raise UsageError("--budget must be >= 0")
    return budget


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values; flags override it")
    common.add_argument("--rule", help="path to a .rule file or a bundled rule name")
    common.add_argument("--root", type=int)
    common.add_argument("--depth", type=int)
    common.add_argument("--count", type=int)
    common.add_argument("--seeds")
    common.add_argument("--machine")
    common.add_argument("--budget")
    common.add_argument("--out")
    common.add_argument("--port", type=int)
    common.add_argument("--host")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--r", type=int, help="override the rule's arity exponent")
    common.add_argument("--max-len", dest="max_len", type=int)
    common.add_argument("--input")

    p = argparse.ArgumentParser(prog="ontic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="complexity profiles of random experiences")
    cx = sub.add_parser("complexity", parents=[common], help="complexity table of all short strings")
    cx.add_argument("--method", choices=["inversion", "enumeration"])
    sub.add_parser("chaitin", parents=[common], help="budgeted Chaitin progression")
    sub.add_parser("serve", parents=[common], help="stream BFS states as frames")
    sub.add_parser("client", parents=[common], help="filter a frame stream into a history")
    sub.add_parser("analyze", parents=[common], help="classify growth of complexity profiles")
    return p


def resolve(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update(loaded)
    for key, value in vars(args).items():
        if value is not None and key in DEFAULTS:
            opts[key] = value
    opts["budget"] = parse_budget(opts["budget"])
    for key, minimum in (("depth", 0), ("count", 0), ("root", 0), ("max_len", 0)):
        if opts[key] is not None and int(opts[key]) < minimum:
            raise UsageError(f"--{key.replace('_', '-')} must be >= {minimum}")
    return opts


@contextmanager
def text_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fp:
            yield fp


def _rule(opts):
    if not opts["rule"]:
        raise UsageError("--rule is required")
    try:
        return load_rule(opts["rule"])
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None


def _render_r(opts, rule) -> int:
    return rule.r if opts["r"] is None else opts["r"]


def simulate_rows(opts):
    rule = _rule(opts)
    machine = get_machine(opts["machine"])
    r = _render_r(opts, rule)
    rows = []
    for seed in parse_seeds(opts["seeds"]):
        path = random_path(rule, opts["root"], opts["depth"], seed)
        for row in complexity_profile(machine, path, r, opts["budget"]):
            rows.append((seed, row.n, row.label_bits, row.value.bits, int(row.value.exact)))
    rows.sort(key=lambda t: (t[0], t[1]))
    return rows


def cmd_simulate(opts) -> int:
    rows = simulate_rows(opts)
    with text_out(opts["out"]) as fp:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["seed", "n", "label_bits", "c_bits", "exact"])
        for seed, n, lb, cb, exact in rows:
            w.writerow([seed, n, lb, "" if cb is None else cb, exact])
    return 0


def cmd_complexity(opts) -> int:
    machine = get_machine(opts["machine"])
    max_len = opts["max_len"]
    if opts["method"] == "enumeration":
        table = enumeration_table(machine, max_len, max_len + 1, opts["budget"])
    else:
        table = inversion_table(machine, all_strings(max_len), opts["budget"])
    with text_out(opts["out"]) as fp:
        table.write_csv(fp)
    return 0


def cmd_chaitin(opts) -> int:
    if opts["max_len"] < 1:
        raise UsageError("--max-len must be >= 1")
    r = 1 if opts["r"] is None else opts["r"]
    if r < 1:
        raise UsageError("--r must be >= 1")
    prog = chaitin_progression(get_machine(opts["machine"]), r, opts["max_len"], opts["budget"])
    with text_out(opts["out"]) as fp:
        prog.write_csv(fp)
    return 0


def cmd_serve(opts) -> int:
    rule = _rule(opts)
    frames = serve(rule, opts["root"], opts["count"])
    if opts["port"] is not None:
        server = protocol.TCPServer(opts["host"], opts["port"])
        host, port = server.address
        print(f"serving {rule.name} on {host}:{port}", file=sys.stderr)
        server.serve_once(frames)
    elif opts["out"] in (None, "-"):
        protocol.write_frames(frames, sys.stdout.buffer)
    else:
        with open(opts["out"], "wb") as sink:
            protocol.write_frames(frames, sink)
    return 0


def check_history(history) -> None:
    ns = [a.n for a in history.accepted]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvariantViolation("accepted indices are not strictly increasing")
    lengths = [a.l for a in history.accepted]
    if len(set(lengths)) != len(lengths):
        raise InvariantViolation("more than one accepted state for a digit-length")


def cmd_client(opts) -> int:
    machine = get_machine(opts["machine"])
    if opts["port"] is not None:
        frames = protocol.tcp_frames(opts["host"], opts["port"])
        history = client_filter(frames, machine, opts["budget"])
    elif opts["input"] in (None, "-"):
        history = client_filter(protocol.read_frames(sys.stdin.buffer), machine, opts["budget"])
    else:
        try:
            source = open(opts["input"], "rb")
        except OSError as exc:
            raise UsageError(str(exc)) from None
        with source:
            history = client_filter(protocol.read_frames(source), machine, opts["budget"])
    check_history(history)
    with text_out(opts["out"]) as fp:
        history.write_csv(fp, machine)
    msg = f"status: {history.status}; received {history.received}, accepted {len(history.accepted)}"
    if history.accepted:
        rep = equivalence_report(history, machine, opts["budget"])
        if not rep.insufficient_data:
            msg += (f"; complexity slope {rep.complexity_slope:.3f}/state,"
                    f" clock slope {rep.clock_slope:.3f}/binary digit")
    print(msg, file=sys.stderr)
    return 0


def _read_profiles(path) -> dict[int, list[tuple[int, int]]]:
    try:
        fp = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise UsageError(str(exc)) from None
    profiles: dict[int, list[tuple[int, int]]] = {}
    with fp:
        reader = csv.DictReader(fp)
        if not reader.fieldnames or not {"seed", "n", "c_bits"} <= set(reader.fieldnames):
            raise UsageError(f"{path} is not a simulate profile CSV")
        for row in reader:
            if row["c_bits"] != "":
                profiles.setdefault(int(row["seed"]), []).append((int(row["n"]), int(row["c_bits"])))
    return profiles


def cmd_analyze(opts) -> int:
    if opts["input"]:
        profiles = _read_profiles(opts["input"])
        r = 1 if opts["r"] is None else opts["r"]
    else:
        rule = _rule(opts)
        r = _render_r(opts, rule)
        profiles = {}
        for seed, n, _, cb, _ in simulate_rows(opts):
            if cb is not None:
                profiles.setdefault(seed, []).append((n, cb))
    results = []
    for seed in sorted(profiles):
        series = sorted(profiles[seed])
        try:
            fit = classify_growth(series, opts["tolerance"])
            typical = typicality_test(series, r, deviation=opts["tolerance"])[0] if len(series) >= 32 else False
        except ValueError as exc:
            raise UsageError(f"seed {seed}: {exc}") from None
        results.append((seed, fit, typical))
    if not results:
        raise UsageError("no profiles to analyze")
    with text_out(opts["out"]) as fp:
        write_fits_csv(fp, results)
    votes = Counter(fit.model for _, fit, _ in results)
    model, hits = votes.most_common(1)[0]
    n_typ = sum(t for _, _, t in results)
    print(f"verdict: {model} ({hits}/{len(results)} seeds; {n_typ} typical at r={r})", file=sys.stderr)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "complexity": cmd_complexity,
    "chaitin": cmd_chaitin,
    "serve": cmd_serve,
    "client": cmd_client,
    "analyze": cmd_analyze,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts)
    except (UsageError, RuleSyntaxError, RuleDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (InvariantViolation, RuleError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
