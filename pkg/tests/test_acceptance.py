"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import threading
import time
from contextlib import contextmanager

import pytest

from ontic import cli, protocol
from ontic.analysis import classify_growth, profile_series
from ontic.chaitin import chaitin_progression, length_range, refine
from ontic.clientserver import client_filter, perceived_time, serve
from ontic.complexity import (
    all_strings,
    complexity,
    complexity_profile,
    enumeration_table,
    inversion_table,
    is_compressible,
    representation,
)
from ontic.machines import RM1
from ontic.model import bfs_enumerate, evolve_path, random_path, successors
from ontic.rules import load_rule

from conftest import ACCEPTANCE

RM = RM1()


@contextmanager
def criterion(key, title, seconds=None):
    start = time.perf_counter()
    ACCEPTANCE[key] = (False, title)
    yield
    elapsed = time.perf_counter() - start
    detail = f"{title} ({elapsed:.2f}s"
    detail += f", limit {seconds}s)" if seconds else ")"
    ok = seconds is None or elapsed < seconds
    ACCEPTANCE[key] = (ok, detail)
    assert ok, f"{key} took {elapsed:.2f}s, limit {seconds}s"


@pytest.fixture(scope="module")
def enum_table_12():
    # every RM-1 program of at most 13 bits, run once
    return enumeration_table(RM, 12, 13)


def test_ac1_reference_rules():
    be, cs = load_rule("binary_expansion"), load_rule("successor")
    with criterion("AC1", "U0/U1 map 5 -> {10, 11}; Ucs maps x -> x+1 for x <= 10^6", seconds=1):
        assert successors(be, 5) == [10, 11]
        assert all(successors(cs, x) == [x + 1] for x in range(10**6 + 1))


def test_ac2_bfs_correspondence():
    be = load_rule("binary_expansion")
    with criterion("AC2", "n-th BFS label of the binary-expansion tree is n, n <= 2^16", seconds=5):
        count = 0
        for n, label in bfs_enumerate(be, 1, 1 << 16):
            assert label == n
            count += 1
        assert count == 1 << 16


def test_ac3_growth_dichotomy():
    be, cs, deg = load_rule("binary_expansion"), load_rule("successor"), load_rule("footnote")
    with criterion("AC3", "multiway linear / successor logarithmic / footnote bounded", seconds=120):
        good = 0
        for seed in range(100):
            series = profile_series(complexity_profile(RM, random_path(be, 1, 64, seed), 1))
            fit = classify_growth(series)
            good += fit.model == "linear" and abs(fit.slope - 1.0) <= 0.10
        assert good >= 95, f"only {good}/100 paths linear with slope 1 +- 10%"

        series = profile_series(complexity_profile(RM, evolve_path(cs, 1, [0] * 4096), 0))
        fit = classify_growth(series)
        assert fit.model == "logarithmic" and abs(fit.slope - 1.0) <= 0.20, fit

        for seed in range(100):
            series = profile_series(complexity_profile(RM, random_path(deg, 1, 1000, seed), 1))
            assert classify_growth(series).model == "bounded", seed


def test_ac4_pigeonhole(enum_table_12):
    with criterion("AC4", "#{s : |s| = n, C(s) < n - c} < 2^(n - c), n <= 12, c in 1..4", seconds=30):
        table = enum_table_12
        for n in range(13):
            strings = list(all_strings(n))[2**n - 1 :]
            assert len(strings) == 2**n and all(len(s) == n for s in strings)
            for c in range(1, 5):
                below = sum(1 for s in strings if table[s].bits < n - c)
                assert below < 2.0 ** (n - c), (n, c, below)


def test_ac5_oracle_agreement(enum_table_12):
    with criterion("AC5", "inversion complexity == enumeration complexity, |s| <= 12"):
        inv = inversion_table(RM, all_strings(12))
        assert len(inv.values) == 2**13 - 1
        for s, v in inv.values.items():
            assert v.exact and enum_table_12[s] == v, s


def test_ac6_chaitin_properties():
    with criterion("AC6", "progression members incompressible and minimal; refine monotone, l <= 10"):
        for r in (1, 2, 3):
            prog = chaitin_progression(RM, r, 10)
            for l, e in prog.entries.items():
                assert e is not None
                pool = length_range(r, l)
                assert e in pool
                assert not is_compressible(RM, e, r)
                assert complexity(RM, representation(e, r)).bits >= r * l
                assert all(is_compressible(RM, x, r) for x in range(pool.start, e))
            budgets = [0, 3, 8, 20, 64, None]
            for i, lo in enumerate(budgets):
                base = chaitin_progression(RM, r, 10, lo)
                for hi in budgets[i:]:
                    up = refine(base, hi)
                    for l in base.entries:
                        a, b = base.entries[l], up.entries[l]
                        assert (a is None and b is None) or (b is None or a <= b)


def test_ac7_client_server_equivalence():
    be = load_rule("binary_expansion")
    count = 1 << 12
    with criterion("AC7", "pipe and TCP histories identical; one entry per length; count ~ digits(N)", seconds=60):
        pipe = protocol.MemoryPipe()

        def pipe_server():
            protocol.write_frames(serve(be, 1, count), pipe)
            pipe.close()

        t = threading.Thread(target=pipe_server)
        t.start()
        via_pipe = client_filter(protocol.read_frames(pipe), RM)
        t.join()

        server = protocol.TCPServer("127.0.0.1", 0)
        host, port = server.address
        t = threading.Thread(target=server.serve_once, args=(serve(be, 1, count),))
        t.start()
        via_tcp = client_filter(protocol.tcp_frames(host, port), RM)
        t.join()

        in_process = client_filter(serve(be, 1, count), RM)
        assert via_pipe == via_tcp == in_process
        assert via_pipe.status == "complete" and via_pipe.received == count

        lengths = [a.l for a in via_pipe.accepted]
        assert len(lengths) == len(set(lengths))
        for n in (1, 2, 3, 100, 1000, count):
            accepted = sum(1 for a in via_pipe.accepted if a.n <= n)
            assert abs(accepted - perceived_time(n, 2)) <= 1, n


def test_ac8_perceived_time():
    with criterion("AC8", "perceived_time(2^k, 2) = k + 1 for k <= 62"):
        assert all(perceived_time(2**k, 2) == k + 1 for k in range(63))


def _cli_bytes(args, tmp_path, name):
    out = tmp_path / name
    assert cli.main(args + ["--out", str(out)]) == 0
    return out.read_bytes()


def test_ac9_cli_determinism(tmp_path, capsys):
    with criterion("AC9", "every subcommand re-run gives byte-identical output"):
        stream = tmp_path / "stream.bin"
        commands = {
            "simulate": ["simulate", "--rule", "binary_expansion", "--depth", "64", "--seeds", "10"],
            "complexity": ["complexity", "--max-len", "8"],
            "chaitin": ["chaitin", "--r", "1", "--max-len", "8"],
            "serve": ["serve", "--rule", "binary_expansion", "--count", "4096"],
            "analyze": ["analyze", "--rule", "footnote", "--depth", "200", "--seeds", "4"],
        }
        for name, args in commands.items():
            first = _cli_bytes(args, tmp_path, f"{name}1")
            assert first and first == _cli_bytes(args, tmp_path, f"{name}2"), name
        stream.write_bytes(_cli_bytes(commands["serve"], tmp_path, "serve3"))
        client = ["client", "--input", str(stream)]
        first = _cli_bytes(client, tmp_path, "client1")
        assert first and first == _cli_bytes(client, tmp_path, "client2")
        capsys.readouterr()
