import csv
import io
import json
import subprocess
import sys

import pytest

from ontic import cli, protocol
from ontic.clientserver import serve
from ontic.rules import load_rule


def run(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_simulate_row_count(capsys):
    code, out, _ = run(["simulate", "--rule", "binary_expansion", "--depth", "64", "--seeds", "10"], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 10 * 65
    assert list(table[0]) == ["seed", "n", "label_bits", "c_bits", "exact"]
    assert out.endswith("\n") and "\r" not in out


def test_simulate_unknown_rule(capsys, tmp_path):
    code, out, err = run(["simulate", "--rule", str(tmp_path / "nope.rule")], capsys)
    assert code == 2 and out == "" and "nope" in err


def test_simulate_bad_rule_file(capsys, tmp_path):
    p = tmp_path / "bad.rule"
    p.write_text("rule b { r=1; succ 0: x; }", encoding="utf-8")
    code, _, err = run(["simulate", "--rule", str(p)], capsys)
    assert code == 2 and "1:" in err


def test_simulate_domain_exceeded(capsys, tmp_path):
    p = tmp_path / "leak.rule"
    p.write_text("rule leak { r=0; map 1 -> 2; }", encoding="utf-8")
    code, _, err = run(["simulate", "--rule", str(p), "--depth", "5", "--seeds", "1"], capsys)
    assert code == 2 and "rule domain exceeded" in err


def test_simulate_successor_monotone(capsys):
    code, out, _ = run(["simulate", "--rule", "successor", "--depth", "4096", "--seeds", "1"], capsys)
    bits = [int(r["label_bits"]) for r in rows(out)]
    assert code == 0 and len(bits) == 4097 and bits == sorted(bits)


def test_bad_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["simulate", "--depth", "many"])
    assert err.value.code == 2
    assert run(["simulate", "--rule", "successor", "--depth", "-1"], capsys)[0] == 2
    assert run(["simulate", "--rule", "successor", "--seeds", "x"], capsys)[0] == 2
    assert run(["simulate", "--rule", "successor", "--machine", "utm"], capsys)[0] == 2


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"rule": "binary_expansion", "depth": 5, "seeds": "3"}), encoding="utf-8")
    _, out, _ = run(["simulate", "--config", str(cfg)], capsys)
    assert len(rows(out)) == 3 * 6
    _, out, _ = run(["simulate", "--config", str(cfg), "--depth", "2"], capsys)
    assert len(rows(out)) == 3 * 3
    cfg.write_text(json.dumps({"colour": 1}), encoding="utf-8")
    assert run(["simulate", "--config", str(cfg)], capsys)[0] == 2


def test_complexity_table(capsys):
    code, out, _ = run(["complexity", "--max-len", "4"], capsys)
    assert code == 0 and len(rows(out)) == 31
    code2, out2, _ = run(["complexity", "--max-len", "4", "--method", "enumeration"], capsys)
    assert code2 == 0
    assert [r["bits"] for r in rows(out2)] == [r["bits"] for r in rows(out)]


def test_chaitin(capsys):
    code, out, _ = run(["chaitin", "--r", "1", "--max-len", "8"], capsys)
    assert code == 0
    table = rows(out)
    assert [int(r["element"]) for r in table] == [2**k for k in range(8)]
    assert run(["chaitin", "--max-len", "0"], capsys)[0] == 2


def test_serve_client_file(capsys, tmp_path):
    stream = tmp_path / "s.bin"
    assert run(["serve", "--rule", "binary_expansion", "--count", "4096", "--out", str(stream)], capsys)[0] == 0
    code, out, err = run(["client", "--input", str(stream)], capsys)
    assert code == 0 and "status: complete" in err
    table = rows(out)
    assert [int(r["n"]) for r in table] == [2**k for k in range(13)]


def test_client_truncated(capsys, tmp_path):
    stream = tmp_path / "s.bin"
    data = b"".join(f.encode() for f in serve(load_rule("binary_expansion"), 1, 100))
    stream.write_bytes(data[:-7])
    code, out, err = run(["client", "--input", str(stream)], capsys)
    assert code == 0 and "truncated" in err
    assert all(r["status"] == "truncated" for r in rows(out))


def test_client_malformed(capsys, tmp_path):
    stream = tmp_path / "s.bin"
    frames = [protocol.hello(1, "be"), protocol.state(1, 1), protocol.state(3, 3), protocol.end()]
    stream.write_bytes(b"".join(f.encode() for f in frames))
    code, _, err = run(["client", "--input", str(stream)], capsys)
    assert code == 3 and "frame 3" in err
    stream.write_bytes(protocol.hello(1, "be").encode() + b"\x00\x00\x00\x00\x7f")
    assert run(["client", "--input", str(stream)], capsys)[0] == 3


def test_client_invariant_violation(capsys, monkeypatch, tmp_path):
    from ontic.clientserver import Accepted, ClientHistory

    bogus = ClientHistory("rm1", None, 1, "be", [Accepted(2, 2, 2), Accepted(3, 2, 3)], 3)
    monkeypatch.setattr(cli, "client_filter", lambda *a, **k: bogus)
    stream = tmp_path / "s.bin"
    stream.write_bytes(b"")
    assert run(["client", "--input", str(stream)], capsys)[0] == 4


def test_serve_client_tcp(capsys):
    server = protocol.TCPServer("127.0.0.1", 0)
    port = server.address[1]
    server.sock.close()
    proc = subprocess.Popen(
        [sys.executable, "-m", "ontic.cli", "serve", "--rule", "binary_expansion", "--count", "512",
         "--port", str(port)],
        stderr=subprocess.PIPE,
    )
    try:
        proc.stderr.readline()  # "serving ..." once listening
        code, out, err = run(["client", "--port", str(port)], capsys)
    finally:
        proc.wait(timeout=30)
    assert code == 0 and proc.returncode == 0
    assert [int(r["n"]) for r in rows(out)] == [2**k for k in range(10)]


@pytest.mark.parametrize("rule,depth,model", [
    ("binary_expansion", 64, "linear"),
    ("successor", 4096, "logarithmic"),
    ("footnote", 1000, "bounded"),
])
def test_analyze_verdicts(capsys, rule, depth, model):
    seeds = "1" if rule == "successor" else "5"
    code, out, err = run(["analyze", "--rule", rule, "--depth", str(depth), "--seeds", seeds], capsys)
    assert code == 0
    assert err.startswith(f"verdict: {model}")
    assert all(r["model"] == model for r in rows(out))


def test_analyze_from_profile_csv(capsys, tmp_path):
    prof = tmp_path / "p.csv"
    assert run(["simulate", "--rule", "binary_expansion", "--seeds", "3", "--out", str(prof)], capsys)[0] == 0
    code, out, err = run(["analyze", "--input", str(prof)], capsys)
    assert code == 0 and "verdict: linear" in err and len(rows(out)) == 3
    bogus = tmp_path / "x.csv"
    bogus.write_text("a,b\n1,2\n", encoding="utf-8")
    assert run(["analyze", "--input", str(bogus)], capsys)[0] == 2


@pytest.mark.parametrize("args", [
    ["simulate", "--rule", "binary_expansion", "--depth", "32", "--seeds", "4"],
    ["complexity", "--max-len", "5"],
    ["chaitin", "--r", "2", "--max-len", "5"],
    ["analyze", "--rule", "footnote", "--depth", "100", "--seeds", "3"],
])
def test_determinism(capsys, tmp_path, args):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)], capsys)[0] == 0
    assert run(args + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
