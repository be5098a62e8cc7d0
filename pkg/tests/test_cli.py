"""Command-line behaviour: exit codes, outputs, file products."""

import csv
import io
import os
import subprocess
import sys

import pytest

from tracematch.cli import main

from helpers import FIG1_MODEL

COUNTEREXAMPLE_MODEL = b"""
lifelines: l1, l2, l3
messages: m
interaction: alt(strict(l1!m,l2?m),strict(l1!m,l3?m))
"""


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_bytes(data)
    return str(path)


def kv(out: str) -> dict:
    pairs = [line.split("=", 1) for line in out.splitlines() if "=" in line]
    return dict(pairs)


def test_analyze_ok(tmp_path, capsys):
    model = write(tmp_path, "m.txt", FIG1_MODEL)
    trace = write(tmp_path, "t.txt", b"lp: lp!pub\nlb: lb?sub\n")
    code = main(["analyze", model, trace, "--full"])
    out = kv(capsys.readouterr().out)
    assert code == 0
    assert out["verdict"] == "ok"
    assert int(out["node_count"]) == 10
    assert int(out["elapsed_us"]) >= 0


def test_analyze_nok_exit_code(tmp_path, capsys):
    model = write(tmp_path, "m.txt", COUNTEREXAMPLE_MODEL)
    trace = write(tmp_path, "t.txt", b"l1: l1!m\nl2: l2?m\nl3: l3?m\n")
    code = main(["analyze", model, trace])
    assert code == 1
    assert kv(capsys.readouterr().out)["verdict"] == "nok"


def test_analyze_flags_and_dot(tmp_path, capsys):
    model = write(tmp_path, "m.txt", FIG1_MODEL)
    trace = write(tmp_path, "t.txt", b"lp: lp!pub\nlb: lb?sub\n")
    dot = tmp_path / "g.dot"
    code = main(
        [
            "analyze",
            model,
            trace,
            "--por",
            "--loc",
            "--loc-depth",
            "3",
            "--strategy",
            "bfs",
            "--timeout-ms",
            "5000",
            "--full",
            "--dot",
            str(dot),
        ]
    )
    assert code == 0
    assert dot.read_bytes().startswith(b"digraph analysis")
    capsys.readouterr()


def test_analyze_missing_and_malformed_inputs(tmp_path, capsys):
    trace = write(tmp_path, "t.txt", b"lp: lp!pub\n")
    assert main(["analyze", str(tmp_path / "nope.txt"), trace]) == 2
    bad_model = write(tmp_path, "bad.txt", b"lifelines: lp\nmessages: m\ninteraction: seq(lp!m")
    model_ok = write(tmp_path, "m.txt", FIG1_MODEL)
    assert main(["analyze", bad_model, trace]) == 2
    err = capsys.readouterr().err
    assert "bad.txt" in err
    bad_trace = write(tmp_path, "bt.txt", b"lp: lp!pub\nlp: lp!pub\n")
    assert main(["analyze", model_ok, bad_trace]) == 2
    err = capsys.readouterr().err
    assert "bt.txt:2" in err


def test_analyze_usage_error(capsys):
    assert main(["analyze", "--bogus"]) == 2
    capsys.readouterr()


def test_timeout_exit_and_env_override(tmp_path, capsys, monkeypatch):
    # an unsatisfiable encoding large enough to exceed a 1 ms budget:
    # the eight sign patterns over x1..x3 plus filler clauses on nine
    # more variables that only inflate the search space
    rows = [
        f"{s1 * 1} {s2 * 2} {s3 * 3} 0"
        for s1 in (1, -1)
        for s2 in (1, -1)
        for s3 in (1, -1)
    ]
    rows += ["4 5 6 0", "7 8 9 0", "10 11 12 0", "-4 -7 -10 0"]
    dimacs = [f"p cnf 12 {len(rows)}"] + rows
    cnf = write(tmp_path, "f.cnf", "\n".join(dimacs).encode() + b"\n")
    out = tmp_path / "sat"
    assert main(["sat", "--dimacs", cnf, "--out", str(out)]) == 0
    capsys.readouterr()
    monkeypatch.setenv("TRACEMATCH_TIMEOUT_MS", "1")
    code = main(["analyze", str(out / "model.txt"), str(out / "trace.txt"), "--full"])
    got = kv(capsys.readouterr().out)
    assert code == 3
    assert got["verdict"] == "timeout"
    monkeypatch.setenv("TRACEMATCH_TIMEOUT_MS", "bogus")
    assert main(["analyze", str(out / "model.txt"), str(out / "trace.txt")]) == 2
    capsys.readouterr()


def test_generate_writes_conforming_models(tmp_path, capsys):
    out = tmp_path / "models"
    code = main(
        ["generate", "--out", str(out), "--preset", "paper", "--count", "3", "--seed", "9"]
    )
    assert code == 0
    capsys.readouterr()
    from tracematch import parse_model
    from tracematch.terms import node_count, term_depth

    files = sorted(out.glob("model_*.txt"))
    assert len(files) == 3
    texts = set()
    for f in files:
        sig, term = parse_model(f.read_bytes(), path=str(f))
        assert term_depth(term) >= 6
        assert node_count(term) >= 20
        texts.add(term.text)
    assert len(texts) == 3

    again = tmp_path / "again"
    assert main(["generate", "--out", str(again), "--preset", "paper", "--count", "3", "--seed", "9"]) == 0
    capsys.readouterr()
    assert [f.read_bytes() for f in sorted(again.glob("*.txt"))] == [
        f.read_bytes() for f in files
    ]


def test_generate_requires_out():
    assert main(["generate", "--count", "1"]) == 2


def test_mutate_commands(tmp_path, capsys):
    model = write(tmp_path, "m.txt", FIG1_MODEL)
    out_acc = tmp_path / "acc.txt"
    assert main([
        "mutate", "--model", model, "--trace", model, "--kind", "accepted",
        "--out", str(out_acc), "--seed", "5", "--min-len", "2", "--max-len", "8",
    ]) == 2  # trace file is a model file: parse error
    capsys.readouterr()

    empty = write(tmp_path, "e.txt", b"")
    assert main([
        "mutate", "--model", model, "--trace", empty, "--kind", "accepted",
        "--out", str(out_acc), "--seed", "5", "--min-len", "2", "--max-len", "8",
    ]) == 0
    capsys.readouterr()
    assert main(["analyze", model, str(out_acc)]) == 0
    capsys.readouterr()

    out_pref = tmp_path / "pref.txt"
    assert main([
        "mutate", "--model", model, "--trace", str(out_acc), "--kind", "prefix",
        "--out", str(out_pref), "--seed", "6",
    ]) == 0
    capsys.readouterr()
    assert main(["analyze", model, str(out_pref)]) == 0
    capsys.readouterr()

    out_noise = tmp_path / "noise.txt"
    assert main([
        "mutate", "--model", model, "--trace", str(out_pref), "--kind", "noise",
        "--out", str(out_noise), "--seed", "7",
    ]) == 0
    capsys.readouterr()

    out_swap = tmp_path / "swap.txt"
    assert main([
        "mutate", "--model", model, "--trace", str(out_acc), "--kind", "swap-comp",
        "--trace2", str(out_pref), "--out", str(out_swap), "--seed", "8",
    ]) == 0
    capsys.readouterr()
    assert main([
        "mutate", "--model", model, "--trace", str(out_acc), "--kind", "swap-comp",
        "--out", str(out_swap),
    ]) == 2
    capsys.readouterr()


def test_sat_roundtrip_satisfiable_and_not(tmp_path, capsys):
    sat_text = b"p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n"
    cnf = write(tmp_path, "s.cnf", sat_text)
    out = tmp_path / "enc"
    assert main(["sat", "--dimacs", cnf, "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["analyze", str(out / "model.txt"), str(out / "trace.txt")]) == 0
    capsys.readouterr()

    unsat_rows = [
        f"{s1} {s2} {s3} 0".replace("+", "")
        for s1 in ("1", "-1")
        for s2 in ("2", "-2")
        for s3 in ("3", "-3")
    ]
    unsat = write(
        tmp_path, "u.cnf", ("p cnf 3 8\n" + "\n".join(unsat_rows) + "\n").encode()
    )
    out2 = tmp_path / "enc2"
    assert main(["sat", "--dimacs", unsat, "--out", str(out2)]) == 0
    capsys.readouterr()
    assert main(["analyze", str(out2 / "model.txt"), str(out2 / "trace.txt")]) == 1
    capsys.readouterr()


def test_bench_writes_csv(tmp_path, capsys):
    config = write(
        tmp_path,
        "suite.json",
        b"""
        {
          "gen": {"max_depth": 7, "min_depth": 4, "min_symbols": 10},
          "interaction_count": 1,
          "traces_per_kind": 2,
          "max_trace_len": 6,
          "timeout_ms": 2000
        }
        """,
    )
    out = tmp_path / "bench"
    code = main(["bench", "--config", config, "--out", str(out), "--seed", "3"])
    printed = kv(capsys.readouterr().out)
    assert code == 0
    with open(out / "results.csv", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == int(printed["rows"])
    assert {r["method"] for r in rows} == {"base", "por", "loc", "por+loc"}
    assert {r["mode"] for r in rows} == {"full", "stop"}


def test_bench_rejects_bad_config(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", b"{ not json")
    assert main(["bench", "--config", bad, "--out", str(tmp_path / "x")]) == 2
    capsys.readouterr()
    unknown = write(tmp_path, "unknown.json", b"{\"bogus_key\": 1}")
    assert main(["bench", "--config", unknown, "--out", str(tmp_path / "y")]) == 2
    capsys.readouterr()


def test_console_script_entry_point(tmp_path):
    model = tmp_path / "m.txt"
    model.write_bytes(FIG1_MODEL)
    trace = tmp_path / "t.txt"
    trace.write_bytes(b"lp: lp!pub\nlb: lb?sub\n")
    proc = subprocess.run(
        [sys.executable, "-m", "tracematch.cli", "analyze", str(model), str(trace)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "verdict=ok" in proc.stdout
