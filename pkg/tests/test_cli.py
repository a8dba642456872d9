import json

import pytest

from sumhorn import corpus
from sumhorn.chc.solver import executable
from sumhorn.cli import build_parser, main

needs_z3 = pytest.mark.skipif(executable("z3") is None, reason="z3 not installed")

EUCLID_POSITIVE = corpus.source("euclid").replace(
    "invariant x > 0 && y > 0 && gcd(x, y) == gcd(x0, y0);", "invariant x > 0 && y > 0;")


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parser_defaults():
    a = build_parser().parse_args(["verify", "euclid"])
    assert (a.encoding, a.backend, a.timeout, a.annotations, a.seed) == ("both", "z3", 900.0, "auto", 0)
    o = build_parser().parse_args(["oracle-check"])
    assert (o.count, o.domain_bound, o.budget) == (200, 2, 10**6)


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_verify_nothing(capsys):
    assert main(["verify"]) == 0
    assert capsys.readouterr().out == ""


@needs_z3
def test_verify_euclid(capsys):
    assert main(["verify", "euclid", "--timeout", "60"]) == 0
    out = capsys.readouterr().out
    assert out.count("Verified") == 6  # three rows plus three tallies


@needs_z3
def test_verify_bug_json(capsys):
    assert main(["verify", "euclid_bug", "--encoding", "inv", "--json"]) == 10
    [row] = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert row["verdict"] == "Refuted" and row["encoding"] == "inv"


def test_verify_missing_backend_exit_code():
    if executable("eldarica"):
        pytest.skip("eldarica installed")
    assert main(["verify", "countdown", "--encoding", "inv", "--backend", "eldarica"]) == 20


def test_bad_timeout_is_usage_error():
    assert main(["verify", "countdown", "--timeout", "0"]) == 2


def test_bridge_lift(capsys):
    code = main(["bridge", "lift", corpus.path("euclid"), "--pre", "x == x0 && y == y0 && x0 > 0 && y0 > 0",
                 "--inv", "x > 0 && y > 0"])
    assert code == 0
    assert capsys.readouterr().out.strip() == \
        "x > 0 && y > 0 && (x0 > 0 && (y0 > 0 && gcd(x, y) == gcd(x0, y0)))"


def test_bridge_lower(capsys):
    assert main(["bridge", "lower", corpus.path("countdown"), "--post", "x == 0"]) == 0
    assert "==> x == 0" in capsys.readouterr().out


def test_bridge_bad_loop_index():
    assert main(["bridge", "lift", corpus.path("countdown"), "--loop", "3"]) == 2


def test_bridge_lift_without_summary(tmp_path):
    f = write(tmp_path, "p.imp", "int main() { int x; while (x > 0) invariant x >= 0; { x = x - 1; } return 0; }")
    assert main(["bridge", "lift", f]) == 2


@needs_z3
def test_prove_euclid(tmp_path, capsys):
    assert main(["prove", write(tmp_path, "e.imp", EUCLID_POSITIVE)]) == 0
    assert "group 3: 4 valid, 0 invalid, 0 undecided" in capsys.readouterr().out


@needs_z3
def test_prove_mutant(tmp_path, capsys):
    src = EUCLID_POSITIVE.replace("gcd(old(x), old(y))", "gcd(old(x), old(x))")
    assert main(["prove", write(tmp_path, "m.imp", src), "--json"]) == 10
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert any(r["verdict"] == "invalid" and r["witness"] for r in rows)


def test_prove_unsupported():
    assert main(["prove", corpus.path("break_exit")]) == 2


def test_oracle_check_ok(capsys):
    assert main(["oracle-check", "--count", "10", "countdown"]) == 0
    out = capsys.readouterr().out
    assert "ok        mutant:break-clause" in out
    assert out.strip().endswith("0 with violations, 0 over budget")


def test_oracle_check_budget_exit():
    assert main(["oracle-check", "--count", "5", "--budget", "4", "countdown"]) == 3


def test_oracle_check_json(capsys):
    assert main(["oracle-check", "--count", "5", "--no-bridge", "--json", "countdown"]) == 0
    names = [json.loads(l)["task"] for l in capsys.readouterr().out.splitlines()]
    assert "suite" in names and not any(n.startswith("bridge") for n in names)
