import json
import os

import pytest

from sumhorn import corpus
from sumhorn.chc.solver import executable
from sumhorn.driver import (
    EXIT_REFUTED, EXIT_UNKNOWN, EXIT_VERIFIED, REFUTED, UNKNOWN, VERIFIED, RunConfig, Verdict, exit_code, load_tasks,
    report, tallies, verify,
)

needs_z3 = pytest.mark.skipif(executable("z3") is None, reason="z3 not installed")


def test_config_rejects_bad_values():
    for kw in ({"timeout": 0}, {"encoding": "bogus"}, {"backend": "cvc"}, {"annotations": "maybe"}):
        with pytest.raises(ValueError):
            RunConfig(**kw)


def test_config_expands_both_and_all():
    cfg = RunConfig(encoding="both", backend="all")
    assert cfg.encodings == ("inv", "sum", "combined")
    assert cfg.backends == ("z3", "eldarica")
    assert RunConfig(domain_bound=3).domain.hi == 3


def test_load_tasks(tmp_path):
    f = tmp_path / "a.imp"
    f.write_text("int main() { return 0; }")
    (tmp_path / "notes.txt").write_text("")
    tasks = load_tasks([str(tmp_path), "countdown", "nowhere"])
    assert [t.name for t in tasks] == ["a", "countdown", "nowhere"]
    assert tasks[1].source == corpus.source("countdown")
    assert tasks[2].source == ""


def test_exit_codes():
    v = lambda verdict: Verdict("t", "inv", "z3", verdict)
    assert exit_code([]) == EXIT_VERIFIED
    assert exit_code([v(VERIFIED)]) == EXIT_VERIFIED
    assert exit_code([v(VERIFIED), v(UNKNOWN), v(REFUTED)]) == EXIT_REFUTED
    assert exit_code([v(VERIFIED), v(UNKNOWN)]) == EXIT_UNKNOWN


def test_empty_report():
    assert report([]) == "" and report([], "json") == ""


def test_report_table_and_tallies():
    vs = [Verdict("a", "inv", "z3", VERIFIED, 12), Verdict("b", "inv", "z3", UNKNOWN, 5, reason="timeout")]
    lines = report(vs).splitlines()
    assert lines[0].split() == ["task", "encoding", "backend", "verdict", "time_ms", "validated"]
    assert lines[1].split() == ["a", "inv", "z3", "Verified", "12", "-"]
    assert "b/inv/z3: timeout" in lines[3]
    assert lines[-1] == "inv: 1 Verified, 0 Refuted, 1 Unknown"
    assert tallies(vs) == {"inv": {VERIFIED: 1, REFUTED: 0, UNKNOWN: 1}}


def test_json_rows_roundtrip():
    vs = [Verdict("a", "sum", "z3", REFUTED, 3, caveat="relative to encoding")]
    [row] = [json.loads(l) for l in report(vs, "json").splitlines()]
    assert Verdict(**{k: row[k] for k in row}) == vs[0]


def test_missing_file_is_unknown():
    [v] = verify(RunConfig(["no_such_program"], encoding="inv"))
    assert v.verdict == UNKNOWN and v.reason.startswith("error:")


def test_parse_error_is_unknown(tmp_path):
    f = tmp_path / "broken.imp"
    f.write_text("int main() { x = ; }")
    [v] = verify(RunConfig([str(f)], encoding="sum"))
    assert v.verdict == UNKNOWN and "error" in v.reason


def test_missing_backend_is_unknown():
    if executable("eldarica"):
        pytest.skip("eldarica installed")
    [v] = verify(RunConfig(["countdown"], encoding="inv", backend="eldarica"))
    assert v.verdict == UNKNOWN and v.reason == "unavailable"


@needs_z3
def test_countdown_and_twin():
    vs = verify(RunConfig(["countdown", "countdown_bug"], timeout=60, validate_model=True))
    got = {(v.task, v.encoding): v for v in vs}
    for enc in ("inv", "sum", "combined"):
        assert got["countdown", enc].verdict == VERIFIED
        assert got["countdown", enc].validated == "valid"
        assert got["countdown_bug", enc].verdict == REFUTED
        assert got["countdown_bug", enc].caveat == "relative to encoding"
    assert exit_code(vs) == EXIT_REFUTED


@needs_z3
def test_emit_chc_writes_both_forms(tmp_path):
    verify(RunConfig(["euclid"], encoding="inv", timeout=60, emit_chc=str(tmp_path)))
    files = set(os.listdir(tmp_path))
    assert {"euclid.inv.smt2", "euclid.inv.horn.smt2"} <= files


@needs_z3
def test_annotations_check_mode():
    [v] = verify(RunConfig(["euclid"], encoding="sum", annotations="check", timeout=60))
    assert v.verdict == VERIFIED and v.route == "check"
