import os
import time

import pytest

from sumhorn import corpus
from sumhorn.chc.model import Model, parse_model
from sumhorn.chc.sexpr import ModelParseError
from sumhorn.chc.smtlib import clause, emit, parse_script
from sumhorn.chc.solver import Sat, Unknown, executable, run_solver, solve, validity
from sumhorn.chc.transform import eliminate, relationalize
from sumhorn.chc.validate import corrupt, validate_model
from sumhorn.lang import load, parse_expr
from sumhorn.lang.ast import INT, TRUE, Binary, IntLit, Var, eq
from sumhorn.lang.pretty import pp_expr
from sumhorn.vcgen import ENCODINGS, encode
from sumhorn.vcgen.clauses import Atom, ClauseSystem, HornClause, PredSym

needs_z3 = pytest.mark.skipif(executable("z3") is None, reason="z3 not installed")

I = PredSym("I", "Inv", (("x", INT),))


def countdown_sum():
    return encode(load(corpus.source("countdown")), "sum")


# -- emitter -----------------------------------------------------------------------

def test_clause_syntax():
    c = HornClause((("x", INT),), (Atom(I, (Var("x"),)),), parse_expr("x > 0"), Atom(I, (parse_expr("x - 1"),)))
    assert clause(c) == "(assert (forall ((x Int)) (=> (and (I x) (> x 0)) (I (- x 1)))))"


def test_empty_system():
    text = emit(ClauseSystem()).text
    assert text == "(set-logic HORN)\n(check-sat)\n(get-model)\n"


@pytest.mark.parametrize("enc", ENCODINGS)
def test_emit_parse_roundtrip(enc):
    sys_ = encode(load(corpus.source("nested_sum")), enc)
    back = parse_script(emit(sys_).text, sys_.preds)
    assert [str(c) for c in back.clauses] == [str(c) for c in sys_.clauses]


def test_relationalize_removes_function_symbols():
    sys_ = encode(load(corpus.source("euclid")), "inv")
    text = emit(relationalize(sys_)).text
    assert "(declare-fun gcd " not in text
    assert "gcd_graph" in text


# -- models ------------------------------------------------------------------------

def test_parse_simple_model():
    m = parse_model("(define-fun I ((x Int)) Bool (>= x 0))")
    assert m.defs["I"][0] == ("x",)
    assert pp_expr(m.formula("I")) == "x >= 0"


def test_parse_model_expands_let():
    m = parse_model("(define-fun I ((x Int)) Bool (let ((a!1 (+ x 1))) (> a!1 0)))")
    assert pp_expr(m.formula("I")) == "x + 1 > 0"


def test_parse_model_renames_to_signature():
    m = parse_model("(define-fun I ((A Int)) Bool (not (<= A (- 1))))", preds=[I])
    assert m.defs["I"][0] == ("x",)
    assert "x" in pp_expr(m.formula("I"))


def test_parse_model_rejects_signature_mismatch():
    with pytest.raises(ModelParseError):
        parse_model("(define-fun I ((A Bool)) Bool A)", preds=[I])


def test_missing_predicates_read_as_false():
    m = parse_model("", preds=[I])
    assert pp_expr(m.formula("I")) == "false"


# an answer in the other backend's style: capital parameters, negated bounds
ELDARICA_STYLE = """sat
(
  (define-fun head_main_1 ((A Int) (B Int)) Bool (and (= B A) (not (<= A (- 1)))))
  (define-fun safe_main_1 ((A Int)) Bool (>= A 0))
  (define-fun sum_main_1 ((A Int) (B Int)) Bool (= B 0))
  (define-fun after_main_1 ((A Int) (B Int)) Bool (and (= B 0) (>= A 0)))
)
"""


@needs_z3
def test_foreign_model_parses_and_validates():
    sys_ = countdown_sum()
    m = parse_model(ELDARICA_STYLE.split("\n", 1)[1], sys_.preds, sys_.spec_funs)
    assert validate_model(sys_, m).status == "valid"


# -- solver ------------------------------------------------------------------------

@needs_z3
def test_assert_false_is_unsat():
    sys_ = encode(load("int main() { assert(false); return 0; }"), "inv")
    assert run_solver(emit(sys_), timeout=10).verdict == "unsat"


@needs_z3
def test_empty_system_is_sat():
    assert run_solver(emit(ClauseSystem()), timeout=10).verdict == "sat"


@needs_z3
def test_countdown_summary_model():
    sys_ = countdown_sum()
    r = solve(emit(sys_), timeout=30, preds=sys_.preds)
    assert isinstance(r, Sat)
    [R] = sys_.preds_of_kind("Sum")
    params, body = r.model.defs[R.name]
    # R(x, x_n) is equivalent to x_n == 0 on every pair
    same = Binary("<==>", body, eq(Var(params[1]), IntLit(0)))
    assert validity(same, tuple((p, INT) for p in params), timeout=10).status == "valid"


@needs_z3
def test_validate_solver_model_and_corruption():
    sys_ = countdown_sum()
    r = solve(emit(sys_), timeout=30, preds=sys_.preds)
    assert validate_model(sys_, r.model).status == "valid"
    [R] = sys_.preds_of_kind("Sum")
    bad = validate_model(sys_, corrupt(r.model, R.name, TRUE))
    assert bad.status == "invalid"
    assert any(c.status == "invalid" and c.witness for c in bad.checks)


@needs_z3
def test_unknown_fact_gives_gaps():
    # cubes never add up: true, but beyond a one-second budget
    P = PredSym("P", "Inv", (("x", INT), ("y", INT), ("z", INT)))
    args = tuple(Var(n) for n in "xyz")
    c = HornClause(P.sig, (), parse_expr("x > 0 && y > 0 && z > 0"), Atom(P, args), "fact")
    m = Model({"P": (("x", "y", "z"), parse_expr("x * x * x + y * y * y != z * z * z"))})
    rep = validate_model(ClauseSystem([P], [c]), m, timeout=1)
    assert rep.status == "validated-with-gaps"


def test_missing_definition_is_a_gap():
    sys_ = countdown_sum()
    rep = validate_model(sys_, Model({}), timeout=5)
    assert rep.status in ("validated-with-gaps", "valid")
    assert all(c.status == "unknown" for c in rep.checks if c.formula == "")


@needs_z3
def test_validity_witness():
    r = validity(parse_expr("x > 0"), (("x", INT),), timeout=10)
    assert r.status == "invalid"
    assert r.values["x"] <= 0
    assert validity(parse_expr("x0 > 0 && x == x0 ==> x > 0"), (("x", INT), ("x0", INT))).status == "valid"


def test_missing_backend_is_unknown(monkeypatch):
    monkeypatch.setenv("SUMHORN_ELDARICA", "/nonexistent/eld")
    monkeypatch.setattr("shutil.which", lambda name: None)
    r = run_solver(emit(ClauseSystem()), backend="eldarica", timeout=5)
    assert r.verdict in ("unknown", "crash")


def test_eliminate_keeps_requested_predicates():
    sys_ = countdown_sum()
    keep = [p.name for p in sys_.preds_of_kind("Sum") + sys_.preds_of_kind("SafeInv")]
    out = eliminate(sys_, keep)
    assert {p.name for p in out.used_preds()} == set(keep)


@needs_z3
def test_solver_timeout_is_enforced(tmp_path):
    # a hard nonlinear system; the deadline must hold within the grace period
    text = emit(encode(load(corpus.source("euclid")), "inv")).text
    start = time.perf_counter()
    r = run_solver(text, timeout=1, workdir=str(tmp_path))
    assert time.perf_counter() - start < 1 + 2 + 0.5
    assert os.path.exists(tmp_path / "query.z3.smt2")
    assert r.verdict in ("sat", "unknown")
    if isinstance(r, Unknown):
        assert r.reason in ("timeout", "unknown")
