import pytest
from hypothesis import assume as hyp_assume, given, settings, strategies as st

from sumhorn import corpus
from sumhorn.lang import Var, load, parse_stmt
from sumhorn.lang.ast import INT, TRUE
from sumhorn.lang.pretty import pp_expr
from sumhorn.oracle.crosscheck import crosscheck
from sumhorn.oracle.randloops import random_loop
from sumhorn.semantics import Domain, run_main
from sumhorn.vcgen import ENCODINGS, annotations_to_constraints, encode, encode_combined, encode_inv, encode_sum
from sumhorn.vcgen.symexec import Fresh, SymExec, SymState, fun_cont


def run(src, **val):
    sx = SymExec(lambda n: INT, Fresh())
    start = SymState(val={n: Var(v) for n, v in val.items()})
    return sx.run(fun_cont(parse_stmt(src)), start)


def test_symexec_straight_line():
    [e] = run("{ x = x + 1; y = x; }", x="a", y="y")
    assert e.kind == "end"
    assert pp_expr(e.state.val["x"]) == "a + 1"
    assert pp_expr(e.state.val["y"]) == "a + 1"
    assert e.state.constraint() == TRUE


def test_symexec_if_forks():
    exits = run("{ if (x > y) x = x - y; else y = y - x; }", x="x", y="y")
    assert [pp_expr(e.state.constraint()) for e in exits] == ["x > y", "!(x > y)"]


def test_symexec_assert_splits():
    exits = run("{ assert(i <= n); }", i="i", n="n")
    kinds = {e.kind: pp_expr(e.state.constraint()) for e in exits}
    assert kinds == {"fail": "!(i <= n)", "end": "i <= n"}


def test_euclid_inv_system():
    sys_ = encode_inv(load(corpus.source("euclid")))
    inv = sys_.preds_of_kind("Inv")
    assert [(p.name, p.arity) for p in inv] == [("inv_main_1", 4)]
    assert [n for n, _ in inv[0].sig] == ["x0", "y0", "x", "y"]
    # init, exit, one step per branch, query
    assert len(sys_.clauses) == 5
    assert sum(c.is_query for c in sys_.clauses) == 1


def test_euclid_sum_system():
    sys_ = encode_sum(load(corpus.source("euclid")))
    [R] = sys_.preds_of_kind("Sum")
    assert R.arity == 4
    assert len(sys_.preds_of_kind("SafeInv")) == 1


def test_combined_adds_premises_not_clauses():
    p = load(corpus.source("euclid"))
    s, c = encode_sum(p), encode_combined(p)
    assert len(c.clauses) == len(s.clauses)
    safe = lambda sys_: sum(a.pred.kind == "SafeInv" for cl in sys_.clauses for a in cl.body)
    assert safe(c) > safe(s)


def test_trivial_assertions():
    for enc in ENCODINGS:
        assert encode(load("int main() { assert(true); return 0; }"), enc).clauses == []
        [c] = encode(load("int main() { assert(false); return 0; }"), enc).clauses
        assert c.body == () and c.head is None and c.constraint == TRUE


def test_loopless_program_same_under_all_encodings():
    src = "int main() { int x; assume(x > 0); x = x + 1; assert(x > 1); return 0; }"
    texts = {tuple(str(c) for c in encode(load(src), enc).clauses) for enc in ENCODINGS}
    assert len(texts) == 1


def test_false_test_loop():
    src = "int main() { int x; while (false) invariant x >= 0; summary x == old(x); { x = x + 1; } return 0; }"
    p = load(src)
    inv = [str(c) for c in encode_inv(p).clauses]
    assert inv == ["true ==> inv_main_1(x!1)", "inv_main_1(x) ==> after_main_1(x)"]
    sums = [str(c) for c in encode_sum(p).clauses]
    assert "true ==> sum_main_1(x, x)" in sums
    assert "safe_main_1(x) ==> sum_main_1(x, x)" in [str(c) for c in encode_combined(p).clauses]


def test_annotations_fix_summary():
    p = load(corpus.source("euclid"))
    out = annotations_to_constraints(p, encode_sum(p))
    [R] = out.preds_of_kind("Sum")
    [J] = out.preds_of_kind("SafeInv")
    # old(x) reads the iteration start, plain x the final state
    assert pp_expr(out.definitions[R.name]) == "x!n == gcd(x, y)"
    assert pp_expr(out.definitions[J.name]) == "x > 0 && y > 0 && gcd(x, y) == gcd(x0, y0)"


def test_no_annotations_leaves_system_unchanged():
    p = load("int main() { int x; while (x > 0) { x = x - 1; } assert(x <= 0); return 0; }")
    sys_ = encode_sum(p)
    out = annotations_to_constraints(p, sys_)
    assert out.definitions == {} and [str(c) for c in out.clauses] == [str(c) for c in sys_.clauses]


def test_unknown_encoding():
    with pytest.raises(ValueError):
        encode(load("int main() { return 0; }"), "bogus")


# -- clause systems against the interpreter ---------------------------------------

@pytest.mark.parametrize("name", corpus.safe_names())
@pytest.mark.parametrize("enc", ENCODINGS)
def test_corpus_crosscheck(name, enc):
    p = load(corpus.source(name))
    rep = crosscheck(p, encode(p, enc), Domain())
    assert rep.ok, rep.lines()


# assignments that can leave {0..2}; the interpreter prunes such paths but the
# clauses keep them, so only in-range bodies are compared exactly
LEAVING = ("x + 1", "x - 1", "x * 2")


def program_of(seed, cond):
    loop = random_loop(seed)
    hyp_assume(not any(t in loop.source() for t in LEAVING))
    return load(f"int main() {{\n int x;\n{loop.source()}\n assert({cond});\n return 0;\n}}")


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["x != 1", "x >= 0", "true", "x == 2"]),
       st.sampled_from(ENCODINGS))
def test_oracle_interpretation_satisfies_non_query_clauses(seed, cond, enc):
    p = program_of(seed, cond)
    sys_ = encode(p, enc)
    rep = crosscheck(p, sys_, Domain())
    for c, r in zip(sys_.clauses, rep.results):
        if not c.is_query:
            assert r.ok, (c.label, r.witness)
    # queries hold exactly when no error is reachable on the domain
    unsafe = any(k == "err" for _, outs in run_main(p, Domain()).main_outcomes for k, _ in outs)
    queries_ok = all(r.ok for c, r in zip(sys_.clauses, rep.results) if c.is_query)
    assert queries_ok == (not unsafe)
