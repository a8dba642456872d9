import pytest

from sumhorn import corpus
from sumhorn.chc.solver import executable
from sumhorn.hoare import (
    MissingAnnot, NestedUnannotated, SpecStatement, Unsupported, discharge, gen_summary_vcs, program_vcs, spec_post,
)
from sumhorn.hoare.vcs import fresh_name
from sumhorn.lang import load, loops_of, parse_expr, parse_stmt
from sumhorn.lang.pretty import pp_expr

needs_z3 = pytest.mark.skipif(executable("z3") is None, reason="z3 not installed")

# Euclid with the plain positivity invariant; the summary carries the gcd
EUCLID = corpus.source("euclid").replace(
    "invariant x > 0 && y > 0 && gcd(x, y) == gcd(x0, y0);", "invariant x > 0 && y > 0;")
EUCLID_MUTANT = EUCLID.replace("gcd(old(x), old(y))", "gcd(old(x), old(x))")


def loop(src):
    return loops_of(parse_stmt(src))[0]


def prove(src, **kw):
    p = load(src)
    return discharge(program_vcs(p), spec_funs=p.spec_funs, **kw)


# -- spec statements ---------------------------------------------------------------

def test_spec_post_renames_old():
    st = SpecStatement(("x",), parse_expr("x > 0"), parse_expr("x == old(x) + 1"))
    post, hyp, binding = spec_post(st)
    assert binding == {"x": "x0"}
    assert pp_expr(post) == "x == x0 + 1"
    assert pp_expr(hyp) == "x0 > 0"


def test_spec_post_avoids_clashes():
    st = SpecStatement(("x",), parse_expr("x0 > 0"), parse_expr("x == old(x)"))
    _, _, binding = spec_post(st, {"x0_1"})
    assert binding == {"x": "x0_2"}


def test_fresh_name():
    assert fresh_name("y", set()) == "y0"
    assert fresh_name("y", {"y0"}) == "y0_1"


def test_spec_statement_rejects_old_of_unmodified():
    with pytest.raises(ValueError):
        SpecStatement(("x",), post=parse_expr("x == old(n)"))


# -- generation --------------------------------------------------------------------

def test_euclid_vc_shape():
    vcs = program_vcs(load(EUCLID))
    assert [v.name for v in vcs] == [
        "loop1:exit", "loop1:path1:inv", "loop1:path1:sum", "loop1:path2:inv", "loop1:path2:sum",
        "loop1:entry", "main:assert@22",
    ]
    assert [v.group for v in vcs] == ["2", "3", "3", "3", "3", "1", "assert"]


def test_every_vc_has_its_own_minted_names():
    vcs = program_vcs(load(EUCLID))
    minted = [{n for n, _ in v.consts() if "!" in n} for v in vcs]
    for i, a in enumerate(minted):
        for b in minted[i + 1:]:
            assert not a & b


def test_countdown_loop_vcs():
    w = loop("while (x > 0) invariant x >= 0; summary x == 0; { x = x - 1; }")
    vcs = gen_summary_vcs(w, parse_expr("x >= 0"), parse_expr("x == 0"))
    assert str(vcs[0]) == "[loop1:exit] x >= 0 && !(x > 0) ==> x == 0"
    assert str(vcs[1]) == "[loop1:path1:inv] x >= 0 && x > 0 ==> x - 1 >= 0"
    assert [v.premise for v in vcs] == ["exit", "inv", "sum", "entry", "use"]


def test_false_test_has_no_body_premise():
    w = loop("while (false) invariant x >= 0; summary x == old(x); { x = x - 1; }")
    vcs = gen_summary_vcs(w)
    assert [v.premise for v in vcs] == ["exit", "entry", "use"]
    assert str(vcs[0]) == "[loop1:exit] x >= 0 && true ==> x == x"


def test_trailing_command_replaces_skip():
    w = loop("while (x > 0) invariant x >= 0; summary x == 1; { x = x - 1; }")
    vcs = gen_summary_vcs(w, trailing=parse_stmt("x = x + 1;"))
    assert str(vcs[0]) == "[loop1:exit] x >= 0 && !(x > 0) ==> x + 1 == 1"


def test_nondet_becomes_fresh_constant():
    vcs = program_vcs(load("int main() { int x = nondet(); assert(x == x); return 0; }"))
    assert len(vcs) == 1 and "nd!" in pp_expr(vcs[0].goal)


def test_missing_annotation():
    with pytest.raises(MissingAnnot):
        program_vcs(load("int main() { int x; while (x > 0) invariant x >= 0; { x = x - 1; } return 0; }"))


def test_nested_unannotated():
    src = """int main() { int x; int y;
      while (x > 0) invariant true; summary true; { y = x; while (y > 0) { y = y - 1; } x = x - 1; }
      return 0; }"""
    with pytest.raises(NestedUnannotated):
        program_vcs(load(src))


def test_break_unsupported():
    with pytest.raises(Unsupported):
        program_vcs(load(corpus.source("break_exit")))


# -- discharge ---------------------------------------------------------------------

@needs_z3
def test_euclid_all_valid():
    rep = prove(EUCLID, timeout=30)
    assert rep.ok and len(rep.results) == 7
    assert rep.elapsed < 30
    assert rep.by_group() == {
        "1": {"valid": 1, "invalid": 0, "undecided": 0},
        "2": {"valid": 1, "invalid": 0, "undecided": 0},
        "3": {"valid": 4, "invalid": 0, "undecided": 0},
        "assert": {"valid": 1, "invalid": 0, "undecided": 0},
    }


@needs_z3
def test_mutated_summary_has_counterexample():
    rep = prove(EUCLID_MUTANT, timeout=30)
    bad = {r.name: r.witness for r in rep.invalid}
    w = bad["loop1:path1:sum"]
    # the first branch runs with x > y > 0
    assert w["x"] > w["y"] > 0
    assert any("x=2" in l and "invalid" in l for l in rep.lines())


@needs_z3
def test_corpus_invariant_also_discharges():
    assert prove(corpus.source("euclid"), timeout=30).ok


@needs_z3
def test_trivial_vcs():
    rep = prove("int main() { int x; assume(x > 0); assert(x >= 1); assert(x > 5); return 0; }", timeout=10)
    assert [r.status for r in rep.results] == ["valid", "invalid"]
    [(name, x)] = rep.results[1].witness.items()
    assert name.startswith("x!") and x <= 5


def test_horn_backend_leaves_vcs_undecided():
    p = load(EUCLID)
    rep = discharge(program_vcs(p), backend="eldarica", spec_funs=p.spec_funs)
    assert {r.status for r in rep.results} == {"undecided"}
    assert not rep.ok and not rep.invalid
