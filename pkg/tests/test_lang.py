import pytest
from hypothesis import given, settings, strategies as st

from sumhorn import corpus
from sumhorn.lang import (
    AnnotError, CheckError, ParseError, ScopeError, TypeCheckError, load, loop_mods, loops_of, mod_set, parse,
    parse_expr, parse_stmt, simplify, substitute,
)
from sumhorn.lang.ast import (
    FALSE, TRUE, Assert, Assume, Binary, BoolLit, IntLit, Old, Unary, Var, While, conj, walk_stmts,
)
from sumhorn.lang.pretty import pp_expr, pp_program
from sumhorn.lang.subst import free_vars, old_vars


def count(prog, cls):
    return sum(isinstance(s, cls) for f in prog.funs for s in walk_stmts(f.body))


def test_parse_euclid_shape():
    p = parse(corpus.source("euclid"))
    assert len(p.funs) == 1
    assert count(p, While) == 1
    assert count(p, Assume) == 2
    assert count(p, Assert) == 1
    assert [f.name for f in p.spec_funs] == ["gcd"]


def test_minimal_program():
    p = load("int main() { return 0; }")
    assert len(p.funs) == 1
    assert count(p, While) == 0


def test_break_outside_loop_rejected_at_check():
    src = "int main() { break; }"
    parse(src)
    with pytest.raises(ScopeError):
        load(src)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as ei:
        parse("int main() { x = ; }")
    assert "1:" in str(ei.value)


def test_old_of_unmodified_variable_rejected():
    src = "int main() { int n; while (n > 0) summary old(n) == n; { } return 0; }"
    with pytest.raises(AnnotError):
        load(src)


def test_division_by_literal_zero_in_invariant_rejected():
    src = "int main() { int x; while (x > 0) invariant 1/0 == 1; { x = x - 1; } return 0; }"
    with pytest.raises(TypeCheckError):
        load(src)


def test_check_errors_share_a_base():
    assert issubclass(AnnotError, CheckError) and issubclass(ScopeError, CheckError)


def test_mod_set_euclid_body():
    w = loops_of(load(corpus.source("euclid")).main.body)[0]
    assert mod_set(w.body) == {"x", "y"}
    assert loop_mods(w) == {"x", "y"}


def test_mod_set_empty_cases():
    assert mod_set(parse_stmt("assert(x > 0);")) == set()
    assert mod_set(parse_stmt("while (b) { }")) == set()


def test_mod_set_array_copy():
    assert mod_set(parse_stmt("while (i < n) { b[i] = a[i]; i++; }")) == {"b", "i"}


def test_substitute_old_to_initial():
    e = parse_expr("x == gcd(old(x), old(y))")
    out = substitute(e, {}, {"x": Var("x0"), "y": Var("y0")})
    assert pp_expr(out) == "x == gcd(x0, y0)"


def test_substitute_roles_are_disjoint():
    e = parse_expr("old(x) + x")
    assert pp_expr(substitute(e, {"x": IntLit(0)}, {"x": IntLit(1)})) == "1 + 0"


def test_substitute_identity():
    e = parse_expr("forall int k :: 0 <= k && k < n ==> a[k] == old(x)")
    assert substitute(e) == e
    assert substitute(e, {"n": Var("n")}) == e


def test_substitute_avoids_capture():
    e = parse_expr("exists int k :: k == n")
    out = substitute(e, {"n": Var("k")})
    assert "k" in free_vars(out)


def test_free_and_old_vars():
    e = parse_expr("x == gcd(old(x), old(y)) && z > 0")
    assert free_vars(e) == {"x", "z"}
    assert old_vars(e) == {"x", "y"}


def test_simplify_constants():
    assert simplify(parse_expr("true && x > 0")) == parse_expr("x > 0")
    assert simplify(parse_expr("false ==> x > 0")) == TRUE
    assert simplify(conj([TRUE, FALSE])) == FALSE


@pytest.mark.parametrize("name", corpus.names())
def test_corpus_roundtrips_through_printer(name):
    p = load(corpus.source(name))
    assert load(pp_program(p)) == p


# -- properties ------------------------------------------------------------------

_names = st.sampled_from(["x", "y", "n"])
_atoms = st.one_of(st.builds(Var, _names), st.builds(IntLit, st.integers(0, 5)))


def _int_terms():
    return st.recursive(
        _atoms,
        lambda t: st.one_of(
            st.builds(Binary, st.sampled_from(["+", "-", "*"]), t, t),
            # the parser folds minus on a literal into the literal
            st.builds(Unary, st.just("-"), t).filter(lambda u: not isinstance(u.arg, IntLit)),
            st.builds(Old, _names),
        ),
        max_leaves=8,
    )


def _formulas():
    cmp = st.builds(Binary, st.sampled_from(["==", "!=", "<", "<=", ">", ">="]), _int_terms(), _int_terms())
    return st.recursive(
        st.one_of(cmp, st.builds(BoolLit, st.booleans())),
        lambda f: st.one_of(
            st.builds(Binary, st.sampled_from(["&&", "||", "==>"]), f, f),
            st.builds(Unary, st.just("!"), f),
        ),
        max_leaves=6,
    )


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_printed_formulas_reparse(e):
    assert parse_expr(pp_expr(e)) == e


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_identity_substitution_is_identity(e):
    ident = {n: Var(n) for n in free_vars(e)}
    assert substitute(e, ident) == e


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_eliminating_old_removes_it(e):
    out = substitute(e, {}, {n: Var(n + "0") for n in old_vars(e)})
    assert old_vars(out) == set()
