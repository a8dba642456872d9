import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sumhorn import corpus
from sumhorn.bridge import (
    LoopSpec, collapse_shape, frame_matrix, lift, lift_semantic, loop_spec, lower, lower_semantic, one_point,
    pred_of_formula, program_agreement, rel_of_formula,
)
from sumhorn.chc.solver import executable, validity
from sumhorn.lang import AnnotError, load, parse_expr
from sumhorn.lang.ast import INT, Quant, conj, implies
from sumhorn.lang.pretty import pp_expr
from sumhorn.semantics import Domain, StateSpace


def euclid():
    return load(corpus.source("euclid"))


# -- syntactic ---------------------------------------------------------------------

def test_loop_spec_splits_scope():
    s = loop_spec(euclid())
    assert s.mod_names == ["x", "y"]
    assert [n for n, _ in s.ro] == ["x0", "y0"]
    assert pp_expr(s.J) == "x > 0 && y > 0 && gcd(x, y) == gcd(x0, y0)"


def test_loop_spec_index_out_of_range():
    with pytest.raises(IndexError):
        loop_spec(euclid(), 1)


def test_summary_old_of_read_only_rejected():
    with pytest.raises(AnnotError):
        LoopSpec(R=parse_expr("x == old(n)"), mods=(("x", INT),), ro=(("n", INT),))


def test_collapse_shape():
    shape = collapse_shape(parse_expr("x == gcd(old(x), old(y))"), ["x", "y"])
    assert {k: pp_expr(v) for k, v in shape.items()} == {"x": "gcd(old(x), old(y))"}
    assert collapse_shape(parse_expr("x >= old(x)"), ["x"]) is None
    assert collapse_shape(parse_expr("x == y"), ["x", "y"]) is None


def test_one_point_drops_equations():
    bound, body = one_point([("a", INT)], parse_expr("a == x + 1 && a > 0"))
    assert bound == []
    assert pp_expr(body) == "x + 1 > 0"


def test_lift_euclid_under_true():
    I = lift(loop_spec(euclid()))
    assert pp_expr(I).startswith("x > 0 && y > 0 && gcd(x, y) == gcd(x0, y0) && (exists")


def test_lift_euclid_entry_has_no_quantifier():
    pre = parse_expr("x == x0 && y == y0 && x0 > 0 && y0 > 0")
    I = lift(loop_spec(euclid(), pre=pre, inv=parse_expr("x > 0 && y > 0")))
    assert pp_expr(I) == "x > 0 && y > 0 && (x0 > 0 && (y0 > 0 && gcd(x, y) == gcd(x0, y0)))"


@pytest.mark.skipif(executable("z3") is None, reason="z3 not installed")
def test_lift_euclid_matches_hand_invariant():
    pre = parse_expr("x == x0 && y == y0 && x0 > 0 && y0 > 0")
    I = lift(loop_spec(euclid(), pre=pre, inv=parse_expr("x > 0 && y > 0")))
    T = parse_expr("gcd(x, y) == gcd(x0, y0) && x > 0 && y > 0")
    # equivalent under the entry assumptions; gcd(x0, y0) is unconstrained without them
    H = parse_expr("x0 > 0 && y0 > 0")
    consts = tuple((n, INT) for n in ("x", "y", "x0", "y0"))
    r = validity(implies(H, conj([implies(I, T), implies(T, I)])), consts, euclid().spec_funs, timeout=60)
    assert r.status == "valid"


def test_lift_keeps_universal_for_relational_summary():
    spec = LoopSpec(R=parse_expr("x >= old(x)"), mods=(("x", INT),))
    I = lift(spec)
    assert isinstance(I, Quant) and I.kind == "exists"
    assert "forall" in pp_expr(I)


def test_lift_of_trivial_summary_is_invariant():
    spec = LoopSpec(J=parse_expr("x >= 0"), mods=(("x", INT),))
    assert pp_expr(lift(spec)) == "x >= 0"


def test_lower_is_canonical_summary():
    spec = loop_spec(euclid(), post=parse_expr("x == gcd(x0, y0)"))
    assert pp_expr(lower(spec)) == \
        "old(x) > 0 && old(y) > 0 && gcd(old(x), old(y)) == gcd(x0, y0) ==> x == gcd(x0, y0)"


# -- semantic ----------------------------------------------------------------------

X = StateSpace([("x", INT)], Domain())


def test_pred_and_rel_of_formula():
    assert list(pred_of_formula(X, parse_expr("x > 0"))) == [False, True, True]
    R = rel_of_formula(X, parse_expr("x == old(x) + 1"))
    assert [tuple(map(int, np.flatnonzero(r))) for r in R] == [(1,), (2,), ()]


def test_undefined_terms_are_false():
    assert list(pred_of_formula(X, parse_expr("1 / x == 1"))) == [False, True, False]


def test_frame_matrix():
    sp = StateSpace([("x", INT), ("n", INT)], Domain(lo=0, hi=1))
    fr = frame_matrix(sp, ["n"])
    for i in range(sp.size):
        for j in range(sp.size):
            assert fr[i, j] == (sp.env(i)["n"] == sp.env(j)["n"])


def test_lift_semantic_countdown():
    # R sends everything to 0: every state shares its successors with the entry state
    R = np.array([[j == 0 for j in range(3)] for _ in range(3)])
    P = np.array([False, False, True])
    J = np.ones(3, dtype=bool)
    assert list(lift_semantic(P, J, R)) == [True, True, True]
    assert not lift_semantic(np.zeros(3, dtype=bool), J, R).any()


def test_lift_semantic_identity_summary_is_precondition():
    P = np.array([True, False, True])
    J = np.ones(3, dtype=bool)
    assert list(lift_semantic(P, J, np.eye(3, dtype=bool))) == list(P)


def test_lower_semantic():
    L = lower_semantic(np.array([True, False]), np.array([False, True]))
    assert L.tolist() == [[False, True], [True, True]]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.data())
def test_lift_semantic_contains_entry_and_stays_in_invariant(n, data):
    vec = st.lists(st.booleans(), min_size=n, max_size=n)
    P, J = np.array(data.draw(vec)), np.array(data.draw(vec))
    R = np.array([data.draw(vec) for _ in range(n)])
    I = lift_semantic(P, J, R)
    assert not (I & ~J).any()
    assert not (P & J & ~I).any()


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.data())
def test_lower_semantic_is_weakest(n, data):
    vec = st.lists(st.booleans(), min_size=n, max_size=n)
    I, Q = np.array(data.draw(vec)), np.array(data.draw(vec))
    L = lower_semantic(I, Q)
    # a pair leaves L only when its start satisfies I and its end misses Q
    assert (~L == (I[:, None] & ~Q[None, :])).all()


# -- agreement on the corpus -------------------------------------------------------

def test_euclid_agreement():
    rows = program_agreement(euclid(), Domain(lo=0, hi=3), "euclid")
    assert len(rows) == 3
    assert all(a.agree for a in rows), [a.line() for a in rows]
    assert rows[0].line().startswith("ok")


@pytest.mark.parametrize("name", ["countdown", "break_exit", "two_counters", "mod_two"])
def test_corpus_agreement(name):
    rows = program_agreement(load(corpus.source(name)), Domain(), name)
    assert rows and all(a.agree for a in rows), [a.line() for a in rows]
