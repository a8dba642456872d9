import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sumhorn import corpus
from sumhorn.lang import load, parse_expr, parse_stmt
from sumhorn.lang.ast import INT
from sumhorn.semantics import BudgetExceeded, Domain, Error, Regular, StateSpace, eval_expr, step_rel
from sumhorn.semantics.relations import (
    Rel, check_invariant, check_summary, holds_triple, i_star, loop_rel, r_star, strongest_invariant,
)

D = Domain()
X = StateSpace([("x", INT)], D)


def pred(*xs):
    return np.array([i in xs for i in range(X.size)])


def reg_pairs(rel):
    return {(s["x"], o.state["x"]) for s, o in rel.pairs() if isinstance(o, Regular)}


def countdown():
    return parse_expr("x != 0"), step_rel(parse_stmt("x = x - 1;"), D, X)


def break_loop():
    return parse_expr("x != 0"), step_rel(parse_stmt("{ if (x == 1) break; x = x - 2; }"), D, X)


# -- expressions -----------------------------------------------------------------

def test_eval_arith():
    assert eval_expr(parse_expr("x - y"), {"x": 5, "y": 3}, Domain(hi=5)) == {2}


def test_eval_nondet_is_whole_range():
    assert eval_expr(parse_expr("nondet()"), {}, D) == {0, 1, 2}


def test_eval_spec_function():
    prog = load(corpus.source("euclid"))
    assert eval_expr(parse_expr("gcd(4, 6)"), {}, Domain(hi=6), prog) == {2}


def test_euclidean_division():
    assert eval_expr(parse_expr("(0 - 7) / 2"), {}, Domain(lo=-8, hi=8)) == {-4}
    assert eval_expr(parse_expr("(0 - 7) % 2"), {}, Domain(lo=-8, hi=8)) == {1}


# -- step and loop relations ------------------------------------------------------

def test_assert_false_errs_everywhere():
    r = step_rel(parse_stmt("assert(false);"), D, X)
    assert list(r.err) == [1, 1, 1]
    assert [(s["x"], o) for s, o in r.pairs()] == [(0, Error), (1, Error), (2, Error)]


def test_assume_false_is_empty():
    r = step_rel(parse_stmt("assume(false);"), D, X)
    assert not r.has_error()
    assert list(r.pairs()) == []


def test_euclid_body_relation():
    dom = Domain(lo=1, hi=3)
    sp = StateSpace([("x", INT), ("y", INT)], dom)
    r = step_rel(parse_stmt("if (x > y) x -= y; else y -= x;"), dom, sp)
    assert sp.size == 9
    pairs = {(s["x"], s["y"], o.state["x"], o.state["y"]) for s, o in r.pairs()}
    assert (3, 1, 2, 1) in pairs
    # x == y takes the else branch to y == 0, outside the domain
    assert not any(a == b for a, b, _, _ in pairs)


def test_loop_rel_false_test_is_identity():
    _, body = countdown()
    L = loop_rel(False, body)
    assert reg_pairs(L) == {(0, 0), (1, 1), (2, 2)}


def test_loop_rel_countdown():
    t, body = countdown()
    assert reg_pairs(loop_rel(t, body)) == {(0, 0), (1, 0), (2, 0)}


def test_loop_rel_break():
    t, body = break_loop()
    L = loop_rel(t, body)
    assert reg_pairs(L) == {(0, 0), (1, 1), (2, 0)}
    assert not L.has_break()


def test_holds_triple():
    t, body = countdown()
    L = loop_rel(t, body)
    assert holds_triple(pred(), L, pred())
    assert holds_triple(pred(2), L, pred(0))
    assert not holds_triple(pred(2), L, pred(1))


def test_check_invariant_full_domain():
    t, body = countdown()
    rep = check_invariant(pred(0, 1, 2), pred(2), pred(0), t, body)
    assert rep.inductive and rep.safe and rep.correct


def test_check_invariant_empty_fails_init():
    t, body = countdown()
    rep = check_invariant(pred(), pred(2), pred(0), t, body)
    assert not rep.conditions["init"].ok
    assert rep.conditions["init"].witness["x"] == 2


def test_check_invariant_euclid():
    dom = Domain(lo=1, hi=3)
    sp = StateSpace([("x", INT), ("y", INT)], dom)
    body = step_rel(parse_stmt("if (x > y) x -= y; else y -= x;"), dom, sp)
    env = [sp.env(i) for i in range(sp.size)]
    gcd = {(1, 1): 1, (1, 2): 1, (1, 3): 1, (2, 1): 1, (2, 2): 2, (2, 3): 1, (3, 1): 1, (3, 2): 1, (3, 3): 3}
    I = np.array([gcd[(e["x"], e["y"])] == 1 for e in env])
    P = np.array([(e["x"], e["y"]) == (2, 3) for e in env])
    Q = np.array([e["x"] == 1 for e in env])
    assert check_invariant(I, P, Q, parse_expr("x != y"), body).correct


def test_check_summary_canonical_and_weakest():
    t, body = countdown()
    L = loop_rel(t, body)
    R = L.regular()
    for P, Q, valid in ((pred(2), pred(0), True), (pred(2), pred(1), False)):
        rep = check_summary(R, P, Q, t, body)
        assert rep.summary
        assert rep.correct == valid == holds_triple(P, L, Q)
    full = np.ones((3, 3), dtype=bool)
    assert check_summary(full, pred(2), pred(0, 1, 2), t, body).correct
    assert not check_summary(full, pred(2), pred(0), t, body).correct
    assert check_summary(full, pred(), pred(0), t, body).correct


def test_check_summary_countdown_to_zero():
    t, body = countdown()
    R = np.array([[j == 0 for j in range(3)] for _ in range(3)])
    assert check_summary(R, pred(2), pred(0), t, body).correct


def test_strongest_invariant():
    t, body = countdown()
    assert list(strongest_invariant(pred(), t, body)) == [False] * 3
    assert list(strongest_invariant(pred(2), t, body)) == [True] * 3
    assert list(strongest_invariant(pred(1), False, body)) == list(pred(1))


def test_i_star_and_r_star():
    t, body = countdown()
    expected = np.array([[j == 0 for j in range(3)] for _ in range(3)])
    assert (i_star(t, body) == expected).all()
    assert (r_star(t, body) == expected).all()
    assert (i_star(False, body) == np.eye(3, dtype=bool)).all()
    assert (r_star(False, body) == np.eye(3, dtype=bool)).all()
    erring = step_rel(parse_stmt("assert(false);"), D, X)
    assert not i_star(True, erring).any()


def test_r_star_break_example_differs_from_loop_relation():
    # the literal break rule misses (1, 1); the regular part of the loop relation has it
    t, body = break_loop()
    Rs = r_star(t, body)
    reg = loop_rel(t, body).regular()
    assert reg[1, 1] and not Rs[1, 1]


def test_budget():
    with pytest.raises(BudgetExceeded):
        StateSpace([("x", INT), ("y", INT)], Domain(budget=8))


# -- loop relation against a reference fixpoint ----------------------------------

def reference_loop(n, tt, ff, reg, brk, err):
    """Outcomes by direct iteration: 'err', ('reg', j)."""
    out = []
    for s in range(n):
        res, seen, todo = set(), {s}, [s]
        while todo:
            u = todo.pop()
            if ff[u]:
                res.add(("reg", u))
            if tt[u]:
                if err[u]:
                    res.add("err")
                for j in brk[u]:
                    res.add(("reg", j))
                for j in reg[u]:
                    if j not in seen:
                        seen.add(j)
                        todo.append(j)
        out.append(res)
    return out


@st.composite
def bodies(draw):
    n = draw(st.integers(1, 5))
    subsets = st.sets(st.integers(0, n - 1), max_size=n)
    reg = [draw(subsets) for _ in range(n)]
    brk = [draw(subsets) for _ in range(n)]
    err = [draw(st.booleans()) for _ in range(n)]
    tt = [draw(st.booleans()) for _ in range(n)]
    ff = [draw(st.booleans()) for _ in range(n)]
    return n, tt, ff, reg, brk, err


@settings(max_examples=300, deadline=None)
@given(bodies())
def test_loop_rel_matches_reference(case):
    n, tt, ff, reg, brk, err = case
    sp = StateSpace([("x", INT)], Domain(lo=0, hi=n - 1))
    body = Rel.from_sets(sp, reg, brk, np.array(err, dtype=np.uint8))
    L = loop_rel((np.array(tt), np.array(ff)), body)
    ref = reference_loop(n, tt, ff, reg, brk, err)
    for s in range(n):
        got = {("reg", int(j)) for j in L.reg_of(s)}
        if L.err[s]:
            got.add("err")
        assert got == ref[s]


@settings(max_examples=200, deadline=None)
@given(bodies(), st.data())
def test_strongest_invariant_is_correct_for_valid_triples(case, data):
    n, tt, ff, reg, brk, err = case
    sp = StateSpace([("x", INT)], Domain(lo=0, hi=n - 1))
    body = Rel.from_sets(sp, reg, brk, np.array(err, dtype=np.uint8))
    t = (np.array(tt), np.array(ff))
    P = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)))
    Q = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)))
    L = loop_rel(t, body)
    if holds_triple(P, L, Q):
        assert check_invariant(strongest_invariant(P, t, body), P, Q, t, body).correct
        assert check_summary(L.regular(), P, Q, t, body).correct
