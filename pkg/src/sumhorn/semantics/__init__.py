"""Finite-domain semantics: the reference oracle for the encodings."""

from .domain import (
    Broke, BudgetExceeded, Domain, Error, Outcome, PredSem, Regular, RelSem, State, StateSpace,
    base_name,
)
from .evaluate import DivByZero, ExprEval, SpecEval, Undefined, compile_formula, eval_expr, is_deterministic
from .interp import Interp, Unsupported, function_graph, run_main, stmt_vars
from .relations import (
    Condition, InvariantReport, Rel, SummaryReport, check_invariant, check_summary, holds_triple,
    i_star, loop_rel, r_star, space_for, step_rel, strongest_invariant, test_masks, triple_witness,
    witness_invariant,
)

eval = eval_expr  # noqa: A001
