"""Horn-clause generation for the invariant, summary and combined encodings."""

from .clauses import Atom, ClauseSystem, HornClause, PredSym, make_clause
from .encode import ENCODINGS, Encoder, LoopInfo, encode, encode_combined, encode_inv, encode_sum, loop_scopes
from .symexec import Exit, Frame, Fresh, SymExec, SymState, Unsupported, body_cont, fun_cont
from .annot import annotations_to_constraints
