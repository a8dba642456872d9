"""Translations between loop invariants and loop summaries."""

from .semantic import frame_matrix, lift_semantic, lower_semantic, pred_of_formula, rel_of_formula
from .syntactic import LoopSpec, collapse_shape, lift, loop_spec, lower, one_point
from .agree import Agreement, annotated_loops, lift_agreement, lower_agreement, program_agreement
