"""Hoare-style checking of annotated loops with specification statements."""

from .discharge import HoareReport, VCResult, discharge
from .vcs import (
    VC, MissingAnnot, NestedUnannotated, SpecStatement, Unsupported, VCGen, gen_summary_vcs, program_vcs,
    spec_post,
)
