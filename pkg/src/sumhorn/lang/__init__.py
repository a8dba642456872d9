"""Surface language: AST, parser, static checks, substitution, printing."""

from .ast import *  # noqa: F401,F403
from .check import AnnotError, CheckError, ScopeError, TypeCheckError, check, check_formula, loop_mods, mod_set
from .parser import ParseError, parse, parse_expr, parse_stmt
from .pretty import pretty
from .subst import UnboundSubstitution, free_vars, old_vars, simplify, substitute


def load(source: str):
    """Parse and check in one step."""
    return check(parse(source))
