"""Loop verification with invariants and summaries via Horn clauses."""

__version__ = "0.1.0"
