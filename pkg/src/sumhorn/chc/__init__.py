"""SMT-LIB emission, solver backends, models and their validation."""
