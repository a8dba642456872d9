"""Random-program oracles and property suites."""
