"""One-query hidden subgroup algorithms on small finite abelian groups, simulated exactly."""

__version__ = "0.1.0"
