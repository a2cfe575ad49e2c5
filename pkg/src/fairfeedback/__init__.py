"""Equilibrium classification with endogenous behavior: statistics, fairness audits and verification."""

__version__ = "0.1.0"
