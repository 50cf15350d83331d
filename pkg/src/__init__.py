"""Markov Delay Space - Markov models of dynamical systems in a dimensionless delay space."""

__version__ = "0.1.0"
