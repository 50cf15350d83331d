"""Numerical core: signals, embedding, states, Markov estimation and modal analysis."""

__all__ = ["signals", "embedding", "states", "markov", "modal"]
