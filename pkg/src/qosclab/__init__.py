"""Numerical verification of q-oscillator L-operators and Baxter Q-operators."""

__version__ = "0.1.0"
