"""Exact and numeric workbench for exceptional Stewart-Gough platforms.

The package discovers movable six-leg platforms over small finite fields,
constructs families of motion curves exactly, reconstructs their defining
rational invariants from multi-prime data, realizes a real instance and
traces its motion numerically.
"""

__version__ = "0.1.0"
