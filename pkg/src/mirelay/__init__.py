"""Coupled-resonant-circuit models and achievable-rate optimization for
actively relayed magnetic-induction links."""

__version__ = "0.1.0"
