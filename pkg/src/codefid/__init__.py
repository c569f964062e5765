"""Optimal one-shot channel fidelities for non-signalling and PPT-preserving codes."""

__version__ = "0.1.0"
