"""Exact-arithmetic cut-set bound generation and rate-region tooling."""

__version__ = "0.1.0"
