"""Synthesis of pre-defined block networks onto programmable blocks."""

__version__ = "0.1.0"
