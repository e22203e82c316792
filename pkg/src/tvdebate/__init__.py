"""Bias and incivility analytics for televised debate videos."""

__version__ = "0.1.0"
