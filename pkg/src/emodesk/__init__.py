"""Desk-scale multi-modal emotion expression trainer."""

__version__ = "0.1.0"
