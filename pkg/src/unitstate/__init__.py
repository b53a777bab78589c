"""Invariant states induced by units on finitely presented cancellative hoops."""

__version__ = "0.1.0"
