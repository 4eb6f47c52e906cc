"""Exact finite computations around derived Quot schemes."""

__version__ = "0.1.0"
