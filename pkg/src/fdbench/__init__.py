"""Functional-data classification toolbox and benchmark harness."""

__version__ = "0.1.0"
