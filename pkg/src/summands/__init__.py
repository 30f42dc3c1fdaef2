"""Indecomposable summand series for finite group actions on polynomial rings."""

__version__ = "0.1.0"
