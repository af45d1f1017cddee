"""Budgeted external influence on voter-type opinion dynamics over networks."""

__version__ = "0.1.0"
