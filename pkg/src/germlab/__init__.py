"""Numerical experiments on the metric geometry of set-germs at the origin."""

__version__ = "0.1.0"
