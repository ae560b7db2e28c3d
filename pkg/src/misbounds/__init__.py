"""Weighted second-moment bounds for maximum independent sets in sparse random graphs."""

__version__ = "0.1.0"
