"""Exact certificates for ball covering geometry in dimensions 2 to 5."""

__version__ = "0.1.0"
