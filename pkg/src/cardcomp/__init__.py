"""Exact tools for comparing ordinal and cardinal online algorithms."""
__version__ = "0.1.0"
