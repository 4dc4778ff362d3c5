"""Errors, logging, metrics writing and small timing and serialisation helpers."""
