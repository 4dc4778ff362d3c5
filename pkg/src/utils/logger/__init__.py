"""Async buffered logger, its configuration and file handlers."""
