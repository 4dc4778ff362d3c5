"""Rotating run-log and error-log file handlers."""
