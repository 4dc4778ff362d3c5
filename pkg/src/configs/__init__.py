"""Configuration loading: environment overrides and the flat YAML run config."""
