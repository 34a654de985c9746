"""Flat key=value configuration files with CLI-flag override precedence."""

from __future__ import annotations

from .errors import ConfigurationError


def load_config(path) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment; blank lines ignored."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{line_no}: expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def overlay(defaults: dict, file_values: dict[str, str], cli_values: dict) -> dict:
    """defaults < config file < explicit CLI flags (None means unset)."""
    merged = dict(defaults)
    for key, value in file_values.items():
        if key not in merged:
            raise ConfigurationError(f"unknown config key {key!r}")
        merged[key] = _coerce_like(merged[key], value, key)
    for key, value in cli_values.items():
        if value is not None:
            merged[key] = value
    return merged


def _coerce_like(template, raw: str, key: str):
    try:
        if isinstance(template, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"config key {key!r}: {exc}") from exc
    return raw
