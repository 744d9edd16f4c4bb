"""Plain-text ``key = value`` config files.

Blank lines and ``#`` comments are ignored. Values are converted to the type
of the matching dataclass field default, so a config file can only set keys
that the dataclass knows about.
"""
from __future__ import annotations

import dataclasses
from pathlib import Path

from .errors import IoError


def parse_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        out[key] = value
    return out


def read_kv(path) -> dict[str, str]:
    try:
        return parse_kv(Path(path).read_text())
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def _convert(raw: str, like):
    if isinstance(like, bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(like, int):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw


def coerce(cls, values: dict[str, str], strict: bool = True):
    """Build dataclass ``cls`` from string values, converting by field default.

    With ``strict`` unknown keys raise; otherwise they are ignored so one file
    can feed several config sections.
    """
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, raw in values.items():
        if key not in fields:
            if strict:
                raise KeyError(f"unknown config key {key!r} for {cls.__name__}")
            continue
        f = fields[key]
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        kwargs[key] = _convert(raw, default)
    return cls(**kwargs)


def format_kv(obj) -> str:
    lines = []
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
