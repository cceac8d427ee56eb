"""Flat ``key = value`` configuration files.

Blank lines and ``#`` comments are ignored. Vector values are written as
``x, y``. Keys are the field names of :class:`SimConfig`, :class:`ArenaSpec`
and the run settings below; command-line flags override whatever a file sets.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .engine import SimConfig
from .geometry import Vec2
from .world import ArenaSpec, ConfigError, Policy

RUN_KEYS = {"policy", "human_choice", "replications", "seed", "correct_button"}


@dataclass
class Settings:
    arena: ArenaSpec = field(default_factory=ArenaSpec)
    sim: SimConfig = field(default_factory=SimConfig)
    run: dict[str, str] = field(default_factory=dict)


def _field_types(cls) -> dict[str, Any]:
    return {f.name: f.default for f in dataclasses.fields(cls)}


def _coerce(key: str, raw: str, like: Any) -> Any:
    try:
        if isinstance(like, Vec2):
            x, y = (float(p) for p in raw.split(","))
            return Vec2(x, y)
        if isinstance(like, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def parse_config(text: str, source: str = "<config>") -> Settings:
    arena_fields = _field_types(ArenaSpec)
    sim_fields = _field_types(SimConfig)
    arena_kw: dict[str, Any] = {}
    sim_kw: dict[str, Any] = {}
    run: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in arena_fields:
            arena_kw[key] = _coerce(key, raw, arena_fields[key])
        elif key in sim_fields:
            sim_kw[key] = _coerce(key, raw, sim_fields[key])
        elif key in RUN_KEYS:
            run[key] = raw
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
    if "policy" in run:
        Policy.parse(run["policy"])
    try:
        return Settings(ArenaSpec(**arena_kw), SimConfig(**sim_kw), run)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path: Optional[str | Path]) -> Settings:
    if path is None:
        return Settings()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
