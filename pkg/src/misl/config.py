"""Run configuration: a flat ``key = value`` file plus ``MISL_*`` environment overrides."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

ENV_PREFIX = "MISL_"

# config-file key -> RunConfig attribute
_KEYS = {
    "root": "root",
    "index_url": "index_url",
    "row_selector": "row_selector",
    "cell_selector": "cell_selector",
    "converter_cmd": "converter_cmd",
    "converter.timeout_s": "converter_timeout_s",
    "non_latin_threshold": "non_latin_threshold",
    "lookup": "lookup",
    "roster": "roster",
    "overrides": "overrides",
    "grammar": "grammar",
    "split_year": "split_year",
    "top_k": "top_k",
    "full_bench_size": "full_bench_size",
    "jobs": "jobs",
    "fetch.retries": "fetch_retries",
    "fetch.timeout_ms": "fetch_timeout_ms",
    "fetch.backoff_ms": "fetch_backoff_ms",
    "politeness_ms": "politeness_ms",
    "failure_threshold": "failure_threshold",
    "strict": "strict",
}


@dataclass
class RunConfig:
    root: Path = Path("corpus")
    index_url: str = ""
    row_selector: str = "tr"
    cell_selector: str = "td"
    converter_cmd: str = ""
    converter_timeout_s: float = 120.0
    non_latin_threshold: float = 0.5
    lookup: Path | None = None
    roster: Path | None = None
    overrides: Path | None = None
    grammar: Path | None = None
    split_year: int = 2009
    top_k: int = 10
    full_bench_size: int = 17
    jobs: int = 1
    fetch_retries: int = 3
    fetch_timeout_ms: int = 30000
    fetch_backoff_ms: int = 500
    politeness_ms: int = 0
    failure_threshold: float = 1.0
    strict: bool = False

    def validate(self):
        if self.split_year < 1947:
            raise ConfigError("split_year must be 1947 or later")
        if self.top_k < 1:
            raise ConfigError("top_k must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.full_bench_size < 1:
            raise ConfigError("full_bench_size must be at least 1")
        for name in ("lookup", "roster", "overrides", "grammar"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{name} file not found: {path}")
        return self


def _coerce(attr: str, value: str, base: Path | None):
    types = {f.name: f.type for f in fields(RunConfig)}
    kind = types[attr]
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off", ""):
                return False
            raise ValueError(value)
    except ValueError:
        raise ConfigError(f"{attr}: invalid value {value!r}") from None
    if kind.startswith("Path"):
        if not value:
            return None
        path = Path(value).expanduser()
        if base is not None and not path.is_absolute():
            path = base / path
        return path
    return value


def parse_config_text(text: str, base: Path | None = None) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown or malformed entry {line!r}")
        values[_KEYS[key]] = _coerce(_KEYS[key], value.strip(), base)
    return values


def load_config(path=None, env=None, **overrides) -> RunConfig:
    """Defaults, then the config file, then ``MISL_*`` variables, then ``overrides``.

    Relative paths in the file resolve against the file's directory.
    """
    env = os.environ if env is None else env
    values = {}
    if path is not None:
        path = Path(path)
        values.update(parse_config_text(path.read_text(encoding="utf-8"), path.parent))
    for key, attr in _KEYS.items():
        name = ENV_PREFIX + key.upper().replace(".", "_")
        if name in env:
            values[attr] = _coerce(attr, env[name], None)
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "root" in values and values["root"] is not None:
        values["root"] = Path(values["root"])
    return dataclasses.replace(RunConfig(), **values).validate()
