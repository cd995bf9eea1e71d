"""Analysis configuration read from an INI-style key-value file.

Example::

    [grid]
    size = 1024

    [estimator]
    method = multitaper
    taper_bandwidth_product = 4
    taper_count = 7

    [factorization]
    tol = 1e-9

    [analysis]
    lags = 1, 2, 4
    threshold = 0.01

    [groups]
    y_to_x = x <- y
    x_to_y = y <- x

A group line reads ``targets <- sources`` (or ``sources -> targets``), each
side a comma-separated list of channel names. Without a ``[groups]`` section
every ordered pair of channels is evaluated.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .causality import DEFAULT_THRESHOLD
from .core import FrequencyGrid
from .errors import InputError, InvalidConfigError
from .estimation import EstimatorConfig
from .matrix_factor import FactorizationConfig

__all__ = ["GroupDefinition", "AnalysisConfig", "load_config", "parse_config", "parse_group"]


@dataclass(frozen=True)
class GroupDefinition:
    name: str
    targets: tuple[str, ...]
    sources: tuple[str, ...]


@dataclass(frozen=True)
class AnalysisConfig:
    grid_size: int = 1024
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    factorization: FactorizationConfig = field(default_factory=FactorizationConfig)
    lags: tuple[int, ...] = (1,)
    threshold: float = DEFAULT_THRESHOLD
    groups: tuple[GroupDefinition, ...] = ()

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.grid_size)


def _names(text: str) -> tuple[str, ...]:
    return tuple(n.strip() for n in text.split(",") if n.strip())


def parse_group(name: str, text: str) -> GroupDefinition:
    if "<-" in text:
        left, right = text.split("<-", 1)
        targets, sources = _names(left), _names(right)
    elif "->" in text:
        left, right = text.split("->", 1)
        sources, targets = _names(left), _names(right)
    else:
        raise InvalidConfigError(f"group {name!r}: expected 'targets <- sources', got {text!r}")
    if not targets or not sources:
        raise InvalidConfigError(f"group {name!r}: both sides need at least one channel")
    return GroupDefinition(name, targets, sources)


def _optional_int(value: str):
    value = value.strip()
    return None if value.lower() in ("", "none", "auto") else int(value)


def _section_kwargs(parser: configparser.ConfigParser, section: str, cls) -> dict:
    if not parser.has_section(section):
        return {}
    known = {f.name: f for f in fields(cls)}
    out = {}
    for key, raw in parser.items(section):
        if key not in known:
            raise InvalidConfigError(f"[{section}] unknown key {key!r}; known: {', '.join(known)}")
        ftype = str(known[key].type)
        try:
            if "None" in ftype:
                out[key] = _optional_int(raw)
            elif ftype.startswith("int"):
                out[key] = int(raw)
            elif ftype.startswith("float"):
                out[key] = float(raw)
            else:
                out[key] = raw.strip()
        except ValueError:
            raise InvalidConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None
    return out


def parse_config(text: str, source: str = "<config>") -> AnalysisConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str.lower  # type: ignore[method-assign]
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise InvalidConfigError(f"{source}: {exc}") from exc
    allowed = {"grid", "estimator", "factorization", "analysis", "groups"}
    unknown = set(parser.sections()) - allowed
    if unknown:
        raise InvalidConfigError(f"{source}: unknown section(s) {sorted(unknown)}")

    kwargs: dict = {}
    if parser.has_section("grid"):
        for key, raw in parser.items("grid"):
            if key != "size":
                raise InvalidConfigError(f"[grid] unknown key {key!r}")
            try:
                kwargs["grid_size"] = int(raw)
            except ValueError:
                raise InvalidConfigError(f"[grid] size: cannot parse {raw!r}") from None
        FrequencyGrid(kwargs.get("grid_size", 1024))
    kwargs["estimator"] = EstimatorConfig(**_section_kwargs(parser, "estimator", EstimatorConfig))
    kwargs["factorization"] = FactorizationConfig(
        **_section_kwargs(parser, "factorization", FactorizationConfig)
    )
    if parser.has_section("analysis"):
        for key, raw in parser.items("analysis"):
            if key not in ("lags", "threshold"):
                raise InvalidConfigError(f"[analysis] unknown key {key!r}")
            try:
                if key == "lags":
                    kwargs["lags"] = tuple(int(v) for v in raw.split(",") if v.strip())
                else:
                    kwargs["threshold"] = float(raw)
            except ValueError:
                raise InvalidConfigError(f"[analysis] {key}: cannot parse {raw!r}") from None
    if parser.has_section("groups"):
        kwargs["groups"] = tuple(parse_group(k, v) for k, v in parser.items("groups"))
    cfg = AnalysisConfig(**kwargs)
    if not cfg.lags or any(L < 1 for L in cfg.lags):
        raise InvalidConfigError(f"lags must be positive integers, got {cfg.lags}")
    if not cfg.threshold > 0:
        raise InvalidConfigError("threshold must be positive")
    return cfg


def load_config(path: str | Path | None) -> AnalysisConfig:
    if path is None:
        return AnalysisConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, str(path))
