"""Configuration models and their layered loading.

Precedence, lowest first: built-in defaults, ``.env`` / environment
(``FOCKSPACE_WORKERS``, ``FOCKSPACE_MAX_BOXES``), a ``key = value`` file given
with ``--config``, explicit command-line flags.
"""

from __future__ import annotations

import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from fockspace.diagram import Diagram, enumerate_diagrams
from fockspace.errors import ConfigurationError

try:
    # load environment variables from .env file (requires `python-dotenv`)
    from dotenv import dotenv_values, find_dotenv, load_dotenv
except ImportError:  # pragma: no cover
    dotenv_values = find_dotenv = load_dotenv = None

logger = logging.getLogger(__name__)

Preset = Literal["paper", "dual", "std"]
RiModeName = Literal["full", "half"]

ENV_PREFIX = "FOCKSPACE_"
ENV_KEYS = ("workers", "max_boxes")
DEFAULT_GRID = (Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1))
DEFAULT_BUDGET = 500_000


def _split_ints(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return tuple(int(part) for part in value.split(",") if part.strip())
        except ValueError as exc:
            raise ValueError(f"expected a comma list of integers, got {value!r}") from exc
    if isinstance(value, int):
        return (value,)
    return value


def required_window(charges, max_boxes: int) -> tuple[int, int]:
    """Every diagonal touched by a diagram with at most ``max_boxes`` boxes."""
    return (min(charges) - max_boxes - 2, max(charges) + max_boxes + 2)


class AuditConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    charges: tuple[int, ...] = (0,)
    max_boxes: int = Field(5, ge=0)
    window: tuple[int, int] | None = None
    l: int | None = Field(None, ge=2)
    preset: Preset | None = None
    ri_mode: RiModeName | None = None
    workers: int = Field(1, ge=1)

    @field_validator("charges", mode="before")
    @classmethod
    def _parse_charges(cls, value: Any) -> Any:
        return _split_ints(value)

    @field_validator("charges")
    @classmethod
    def _sorted_charges(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise ValueError("at least one charge is required")
        return tuple(sorted(set(value)))

    @field_validator("window", mode="before")
    @classmethod
    def _parse_window(cls, value: Any) -> Any:
        return _split_ints(value)

    @model_validator(mode="after")
    def _check_window(self) -> "AuditConfig":
        if self.window is not None:
            lo, hi = self.window
            need_lo, need_hi = required_window(self.charges, self.max_boxes)
            if lo > need_lo or hi < need_hi:
                raise ValueError(
                    f"window [{lo}, {hi}] must contain [{need_lo}, {need_hi}] "
                    f"for charges {list(self.charges)} and {self.max_boxes} boxes"
                )
        return self

    @property
    def index_window(self) -> tuple[int, int]:
        return self.window or required_window(self.charges, self.max_boxes)

    def basis(self) -> list[Diagram]:
        """Basis diagrams in counterexample order: charge, box count, columns."""
        out: list[Diagram] = []
        for charge in self.charges:
            out.extend(enumerate_diagrams(charge, self.max_boxes))
        return out

    def algebra(self):
        """The folded algebra this config describes, or ``None`` without a rank."""
        if self.l is None:
            return None
        from fockspace.affinec import FoldedAlgebra

        return FoldedAlgebra.from_preset(self.l, self.preset or "paper", self.ri_mode or "full")

    def echo(self) -> dict:
        out: dict = {
            "charges": list(self.charges),
            "max_boxes": self.max_boxes,
            "window": list(self.index_window),
        }
        if self.l is not None:
            out["l"] = self.l
            out["preset"] = self.preset or "paper"
            out["ri_mode"] = self.ri_mode or "full"
        return out


class CliConfig(BaseModel):
    """Parameters shared by the subcommands after all layers are merged."""

    model_config = ConfigDict(frozen=True)

    charge: int = 0
    charges: tuple[int, ...] | None = None
    max_boxes: int = Field(5, ge=0)
    l: int = Field(2, ge=2)
    preset: Preset = "paper"
    ri_mode: RiModeName = "full"
    workers: int = Field(1, ge=1)
    window: tuple[int, int] | None = None
    budget: int = Field(DEFAULT_BUDGET, ge=1)
    grid: tuple[Fraction, ...] = DEFAULT_GRID
    no_meta: bool = False

    @field_validator("charges", "window", mode="before")
    @classmethod
    def _parse_ints(cls, value: Any) -> Any:
        return _split_ints(value)

    @field_validator("grid", mode="before")
    @classmethod
    def _parse_grid(cls, value: Any) -> Any:
        if isinstance(value, str):
            return tuple(Fraction(part.strip()) for part in value.split(",") if part.strip())
        return value

    @field_validator("grid")
    @classmethod
    def _half_integers(cls, value: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        for exponent in value:
            if (2 * exponent).denominator != 1:
                raise ValueError(f"grid exponent {exponent} is not a multiple of 1/2")
        return tuple(dict.fromkeys(value))

    def audit_config(self, *, folded: bool) -> AuditConfig:
        return build_audit_config(
            charges=self.charges or (self.charge,),
            max_boxes=self.max_boxes,
            window=self.window,
            l=self.l if folded else None,
            preset=self.preset if folded else None,
            ri_mode=self.ri_mode if folded else None,
            workers=self.workers,
        )


CONFIG_KEYS = frozenset(CliConfig.model_fields)


def _normalize_keys(values: Mapping[str, Any], source: str) -> dict[str, Any]:
    out = {}
    for key, value in values.items():
        name = key.strip().lower().replace("-", "_")
        if name not in CONFIG_KEYS:
            raise ConfigurationError(f"unknown configuration key {key!r} in {source}")
        out[name] = value
    return out


def load_env() -> dict[str, Any]:
    if load_dotenv is not None:
        load_dotenv(find_dotenv(usecwd=True))
    found = {}
    for key in ENV_KEYS:
        value = os.environ.get(ENV_PREFIX + key.upper())
        if value is not None:
            found[key] = value
    if found:
        logger.debug("configuration from environment: %s", found)
    return found


def load_config_file(path: Path) -> dict[str, Any]:
    if dotenv_values is None:
        raise ConfigurationError("reading --config files requires python-dotenv")
    if not Path(path).is_file():
        raise ConfigurationError(f"config file {path} does not exist")
    values = {k: v for k, v in dotenv_values(path).items() if v is not None}
    logger.debug("configuration from %s: %s", path, values)
    return _normalize_keys(values, str(path))


def resolve_config(flags: Mapping[str, Any], config_path: Path | None = None) -> CliConfig:
    """Merge defaults, environment, config file and flags (``None`` flags are unset)."""
    merged: dict[str, Any] = {}
    merged.update(load_env())
    if config_path is not None:
        merged.update(load_config_file(config_path))
    merged.update({k: v for k, v in flags.items() if v is not None and k in CONFIG_KEYS})
    try:
        return CliConfig(**merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigurationError(f"invalid {where}: {first['msg']}") from exc


def build_audit_config(**values: Any) -> AuditConfig:
    try:
        return AuditConfig(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigurationError(f"invalid {where}: {first['msg']}") from exc
