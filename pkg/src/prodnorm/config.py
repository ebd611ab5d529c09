"""Configuration models and loader for prodnorm.

Defines Pydantic models for seesaw options and desk-scale resource limits,
parses the `prodnorm.yaml` file and exposes a `load_config` helper.
"""

from __future__ import annotations

import os
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .constants import (
    DEFAULT_DENSE_BYTES_CAP,
    DEFAULT_DIM_CAP,
    DEFAULT_ENUMERATION_BUDGET,
    DEFAULT_MAX_ITERS,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_STATE_CAP,
    DEFAULT_TOL,
    ENV_DIM_CAP,
    ERR_CONFIG_NOT_FOUND,
    ERR_DENSE_CAP,
    ERR_DIM_CAP,
    ERR_INVALID_CONFIGURATION,
    ERR_INVALID_ENV,
    ERR_STATE_CAP,
)
from .errors import InputError, InvalidSpecError, ResourceError


class SeesawOptions(BaseModel):
    """Restart and stopping options shared by every alternating maximizer."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    restarts: int = Field(DEFAULT_RESTARTS, ge=1)
    max_iters: int = Field(DEFAULT_MAX_ITERS, ge=1)
    tol: float = Field(DEFAULT_TOL, gt=0.0, description="Relative objective change")
    seed: int = Field(DEFAULT_SEED, ge=-(2**63), lt=2**64)
    workers: int = Field(1, ge=1, description="Threads used for restarts")


class Limits(BaseModel):
    """Desk-scale guards checked before any large allocation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dim_cap: int = Field(DEFAULT_DIM_CAP, ge=1)
    state_cap: int = Field(DEFAULT_STATE_CAP, ge=1)
    dense_bytes_cap: int = Field(DEFAULT_DENSE_BYTES_CAP, ge=1)
    enumeration_budget: int = Field(DEFAULT_ENUMERATION_BUDGET, ge=1)

    @classmethod
    def from_env(cls) -> Limits:
        """Defaults with `PRODNORM_DIM_CAP` applied when set."""
        raw = os.environ.get(ENV_DIM_CAP)
        if raw is None or raw.strip() == "":
            return cls()
        try:
            cap = int(raw)
        except ValueError as e:
            raise InvalidSpecError(ERR_INVALID_ENV.format(env=ENV_DIM_CAP, value=raw)) from e
        if cap < 1:
            raise InvalidSpecError(ERR_INVALID_ENV.format(env=ENV_DIM_CAP, value=raw))
        return cls(dim_cap=cap)

    def check_dim(self, what: str, value: int) -> None:
        if value > self.dim_cap:
            raise ResourceError(
                ERR_DIM_CAP.format(what=what, value=value, cap=self.dim_cap, env=ENV_DIM_CAP)
            )

    def check_state(self, what: str, value: int) -> None:
        if value > self.state_cap:
            raise ResourceError(
                ERR_STATE_CAP.format(what=what, value=value, cap=self.state_cap)
            )

    def check_dense(self, rows: int, cols: int) -> None:
        size = rows * cols * 16
        if size > self.dense_bytes_cap:
            raise ResourceError(
                ERR_DENSE_CAP.format(
                    rows=rows, cols=cols, size=size, cap=self.dense_bytes_cap
                )
            )


def resolve_limits(limits: Limits | None) -> Limits:
    return limits if limits is not None else Limits.from_env()


class ProdnormConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seesaw: SeesawOptions = Field(default_factory=SeesawOptions)
    limits: Limits = Field(default_factory=Limits)


def load_config(path: Path) -> ProdnormConfig:
    """Load and validate a prodnorm configuration from YAML.

    The environment variable cap, when set, wins over the file's `dim_cap`.
    """
    if not path.exists():
        raise InputError(ERR_CONFIG_NOT_FOUND.format(path=path))
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        raise InvalidSpecError(ERR_INVALID_CONFIGURATION.format(err=e)) from e
    if not isinstance(data, dict):
        raise InvalidSpecError(
            ERR_INVALID_CONFIGURATION.format(err="top level must be a mapping")
        )
    try:
        cfg = ProdnormConfig.model_validate(data)
    except ValidationError as e:
        raise InvalidSpecError(ERR_INVALID_CONFIGURATION.format(err=e)) from e
    if os.environ.get(ENV_DIM_CAP):
        env_cap = Limits.from_env().dim_cap
        cfg.limits = cfg.limits.model_copy(update={"dim_cap": env_cap})
    return cfg
