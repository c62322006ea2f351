"""Run configuration: YAML/JSON documents validated with unknown keys rejected."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .cavity import HARD_MODE_CAP, CavityConfig, mode_frequency
from .integrals import DEFAULT_TOLERANCE
from .perturbation import DetectorState, FieldState
from .trajectories import Static, UniformAcceleration, max_proper_time


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CavitySection(_Strict):
    length: float = Field(gt=0)
    boundary: Literal["dirichlet", "periodic"] = "dirichlet"
    j_max: int = Field(HARD_MODE_CAP, ge=1, le=HARD_MODE_CAP)


class DetectorSection(_Strict):
    p: float = Field(ge=0, le=1)
    gap: Optional[float] = Field(None, gt=0)
    resonant_mode: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _one_gap(self):
        if (self.gap is None) == (self.resonant_mode is None):
            raise ValueError("give exactly one of detector.gap or detector.resonant_mode")
        return self


class StaticSection(_Strict):
    kind: Literal["static"]
    position: float


class AcceleratedSection(_Strict):
    kind: Literal["accelerated"]
    acceleration: float = Field(gt=0)


class FieldSection(_Strict):
    kind: Literal["vacuum", "thermal"] = "vacuum"
    temperature: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _temperature(self):
        if self.kind == "thermal" and self.temperature is None:
            raise ValueError("a thermal field needs field.temperature")
        if self.kind == "vacuum" and self.temperature is not None:
            raise ValueError("a vacuum field takes no temperature")
        return self


class GridSection(_Strict):
    start: float = Field(0.0, ge=0)
    stop: float = Field(ge=0)
    count: int = Field(200, ge=1)

    @model_validator(mode="after")
    def _increasing(self):
        if self.count > 1 and not self.stop > self.start:
            raise ValueError("tau_grid.stop must exceed tau_grid.start")
        return self


class Tolerances(_Strict):
    quadrature: float = Field(DEFAULT_TOLERANCE, gt=0)
    tail: float = Field(1e-2, gt=0, le=1)


class OutputSection(_Strict):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True,
                              serialize_by_alias=True)

    csv: Optional[str] = None
    json_path: Optional[str] = Field(None, alias="json")


class RunConfig(_Strict):
    name: Optional[str] = None
    cavity: CavitySection
    detector: DetectorSection
    trajectory: Annotated[Union[StaticSection, AcceleratedSection], Field(discriminator="kind")]
    field: FieldSection = FieldSection()
    coupling: float = Field(0.01, gt=0)
    tau_grid: GridSection
    tolerances: Tolerances = Tolerances()
    entropy: Literal["linearized", "exact"] = "linearized"
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _domain(self):
        if self.detector.p in (0.0, 1.0) and self.entropy == "linearized":
            raise ValueError("linearized entropy needs 0 < p < 1; use entropy: exact")
        t = self.trajectory
        if (t.kind == "static" and self.cavity.boundary == "dirichlet"
                and not 0 <= t.position <= self.cavity.length):
            raise ValueError(f"static position {t.position} lies outside [0, {self.cavity.length}]")
        return self

    # -- resolved domain objects ------------------------------------------------

    def cavity_config(self) -> CavityConfig:
        return CavityConfig(self.cavity.length, self.cavity.boundary, self.cavity.j_max,
                            self.tolerances.tail)

    def gap(self) -> float:
        if self.detector.gap is not None:
            return self.detector.gap
        return mode_frequency(self.detector.resonant_mode, self.cavity_config())

    def detector_state(self) -> DetectorState:
        return DetectorState(self.detector.p, self.gap())

    def trajectory_obj(self):
        t = self.trajectory
        return Static(t.position) if t.kind == "static" else UniformAcceleration(t.acceleration)

    def field_state(self) -> FieldState:
        if self.field.kind == "vacuum":
            return FieldState.vacuum()
        return FieldState.thermal(self.field.temperature)

    def exit_time(self) -> float:
        return max_proper_time(self.trajectory_obj(), self.cavity_config())

    def resolved(self) -> dict:
        """Plain dict of the config with the gap and worldline bound filled in."""
        d = self.model_dump(mode="json")
        d["detector"]["gap_resolved"] = self.gap()
        exit_time = self.exit_time()
        d["trajectory"]["max_proper_time"] = None if math.isinf(exit_time) else exit_time
        return d


def parse_config(data) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML/JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
