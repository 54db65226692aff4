"""Pydantic request/response models and the experiment config schema.

Configs use lab units at the boundary (nm, mW, um, mG, uK, us) with
unit-suffixed keys; unknown keys are rejected. Conversion helpers build the
SI-level core objects.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .. import units
from ..dephasing import TimeGrid
from ..noise import (AxisNoise, FieldNoiseModel, GaussianFieldDist,
                     ThermalShiftDist, UniformFieldDist)
from ..spin1 import Spin1State, named_state
from ..trap import PolarizationSpec, TrapConfig, trap_depth, vector_shift_field

StateName = Literal["m+1", "m0", "m-1", "x+", "x-", "y+", "y-"]
FitFamily = Literal["superposition-analytic", "stretched-analytic", "full-ensemble"]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TrapSection(StrictModel):
    wavelength_nm: float = Field(856.0, gt=0)
    power_mW: float = Field(30.0, ge=0)
    waist_um: float = Field(3.5, gt=0)


class PolarizationSection(StrictModel):
    circular_fraction_pct: float = Field(1.0, ge=0, le=100)
    handedness: Literal[-1, 1] = 1


class AxisNoiseSection(StrictModel):
    offset_mG: float = 0.0
    gaussian_width_mG: float = Field(0.0, ge=0)
    uniform_lo_mG: float = 0.0
    uniform_hi_mG: float = 0.0

    @model_validator(mode="after")
    def _ordered(self):
        if self.uniform_lo_mG > self.uniform_hi_mG:
            raise ValueError("uniform_lo_mG must be <= uniform_hi_mG")
        return self


class ThermalSection(StrictModel):
    temperature_uK: float = Field(150.0, gt=0)
    trap_depth_uK: float | None = Field(None, gt=0)  # default: derived from trap
    bsigma0_mG: float | None = None  # default: derived from trap + polarization


class NoiseSection(StrictModel):
    x: AxisNoiseSection = Field(default_factory=AxisNoiseSection)
    y: AxisNoiseSection = Field(default_factory=AxisNoiseSection)
    z: AxisNoiseSection = Field(default_factory=AxisNoiseSection)
    thermal: ThermalSection | None = None


class RunSection(StrictModel):
    t_max_us: float = Field(200.0, gt=0)
    step_us: float = Field(2.0, gt=0)
    samples: int = Field(20000, ge=100)
    seed: int = Field(12345, ge=0, lt=2**64)
    shots: int = Field(100, ge=1)
    init_state: StateName = "x+"
    analysis_state: StateName = "x+"


class ExperimentConfig(StrictModel):
    trap: TrapSection = Field(default_factory=TrapSection)
    polarization: PolarizationSection = Field(default_factory=PolarizationSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    run: RunSection = Field(default_factory=RunSection)

    def trap_config(self) -> TrapConfig:
        t = self.trap
        return TrapConfig(wavelength=t.wavelength_nm * 1e-9,
                          power=t.power_mW * 1e-3, waist=t.waist_um * 1e-6)

    def polarization_spec(self) -> PolarizationSpec:
        p = self.polarization
        return PolarizationSpec(circular_fraction=p.circular_fraction_pct / 100.0,
                                handedness=p.handedness)

    def thermal_dist(self) -> ThermalShiftDist | None:
        th = self.noise.thermal
        if th is None:
            return None
        depth = (units.uk_to_joule(th.trap_depth_uK) if th.trap_depth_uK is not None
                 else trap_depth(self.trap_config()))
        bsigma0 = (units.mg_to_tesla(th.bsigma0_mG) if th.bsigma0_mG is not None
                   else vector_shift_field(self.trap_config(), self.polarization_spec()))
        return ThermalShiftDist(trap_depth=depth,
                                temperature=th.temperature_uK * 1e-6,
                                bsigma0=bsigma0)

    def noise_model(self) -> FieldNoiseModel:
        axes = {}
        for name in ("x", "y", "z"):
            section: AxisNoiseSection = getattr(self.noise, name)
            gaussian = None
            if section.gaussian_width_mG > 0:
                gaussian = GaussianFieldDist(
                    mean=0.0, width=units.mg_to_tesla(section.gaussian_width_mG))
            uniform = None
            if section.uniform_hi_mG > section.uniform_lo_mG:
                uniform = UniformFieldDist(lo=units.mg_to_tesla(section.uniform_lo_mG),
                                           hi=units.mg_to_tesla(section.uniform_hi_mG))
            axes[name] = AxisNoise(offset=units.mg_to_tesla(section.offset_mG),
                                   gaussian=gaussian, uniform=uniform)
        return FieldNoiseModel(x=axes["x"], y=axes["y"], z=axes["z"],
                               thermal=self.thermal_dist())

    def time_grid(self) -> TimeGrid:
        return TimeGrid.regular(units.us_to_s(self.run.t_max_us),
                                units.us_to_s(self.run.step_us))

    def states(self) -> tuple[Spin1State, Spin1State]:
        return named_state(self.run.init_state), named_state(self.run.analysis_state)


def noise_section_from_model(model: FieldNoiseModel) -> NoiseSection:
    """Serialize a noise model back to the config boundary (mG/uK).

    Gaussian component means fold into the axis offset; the thermal section
    carries its depth and trap-bottom field explicitly.
    """
    sections = {}
    for name, axis in zip(("x", "y", "z"), model.axes):
        offset = axis.offset + (axis.gaussian.mean if axis.gaussian else 0.0)
        sections[name] = AxisNoiseSection(
            offset_mG=units.tesla_to_mg(offset),
            gaussian_width_mG=units.tesla_to_mg(axis.gaussian.width) if axis.gaussian else 0.0,
            uniform_lo_mG=units.tesla_to_mg(axis.uniform.lo) if axis.uniform else 0.0,
            uniform_hi_mG=units.tesla_to_mg(axis.uniform.hi) if axis.uniform else 0.0,
        )
    thermal = None
    if model.thermal is not None:
        thermal = ThermalSection(
            temperature_uK=model.thermal.temperature * 1e6,
            trap_depth_uK=units.joule_to_uk(model.thermal.trap_depth),
            bsigma0_mG=units.tesla_to_mg(model.thermal.bsigma0),
        )
    return NoiseSection(**sections, thermal=thermal)


# ---------------------------------------------------------------- requests

class TrapRequest(StrictModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)


class DistRequest(StrictModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)
    grid_points: int = Field(512, ge=16, le=65536)
    u_max_kbt: float = Field(10.0, gt=0)


class EvolveRequest(StrictModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)


class DephaseRequest(StrictModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)
    method: Literal["mc", "quad"] = "mc"


class CurvePayload(StrictModel):
    time_us: list[float]
    probability: list[float]
    stderr: list[float]
    meta: dict = Field(default_factory=dict)


class FitRequest(StrictModel):
    curve: CurvePayload
    family: FitFamily = "full-ensemble"
    initial_guess: dict[str, float] = Field(default_factory=dict)
    bounds: dict[str, tuple[float, float]] | None = None
    init_state: StateName = "x+"
    analysis_state: StateName = "x+"
    max_iterations: int = Field(200, ge=1, le=10000)
    config: ExperimentConfig | None = None  # trap/thermal context for full-ensemble


class TomoRequest(StrictModel):
    config: ExperimentConfig = Field(default_factory=ExperimentConfig)


# --------------------------------------------------------------- responses

class TrapSummary(StrictModel):
    intensity_W_m2: float
    depth_uK: float
    fr_kHz: float
    fz_kHz: float
    zR_um: float
    raman_Hz: float
    bsigma0_mG: float


class DistResponse(StrictModel):
    u_J: list[float]
    p1d_per_J: list[float]
    p3d_per_J: list[float]
    db_mG: list[float]
    p_db_per_mG: list[float]
    mb_deviation_per_J: float
    mb_peak_per_J: float


class FitResponse(StrictModel):
    family: str
    params: dict[str, float]
    stderr_1sigma: dict[str, float]
    free_params: list[str]
    covariance: list[list[float]]
    residual_norm: float
    converged: bool
    iterations: int
    message: str
    derived: dict[str, float]
    units: dict[str, str]


class TomoResponse(StrictModel):
    time_us: list[float]
    r: list[float]
    trace_rho_sq: list[float]
    repaired: list[bool]
    densities: list[dict]


def curve_payload(curve) -> CurvePayload:
    meta = {k: v for k, v in curve.meta.items()}
    return CurvePayload(
        time_us=[float(x) for x in np.asarray(curve.grid.times) * 1e6],
        probability=[float(x) for x in curve.probabilities],
        stderr=[float(x) for x in curve.stderr],
        meta=meta,
    )


def payload_curve(payload: CurvePayload):
    from ..dephasing import DecayCurve

    return DecayCurve(
        grid=TimeGrid(np.asarray(payload.time_us) * 1e-6),
        probabilities=np.asarray(payload.probability),
        stderr=np.asarray(payload.stderr),
        meta=dict(payload.meta),
    )
