"""Field-noise distributions, thermal light-shift statistics and samplers.

The shot-to-shot model: each experimental run sees one static field draw
(worst case for dephasing), composed per axis of a static offset plus an
optional Gaussian or uniform spread; the z axis additionally carries the
thermally distributed vector light shift B_sigma0 - dB_sigma.

Width convention for Gaussians follows the 1/e half-width:
p(B) = exp(-(B/width)^2) / (sqrt(pi) width), i.e. std = width/sqrt(2). This
keeps the dephasing-time relation T2* = hbar/(muB |gF| width) exact.

The thermal deviation dB_sigma = U * B_sigma0 / U0 inherits the potential
energy's Gamma(3/2, kB T) law of a 3D harmonic oscillator, sampled exactly
through U = kB T (n1^2 + n2^2 + n3^2)/2 with standard normals n_i.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import erf, gammainc, ndtri

from . import rng
from .constants import CONST
from .spin1 import FieldVector

_DRAW_WIDTH = 12  # slots per sample in the counter-based stream
_SLOT_GAUSS = (0, 1, 2)    # x, y, z normals
_SLOT_UNIFORM = (3, 4, 5)  # x, y, z uniforms
_SLOT_THERMAL = (6, 7, 8)  # three thermal normals


@dataclass(frozen=True)
class GaussianFieldDist:
    """Gaussian field component; width is the 1/e half-width (std*sqrt2)."""

    mean: float   # tesla
    width: float  # tesla

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("width must be >= 0")

    @property
    def std(self) -> float:
        return self.width / math.sqrt(2.0)

    def pdf(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        return np.exp(-((b - self.mean) / self.width) ** 2) / (math.sqrt(math.pi) * self.width)

    def cdf(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        return 0.5 * (1.0 + erf((b - self.mean) / self.width))


@dataclass(frozen=True)
class UniformFieldDist:
    """Uniform field component on [lo, hi]."""

    lo: float  # tesla
    hi: float  # tesla

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("need lo <= hi")

    def pdf(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        inside = (b >= self.lo) & (b <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)

    def cdf(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        return np.clip((b - self.lo) / (self.hi - self.lo), 0.0, 1.0)


@dataclass(frozen=True)
class ThermalShiftDist:
    """Thermal distribution of the vector-light-shift deviation dB_sigma.

    trap_depth U0 (J), temperature T (K) and the signed trap-bottom field
    bsigma0 (tesla). Valid in the harmonic regime kB T < U0 (warns outside).
    dB_sigma/|bsigma0| = U/U0 with U ~ Gamma(3/2, kB T).
    """

    trap_depth: float   # J
    temperature: float  # K
    bsigma0: float      # tesla, signed

    def __post_init__(self):
        if self.trap_depth <= 0 or self.temperature <= 0:
            raise ValueError("need trap_depth > 0 and temperature > 0")
        if CONST.kB * self.temperature >= self.trap_depth:
            warnings.warn("kB*T >= U0: harmonic approximation unreliable",
                          stacklevel=2)

    @property
    def scale(self) -> float:
        """Gamma-scale theta = kB T |B_sigma0| / U0, tesla."""
        return CONST.kB * self.temperature * abs(self.bsigma0) / self.trap_depth

    @property
    def mean(self) -> float:
        """Mean |dB_sigma| = (3/2) theta, tesla."""
        return 1.5 * self.scale

    @property
    def std(self) -> float:
        return math.sqrt(1.5) * self.scale

    @property
    def mode(self) -> float:
        return 0.5 * self.scale

    def cdf(self, db) -> np.ndarray:
        db = np.asarray(db, dtype=float)
        return gammainc(1.5, np.clip(db, 0.0, None) / self.scale)


@dataclass(frozen=True)
class AxisNoise:
    """One field axis: static offset plus optional spread components."""

    offset: float = 0.0  # tesla
    gaussian: GaussianFieldDist | None = None
    uniform: UniformFieldDist | None = None

    def __post_init__(self):
        if not np.isfinite(self.offset):
            raise ValueError("offset must be finite")


@dataclass(frozen=True)
class FieldNoiseModel:
    """Per-axis noise; the thermal light shift contributes to z only."""

    x: AxisNoise = field(default_factory=AxisNoise)
    y: AxisNoise = field(default_factory=AxisNoise)
    z: AxisNoise = field(default_factory=AxisNoise)
    thermal: ThermalShiftDist | None = None

    @property
    def axes(self) -> tuple[AxisNoise, AxisNoise, AxisNoise]:
        return (self.x, self.y, self.z)

    def fluctuating_axes(self) -> list[int]:
        """Indices (0=x, 1=y, 2=z) carrying a continuous distribution."""
        out = []
        for i, axis in enumerate(self.axes):
            has = (axis.gaussian is not None and axis.gaussian.width > 0) or (
                axis.uniform is not None and axis.uniform.hi > axis.uniform.lo)
            if i == 2 and self.thermal is not None and self.thermal.scale > 0:
                has = True
            if has:
                out.append(i)
        return out


def pdf_potential(dim: int, u, temperature: float) -> np.ndarray:
    """Thermal pdf of the harmonic-oscillator potential energy, 1/J.

    dim=1: p(U) = exp(-U/kBT) / sqrt(pi kBT U)   (integrable 1/sqrt(U) edge)
    dim=3: p(U) = 2 sqrt(U) exp(-U/kBT) / (sqrt(pi) (kBT)^{3/2})

    i.e. Gamma(1/2, kBT) and Gamma(3/2, kBT). The kinetic energy follows the
    same law; the total energy does not (see ``maxwell_boltzmann_pdf``).
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("potential energy must be >= 0")
    kbt = CONST.kB * temperature
    if dim == 1:
        with np.errstate(divide="ignore"):
            return np.exp(-u / kbt) / (math.sqrt(math.pi * kbt) * np.sqrt(u))
    if dim == 3:
        return 2.0 * np.sqrt(u) * np.exp(-u / kbt) / (math.sqrt(math.pi) * kbt**1.5)
    raise ValueError("dim must be 1 or 3")


def maxwell_boltzmann_pdf(e, temperature: float) -> np.ndarray:
    """Total-energy pdf p(E) = E^2 exp(-E/kBT) / (2 (kBT)^3), 1/J."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    e = np.asarray(e, dtype=float)
    kbt = CONST.kB * temperature
    return e**2 * np.exp(-e / kbt) / (2.0 * kbt**3)


def pdf_delta_bsigma(db, dist: ThermalShiftDist) -> np.ndarray:
    """pdf of the light-shift deviation dB_sigma >= 0, 1/tesla.

    p(dB) = 2 sqrt(dB) exp(-dB/theta) / (sqrt(pi) theta^{3/2}),
    theta = kB T |B_sigma0| / U0 -- the potential-energy law mapped through
    dB = U |B_sigma0| / U0.
    """
    db = np.asarray(db, dtype=float)
    if np.any(db < 0):
        raise ValueError("dB_sigma must be >= 0")
    theta = dist.scale
    return 2.0 * np.sqrt(db) * np.exp(-db / theta) / (math.sqrt(math.pi) * theta**1.5)


def sample_fields(model: FieldNoiseModel, start_index: int, count: int,
                  seed: int) -> np.ndarray:
    """(count, 3) field draws for sample indices [start, start+count), tesla.

    Pure function of (seed, index): chunked and per-index calls agree
    bitwise. Draw slots are fixed per sample regardless of which components
    the model carries.
    """
    u = rng.uniforms(seed, rng.DOMAIN_FIELD, start_index, count, _DRAW_WIDTH)
    out = np.empty((count, 3), dtype=float)
    for i, axis in enumerate(model.axes):
        value = np.full(count, axis.offset)
        if axis.gaussian is not None:
            g = axis.gaussian
            value += g.mean + g.std * ndtri(u[:, _SLOT_GAUSS[i]])
        if axis.uniform is not None:
            ud = axis.uniform
            value += ud.lo + (ud.hi - ud.lo) * u[:, _SLOT_UNIFORM[i]]
        out[:, i] = value
    if model.thermal is not None:
        th = model.thermal
        n = ndtri(u[:, _SLOT_THERMAL])
        u_over_kbt = 0.5 * np.sum(n * n, axis=1)           # U / kB T ~ Gamma(3/2, 1)
        db = u_over_kbt * CONST.kB * th.temperature * th.bsigma0 / th.trap_depth
        out[:, 2] += th.bsigma0 - db
    return out


def sample_field(model: FieldNoiseModel, sample_index: int, seed: int) -> FieldVector:
    """Single draw; identical to row ``sample_index`` of any chunked call."""
    row = sample_fields(model, sample_index, 1, seed)[0]
    return FieldVector(*row)


def verify_mb_convolution(temperature: float, grid_size: int) -> float:
    """Numerically convolve p3D with itself against the Maxwell-Boltzmann pdf.

    Checks int p3D(E-u) p3D(u) du = p_MB(E) on a grid over [0, 20 kBT];
    returns the sup-norm deviation (1/J). The endpoint sqrt singularities are
    absorbed with u = E sin^2(a), leaving a smooth integrand for
    Gauss-Legendre.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if grid_size < 256:
        raise ValueError("grid_size must be >= 256")
    kbt = CONST.kB * temperature
    energies = np.linspace(0.0, 20.0 * kbt, grid_size)
    nodes, weights = leggauss(96)
    alpha = 0.25 * math.pi * (nodes + 1.0)     # map [-1,1] -> [0, pi/2]
    warp = 0.25 * math.pi * weights
    sin2 = np.sin(alpha) ** 2
    jac = 2.0 * np.sin(alpha) * np.cos(alpha)  # du = E jac da

    worst = 0.0
    for e in energies[1:]:
        u = e * sin2
        conv = float(np.sum(warp * pdf_potential(3, u, temperature)
                            * pdf_potential(3, e - u, temperature) * e * jac))
        worst = max(worst, abs(conv - float(maxwell_boltzmann_pdf(e, temperature))))
    return worst
