"""Optical dipole trap physics for a focused Gaussian beam on the Rb D lines.

Two-line model (D1 + D2): good far from resonance where the detuning is
large against hyperfine splittings. Provides peak intensity, state-insensitive
trap depth, harmonic trap frequencies, the incoherent (spontaneous Raman)
scatter rate and the vector light shift expressed as an effective magnetic
field along the beam axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import CONST, RB87, TWO_PI, AtomSpecies


@dataclass(frozen=True)
class PolarizationSpec:
    """Polarization of the trap light.

    circular_fraction is the intensity fraction I_sigma/I carried by the
    circular component; handedness is +1 for sigma+ and -1 for sigma-.
    """

    circular_fraction: float
    handedness: int = +1

    def __post_init__(self):
        if not 0.0 <= self.circular_fraction <= 1.0:
            raise ValueError("circular_fraction must lie in [0, 1]")
        if self.handedness not in (-1, +1):
            raise ValueError("handedness must be -1 or +1")


@dataclass(frozen=True)
class TrapConfig:
    """Focused Gaussian-beam trap: wavelength (m), power (W), waist (m).

    waist is the 1/e^2 intensity radius. The wavelength must be red of both
    D lines; everything trap-derived (intensity, depth, frequencies, rates,
    vector shift) hangs off this object.
    """

    wavelength: float
    power: float
    waist: float
    species: AtomSpecies = field(default=RB87)

    def __post_init__(self):
        if self.power < 0 or self.waist <= 0 or self.wavelength <= 0:
            raise ValueError("need power >= 0, waist > 0, wavelength > 0")
        if self.wavelength <= self.species.d1.wavelength:
            raise ValueError("trap light must be red-detuned of both D lines")

    @property
    def laser_omega(self) -> float:
        """Angular frequency of the trap laser, rad/s."""
        return TWO_PI * CONST.c / self.wavelength

    @property
    def rayleigh_range(self) -> float:
        """z_R = pi w0^2 / lambda, m."""
        return math.pi * self.waist**2 / self.wavelength

    @property
    def detunings(self) -> tuple[float, float]:
        """(Delta_D1, Delta_D2) = omega_laser - omega_D, rad/s (negative here)."""
        w = self.laser_omega
        return w - self.species.d1.omega, w - self.species.d2.omega


def peak_intensity(trap: TrapConfig) -> float:
    """On-axis focus intensity I = 2P/(pi w0^2), W/m^2."""
    return 2.0 * trap.power / (math.pi * trap.waist**2)


def _require_nonzero_detuning(trap: TrapConfig) -> tuple[float, float]:
    d1, d2 = trap.detunings
    if d1 == 0.0 or d2 == 0.0:
        raise ValueError("trap light resonant with a D line (zero detuning)")
    return d1, d2


def trap_depth(trap: TrapConfig) -> float:
    """Trapping potential depth |Delta E| at the focus, J.

    Linear polarization light shift of the ground level, summed over the two
    D lines with line weights 1 (D1) and 2 (D2) and each line's own
    Gamma/omega^3 prefactor:

        Delta E = -(pi c^2 / 2) [G1/w1^3 * 1/Delta_D1 + G2/w2^3 * 2/Delta_D2] I
    """
    d1, d2 = _require_nonzero_detuning(trap)
    if d1 > 0 or d2 > 0:
        raise ValueError("trap_depth requires red detuning on both D lines")
    sp = trap.species
    shift = -(math.pi * CONST.c**2 / 2.0) * (
        sp.d1.gamma / sp.d1.omega**3 * (1.0 / d1)
        + sp.d2.gamma / sp.d2.omega**3 * (2.0 / d2)
    ) * peak_intensity(trap)
    return abs(shift)


def trap_frequencies(trap: TrapConfig) -> tuple[float, float]:
    """(omega_r, omega_z) of the harmonic expansion about the focus, rad/s.

    omega_r = sqrt(4 U0 / (m w0^2)), omega_z = sqrt(2 U0 / (m z_R^2)).
    """
    u0 = trap_depth(trap)
    m = trap.species.mass
    omega_r = math.sqrt(4.0 * u0 / (m * trap.waist**2))
    omega_z = math.sqrt(2.0 * u0 / (m * trap.rayleigh_range**2))
    return omega_r, omega_z


def raman_scatter_rate(trap: TrapConfig) -> float:
    """Incoherent (spin-changing) photon scatter rate at the focus, Hz.

        Gamma_incoh = (3 c^2 w^3 / 4 hbar) (G_D/w_D^3)^2 |1/D1 - 1/D2|^2 I

    The squared single-line prefactor uses D2 values; D1 differs by <1%.
    Vanishes for equal detunings (destructive interference of the two paths).
    """
    d1, d2 = _require_nonzero_detuning(trap)
    if d1 > 0 or d2 > 0:
        raise ValueError("raman_scatter_rate requires red detuning on both D lines")
    line = trap.species.d2
    return (
        3.0 * CONST.c**2 * trap.laser_omega**3 / (4.0 * CONST.hbar)
        * (line.gamma / line.omega**3) ** 2
        * abs(1.0 / d1 - 1.0 / d2) ** 2
        * peak_intensity(trap)
    )


def inverse_detuning_gap(wavelength: float, species: AtomSpecies = RB87) -> float:
    """(1/Delta_D1 - 1/Delta_D2) at a given wavelength, s.

    The sign of the vector light shift. Negative red of both D lines,
    positive between them; no finite zero exists (the sign change is across
    the D1 resonance). Exposed for sign-structure analysis at wavelengths a
    TrapConfig would reject.
    """
    w = TWO_PI * CONST.c / wavelength
    d1 = w - species.d1.omega
    d2 = w - species.d2.omega
    if d1 == 0.0 or d2 == 0.0:
        raise ValueError("wavelength resonant with a D line")
    return 1.0 / d1 - 1.0 / d2


def vector_shift_field(trap: TrapConfig, pol: PolarizationSpec) -> float:
    """Optically induced field B_sigma0 at the trap bottom, tesla (signed).

    The circular intensity component I_sigma acts on m_F != 0 like a magnetic
    field along the beam axis:

        B_sigma0 = P (1/muB) (pi c^2 / 2) (G_D/w_D^3) (1/D1 - 1/D2) I_sigma

    Odd in the handedness P; linear in the circular fraction.
    """
    _require_nonzero_detuning(trap)
    line = trap.species.d2
    i_sigma = pol.circular_fraction * peak_intensity(trap)
    return (
        pol.handedness
        * (1.0 / CONST.muB)
        * (math.pi * CONST.c**2 / 2.0)
        * (line.gamma / line.omega**3)
        * inverse_detuning_gap(trap.wavelength, trap.species)
        * i_sigma
    )
