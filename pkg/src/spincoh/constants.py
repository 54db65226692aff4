"""Physical constants and 87Rb D-line data.

Numbers live in ``data/rb87_constants.txt`` (key = SI value, comment = source)
and are parsed once at import. ``CONST`` and ``RB87`` are the module-level
instances everything else uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    c: float     # m/s
    hbar: float  # J*s
    kB: float    # J/K
    muB: float   # J/T
    gF: float    # dimensionless, -1/2 for the F=1 ground level

    def __post_init__(self):
        for name in ("c", "hbar", "kB", "muB"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.gF != -0.5:
            raise ValueError("gF must be exactly -1/2 for the F=1 ground level")

    @property
    def gyromagnetic(self) -> float:
        """Signed muB*gF/hbar in rad/s per tesla (about -2pi*0.7 MHz/G)."""
        return self.muB * self.gF / self.hbar


@dataclass(frozen=True)
class DLine:
    omega: float  # rad/s, angular transition frequency
    gamma: float  # rad/s, natural linewidth

    def __post_init__(self):
        if not 0 < self.gamma < 1e-3 * self.omega:
            raise ValueError("need 0 < gamma << omega for a D line")

    @property
    def wavelength(self) -> float:
        return TWO_PI * CONST.c / self.omega


@dataclass(frozen=True)
class AtomSpecies:
    mass: float   # kg
    d1: DLine     # 795 nm line
    d2: DLine     # 780 nm line
    elastic_rate_ref: float  # Hz, documented reference value (not computed)

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if not self.d1.omega < self.d2.omega:
            raise ValueError("D1 must lie below D2 in frequency")


def load_constants_table(path: str | Path | None = None) -> dict[str, float]:
    """Parse the checked-in constants table into a {key: SI value} dict."""
    if path is None:
        text = resources.files("spincoh").joinpath("data/rb87_constants.txt").read_text()
    else:
        text = Path(path).read_text()
    table: dict[str, float] = {}
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, _, value = body.partition("=")
        table[key.strip()] = float(value)
    return table


_TABLE = load_constants_table()

CONST = PhysicalConstants(
    c=_TABLE["c"], hbar=_TABLE["hbar"], kB=_TABLE["kB"],
    muB=_TABLE["muB"], gF=_TABLE["gF"],
)

RB87 = AtomSpecies(
    mass=_TABLE["mass"],
    d1=DLine(omega=TWO_PI * _TABLE["d1_frequency"], gamma=TWO_PI * _TABLE["d1_linewidth"]),
    d2=DLine(omega=TWO_PI * _TABLE["d2_frequency"], gamma=TWO_PI * _TABLE["d2_linewidth"]),
    elastic_rate_ref=_TABLE["elastic_rate_ref"],
)
