import pytest

from spincoh import PolarizationSpec, TrapConfig

PAPER_WAVELENGTH = 856e-9
PAPER_POWER = 30e-3
PAPER_WAIST = 3.5e-6


@pytest.fixture
def reference_trap() -> TrapConfig:
    """The standard trap: 856 nm, 30 mW, 3.5 um waist."""
    return TrapConfig(wavelength=PAPER_WAVELENGTH, power=PAPER_POWER,
                      waist=PAPER_WAIST)


@pytest.fixture
def one_pct_circular() -> PolarizationSpec:
    return PolarizationSpec(circular_fraction=0.01, handedness=+1)
