"""Unit conversions used at interface boundaries.

Everything inside the library is SI (tesla, joule, second, kelvin).
Configs and artifacts use lab units: mG for fields, uK for temperatures
and trap depths, us for times.
"""

from .constants import CONST

MG_PER_TESLA = 1e7  # 1 T = 1e4 G = 1e7 mG


def mg_to_tesla(b_mg: float) -> float:
    return b_mg / MG_PER_TESLA


def tesla_to_mg(b_t: float) -> float:
    return b_t * MG_PER_TESLA


def uk_to_joule(t_uk: float) -> float:
    """Temperature or depth in uK to the equivalent thermal energy kB*T in J."""
    return t_uk * 1e-6 * CONST.kB


def joule_to_uk(e_j: float) -> float:
    return e_j / CONST.kB / 1e-6


def us_to_s(t_us: float) -> float:
    return t_us * 1e-6


def s_to_us(t_s: float) -> float:
    return t_s * 1e6
