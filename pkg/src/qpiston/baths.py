"""Thermal bath response profiles and detailed-balance sampling.

A bath is a positive spectral response profile together with a temperature.
Sampling at negative frequency applies the detailed-balance factor
exp(omega/T) to the mirrored positive-frequency value, so absorption and
emission rates drawn from one bath always satisfy G(omega) =
exp(omega/T) G(-omega).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import ConfigError

DOMINANCE_FACTOR = 10.0


@dataclass(frozen=True)
class FlatWindow:
    """Constant response on [omega_lo, omega_hi], zero outside."""

    omega_lo: float
    omega_hi: float
    height: float

    def __post_init__(self):
        if self.omega_lo < 0 or self.omega_hi <= self.omega_lo:
            raise ConfigError(
                f"flat window needs 0 <= omega_lo < omega_hi, got "
                f"[{self.omega_lo}, {self.omega_hi}]"
            )
        if self.height <= 0:
            raise ConfigError(f"profile height must be positive, got {self.height}")

    def value(self, omega: float) -> float:
        if self.omega_lo <= omega <= self.omega_hi:
            return self.height
        return 0.0


@dataclass(frozen=True)
class Lorentzian:
    """Peak-normalized Lorentzian line: height at center, half width at height/2."""

    center: float
    width: float
    height: float

    def __post_init__(self):
        if self.center < 0:
            raise ConfigError(f"line center must be nonnegative, got {self.center}")
        if self.width <= 0 or self.height <= 0:
            raise ConfigError("line width and height must be positive")

    def value(self, omega: float) -> float:
        x = (omega - self.center) / self.width
        return self.height / (1.0 + x * x)


@dataclass(frozen=True)
class Gaussian:
    """Peak-normalized Gaussian line with standard deviation ``width``."""

    center: float
    width: float
    height: float

    def __post_init__(self):
        if self.center < 0:
            raise ConfigError(f"line center must be nonnegative, got {self.center}")
        if self.width <= 0 or self.height <= 0:
            raise ConfigError("line width and height must be positive")

    def value(self, omega: float) -> float:
        x = (omega - self.center) / self.width
        return self.height * math.exp(-0.5 * x * x)


Profile = Union[FlatWindow, Lorentzian, Gaussian]


@dataclass(frozen=True)
class BathSpectrum:
    """A labeled thermal bath: response profile plus temperature."""

    label: str
    temperature: float
    profile: Profile

    def __post_init__(self):
        if self.temperature <= 0:
            raise ConfigError(
                f"bath {self.label!r} temperature must be positive, got {self.temperature}"
            )


def sample(bath: BathSpectrum, omega: float) -> float:
    """Bath response at signed frequency omega.

    Positive omega reads the profile directly (energy flowing out of the
    bath is suppressed only through the profile itself); negative omega is
    the detailed-balance image exp(omega/T) * profile(-omega).
    """
    if omega >= 0:
        return bath.profile.value(omega)
    return math.exp(omega / bath.temperature) * bath.profile.value(-omega)


def combined(baths, omega: float) -> float:
    """Summed response of several baths at one signed frequency."""
    return float(sum(sample(b, omega) for b in baths))


@dataclass(frozen=True)
class SeparationReport:
    """Sideband responses of the two baths and their dominance ratios."""

    nu_plus: float
    nu_minus: float
    hot_at_upper: float
    cold_at_upper: float
    hot_at_lower: float
    cold_at_lower: float
    upper_dominance: float
    lower_dominance: float
    gain_favorable: bool


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf if num > 0 else 0.0
    return num / den


def spectral_separation_report(
    hot: BathSpectrum, cold: BathSpectrum, omega0: float, nu: float
) -> SeparationReport:
    """Check whether the two baths address their intended sidebands.

    The amplification cycle wants the hot bath to own the upper sideband
    omega0 + nu and the cold bath the lower one omega0 - nu; each is called
    dominant when its response there is at least 10x the other bath's.
    """
    if nu >= omega0:
        raise ConfigError(f"nu must be < omega0, got nu={nu}, omega0={omega0}")
    if nu <= 0:
        raise ConfigError(f"nu must be positive, got {nu}")
    nu_plus = omega0 + nu
    nu_minus = omega0 - nu
    h_up = sample(hot, nu_plus)
    c_up = sample(cold, nu_plus)
    h_lo = sample(hot, nu_minus)
    c_lo = sample(cold, nu_minus)
    up_dom = _ratio(h_up, c_up)
    lo_dom = _ratio(c_lo, h_lo)
    favorable = up_dom >= DOMINANCE_FACTOR and lo_dom >= DOMINANCE_FACTOR
    return SeparationReport(
        nu_plus=nu_plus,
        nu_minus=nu_minus,
        hot_at_upper=h_up,
        cold_at_upper=c_up,
        hot_at_lower=h_lo,
        cold_at_lower=c_lo,
        upper_dominance=up_dom,
        lower_dominance=lo_dom,
        gain_favorable=favorable,
    )
