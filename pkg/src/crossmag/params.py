"""Physical parameters of the cross-cavity magnomechanical system.

All frequencies, detunings and rates are stored as angular quantities (rad/s).
Conversion from ordinary frequencies happens once, in :mod:`crossmag.config`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import hbar

TWO_PI = 2.0 * math.pi


class ParameterError(ValueError):
    """Raised when a parameter violates a physical constraint."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class DetuningMode(str, enum.Enum):
    PINNED = "pinned"
    SELF_CONSISTENT = "selfconsistent"


@dataclass(frozen=True)
class SystemParams:
    """Mode frequencies, damping rates, couplings and drive constants.

    Defaults are the standard YIG/cavity parameter set with a 250 um sphere.
    """

    omega_cavity_1: float = TWO_PI * 10e9
    omega_cavity_2: float = TWO_PI * 10e9
    omega_b: float = TWO_PI * 15e6
    kappa_x: float = TWO_PI * 2.1e6
    kappa_y: float = TWO_PI * 0.15e6
    kappa_m: float = TWO_PI * 0.1e6
    gamma_b: float = 1e-5 * TWO_PI * 15e6
    coupling_gamma_1: float = TWO_PI * 3.2e6
    coupling_gamma_2: float = TWO_PI * 3.2e6
    g_mb: float = TWO_PI * 0.3
    gyromagnetic_ratio: float = TWO_PI * 28e9
    drive_field: float = 1.3e-4
    bias_field: float | None = None
    spin_density: float = 4.22e27
    sphere_diameter: float = 250e-6
    drive_detuning_mode: DetuningMode = DetuningMode.PINNED
    g_mb_effective_override: complex | None = None
    # parsed for completeness; no equation consumes it
    temperature: float = 10e-3

    def __post_init__(self):
        object.__setattr__(self, "drive_detuning_mode", DetuningMode(self.drive_detuning_mode))
        for key in ("kappa_x", "kappa_y", "kappa_m", "gamma_b"):
            value = getattr(self, key)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(key, f"damping rate must be > 0, got {value!r}")
        for key in ("coupling_gamma_1", "coupling_gamma_2", "g_mb"):
            value = getattr(self, key)
            if not (math.isfinite(value) and value >= 0):
                raise ParameterError(key, f"coupling must be >= 0, got {value!r}")
        if not self.omega_b > 0:
            raise ParameterError("omega_b", f"phonon frequency must be > 0, got {self.omega_b!r}")
        if not self.sphere_diameter > 0:
            raise ParameterError("sphere_diameter", f"must be > 0, got {self.sphere_diameter!r}")
        if not self.spin_density > 0:
            raise ParameterError("spin_density", f"must be > 0, got {self.spin_density!r}")
        if self.drive_field < 0:
            raise ParameterError("drive_field", f"must be >= 0, got {self.drive_field!r}")
        if self.drive_detuning_mode is DetuningMode.PINNED:
            widest = max(self.kappa_m, self.kappa_x, self.kappa_y)
            if not self.omega_b > widest:
                raise ParameterError(
                    "omega_b",
                    f"resolved-sideband pin needs omega_b > max linewidth ({widest:.6g} rad/s)",
                )
        if self.g_mb_effective_override is not None:
            object.__setattr__(self, "g_mb_effective_override", complex(self.g_mb_effective_override))

    def with_(self, **changes) -> SystemParams:
        return replace(self, **changes)

    # -- drive frame -------------------------------------------------------
    @property
    def omega_drive(self) -> float:
        """Magnon drive frequency, placed so that cavity 1 sits at detuning omega_b."""
        return self.omega_cavity_1 - self.omega_b

    @property
    def omega_m(self) -> float:
        if self.bias_field is None:
            return self.omega_cavity_1
        return self.gyromagnetic_ratio * self.bias_field

    def detunings(self) -> tuple[float, float, float]:
        """Bare detunings (Delta_x, Delta_y, Delta_m0) from the drive frequency."""
        if self.drive_detuning_mode is DetuningMode.PINNED:
            return self.omega_b, self.omega_b, self.omega_b
        wd = self.omega_drive
        return self.omega_cavity_1 - wd, self.omega_cavity_2 - wd, self.omega_m - wd

    @property
    def rates(self) -> tuple[float, float, float, float]:
        return self.kappa_x, self.kappa_y, self.kappa_m, self.gamma_b


@dataclass(frozen=True)
class ProbeConfig:
    """Two-probe settings.

    ``xi`` scales the phase-bearing probe on cavity 2, so ``xi = 0`` is the
    single-probe case. ``sigma`` may be a scalar or an array (rad/s).
    """

    phi: float = 0.0
    xi: float = 0.0
    sigma: float | np.ndarray = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.xi) < 0):
            raise ParameterError("xi", "amplitude ratio must be >= 0")
        if not np.all(np.isfinite(self.sigma)):
            raise ParameterError("sigma", "detuning must be finite")

    def with_(self, **changes) -> ProbeConfig:
        return replace(self, **changes)

    @property
    def drive_ratio(self):
        """Complex weight xi * exp(i phi) of the cavity-2 probe."""
        return self.xi * np.exp(1j * np.asarray(self.phi))


def spin_count(params: SystemParams) -> float:
    """Number of spins N = rho * V in the sphere."""
    volume = math.pi / 6.0 * params.sphere_diameter**3
    return params.spin_density * volume


def total_spin(params: SystemParams) -> float:
    return 2.5 * spin_count(params)


def rabi_frequency(params: SystemParams) -> float:
    """Magnon drive Rabi frequency sqrt(5N)/4 * gamma_g * H_d in rad/s."""
    return math.sqrt(5.0 * spin_count(params)) / 4.0 * params.gyromagnetic_ratio * params.drive_field


def probe_amplitude(power: float, kappa: float, omega: float) -> float:
    """Probe amplitude sqrt(2 kappa P / (hbar omega)) in sqrt(photons/s)."""
    if power < 0:
        raise ParameterError("power", f"must be >= 0, got {power!r}")
    return math.sqrt(2.0 * kappa * power / (hbar * omega))


def amplitude_ratio(power_x: float, power_y: float, params: SystemParams) -> float:
    """xi from two probe powers, as the cavity-2 amplitude over the cavity-1 amplitude."""
    eps_x = probe_amplitude(power_x, params.kappa_x, params.omega_cavity_1)
    eps_y = probe_amplitude(power_y, params.kappa_y, params.omega_cavity_2)
    if eps_x == 0:
        raise ParameterError("power_x", "cavity-1 probe power must be > 0 to form a ratio")
    return eps_y / eps_x
