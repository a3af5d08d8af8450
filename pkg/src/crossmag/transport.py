"""Probe transmission, its interference decomposition, and group delay."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .params import ProbeConfig, SystemParams
from .response import _alphas, response_terms
from .steady import SteadyState

SINGULAR_THRESHOLD = 1e-6


class TauMethod(str, enum.Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite_difference"


@dataclass(frozen=True)
class TransportPoint:
    sigma: np.ndarray | float
    t_m: np.ndarray | complex
    t_ph: np.ndarray | complex
    tau_g: np.ndarray | float | None = None
    tau_method: TauMethod | None = None
    singular: np.ndarray | bool = False

    @property
    def t_p(self):
        return self.t_m + self.t_ph

    @property
    def intensity(self):
        return np.abs(self.t_p) ** 2


def transmission(
    params: SystemParams, steady: SteadyState, probe: ProbeConfig, *, check: bool = True
) -> TransportPoint:
    """T_p = T_m + T_ph with both parts carrying the kappa_x output-coupling factor."""
    lam, kernel, den = response_terms(params, steady, probe.sigma, check=check)
    t_m = 1.0 - params.kappa_x * lam / den
    t_ph = -params.kappa_x * kernel * probe.drive_ratio / den
    return TransportPoint(sigma=probe.sigma, t_m=t_m, t_ph=t_ph)


def transmission_derivative(params: SystemParams, steady: SteadyState, probe: ProbeConfig, *, check: bool = True):
    """Closed-form (T_p, dT_p/dsigma) from the quotient rule; every alpha' equals -i."""
    sigma = probe.sigma
    a1, a2, am, ab = _alphas(params, sigma)
    lam, kernel, den = response_terms(params, steady, sigma, check=check)
    g1, g2 = params.coupling_gamma_1, params.coupling_gamma_2
    d_lam = -1j * (a2 * am + a2 * ab + am * ab) - 1j * g2**2 - 1j * abs(steady.g_eff) ** 2
    d_den = -1j * lam + a1 * d_lam - 1j * g1**2 * (a2 + ab)
    w = probe.drive_ratio
    # T_p = 1 - kappa_x (Lambda + kernel w) / D, matching T_m + T_ph
    num = lam + kernel * w
    d_num = d_lam - 1j * g1 * g2 * w
    t_p = 1.0 - params.kappa_x * num / den
    d_t_p = -params.kappa_x * (d_num * den - num * d_den) / den**2
    return t_p, d_t_p


def default_fd_step(params: SystemParams) -> float:
    """Central-difference step: 1e-6 omega_b, capped well below the narrowest linewidth."""
    return min(1e-6 * params.omega_b, 1e-4 * min(params.rates))


def group_delay(
    params: SystemParams,
    steady: SteadyState,
    probe: ProbeConfig,
    method: TauMethod | str = TauMethod.ANALYTIC,
    *,
    threshold: float = SINGULAR_THRESHOLD,
    step: float | None = None,
    check: bool = True,
) -> TransportPoint:
    """Group delay tau_g = d arg(T_p)/d sigma in seconds.

    Points where ``|T_p| <= threshold`` are flagged singular and their delay
    is NaN; the phase is undefined at a transmission zero.
    """
    method = TauMethod(method)
    point = transmission(params, steady, probe, check=check)
    if method is TauMethod.ANALYTIC:
        t_p, d_t_p = transmission_derivative(params, steady, probe, check=check)
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.imag(d_t_p / t_p)
    else:
        h = default_fd_step(params) if step is None else step
        sigma = np.asarray(probe.sigma, dtype=float)
        upper = transmission(params, steady, probe.with_(sigma=sigma + h), check=check).t_p
        lower = transmission(params, steady, probe.with_(sigma=sigma - h), check=check).t_p
        # arg of the ratio picks the nearest branch of the unwrapped phase
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.angle(upper / lower) / (2.0 * h)
    singular = np.abs(point.t_p) <= threshold
    tau = np.where(singular, np.nan, tau)
    if np.ndim(tau) == 0:
        tau = float(tau)
        singular = bool(singular)
    return replace(point, tau_g=tau, tau_method=method, singular=singular)
