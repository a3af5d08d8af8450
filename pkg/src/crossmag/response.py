"""Analytic probe-frequency response and output-field quadratures.

Every function broadcasts over numpy arrays of ``sigma``, ``xi`` and ``phi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ProbeConfig, SystemParams
from .steady import SteadyState

# relative size below which the response denominator is treated as zero
DEGENERACY_RTOL = 1e-13


class DegenerateDenominatorError(ArithmeticError):
    def __init__(self, sigma, magnitude):
        self.sigma = sigma
        self.magnitude = magnitude
        super().__init__(f"response denominator vanishes (|D| = {magnitude!r}) at sigma = {sigma!r} rad/s")


@dataclass(frozen=True)
class ResponsePoint:
    sigma: np.ndarray | float
    c1_plus: np.ndarray | complex
    eps_T: np.ndarray | complex

    @property
    def chi_r(self):
        return np.real(self.eps_T)

    @property
    def chi_i(self):
        return np.imag(self.eps_T)


def alpha_factor(rate, sigma):
    return rate - 1j * np.asarray(sigma)


def _alphas(params: SystemParams, sigma):
    return (
        alpha_factor(params.kappa_x, sigma),
        alpha_factor(params.kappa_y, sigma),
        alpha_factor(params.kappa_m, sigma),
        alpha_factor(params.gamma_b, sigma),
    )


def lambda_factor(params: SystemParams, steady: SteadyState, sigma):
    _, a2, am, ab = _alphas(params, sigma)
    g2sq = params.coupling_gamma_2**2
    return a2 * am * ab + g2sq * ab + abs(steady.g_eff) ** 2 * a2


def response_terms(params: SystemParams, steady: SteadyState, sigma, *, check: bool = True):
    """Return ``(Lambda, phase_kernel, denominator)``.

    ``c1_plus = (Lambda - phase_kernel * xi e^{i phi}) / denominator`` where
    ``phase_kernel = Gamma_1 Gamma_2 alpha_b``.
    """
    a1, a2, _, ab = _alphas(params, sigma)
    lam = lambda_factor(params, steady, sigma)
    g1 = params.coupling_gamma_1
    dipole = g1**2 * a2 * ab
    den = a1 * lam + dipole
    if check:
        scale = np.abs(a1 * lam) + np.abs(dipole)
        bad = np.ravel(~(np.abs(den) > DEGENERACY_RTOL * scale))
        if bad.any():
            idx = int(np.argmax(bad))
            s = np.broadcast_to(np.asarray(sigma), np.shape(den)).ravel()
            raise DegenerateDenominatorError(float(s[idx]), float(np.abs(den).ravel()[idx]))
    return lam, g1 * params.coupling_gamma_2 * ab, den


def probe_response(
    params: SystemParams, steady: SteadyState, probe: ProbeConfig, *, check: bool = True
) -> ResponsePoint:
    """c1_plus at the probe frequency and eps_T = 2 kappa_x c1_plus."""
    lam, kernel, den = response_terms(params, steady, probe.sigma, check=check)
    c1 = (lam - kernel * probe.drive_ratio) / den
    return ResponsePoint(sigma=probe.sigma, c1_plus=c1, eps_T=2.0 * params.kappa_x * c1)
