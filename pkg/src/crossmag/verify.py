"""Randomized agreement check between the closed form and both oracles."""
from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

import numpy as np

from .oracle import inflate_phonon_damping, integrate_time_domain, solve_sidebands
from .params import ProbeConfig, SystemParams
from .response import probe_response
from .steady import pinned_coupling

CLOSED_FORM_RTOL = 1e-9
TIME_DOMAIN_RTOL = 1e-6
BASE_G_MB = 0.32  # centre of the effective-coupling draws, units of omega_b


@dataclass
class TriangleReport:
    draws: int
    time_domain_draws: int
    seed: int
    max_rel_closed_vs_linear: float
    max_rel_time_vs_linear: float
    closed_form_rtol: float = CLOSED_FORM_RTOL
    time_domain_rtol: float = TIME_DOMAIN_RTOL

    @property
    def passed(self) -> bool:
        return (
            self.max_rel_closed_vs_linear <= self.closed_form_rtol
            and self.max_rel_time_vs_linear <= self.time_domain_rtol
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def random_draw(rng: np.random.Generator, base: SystemParams | None = None):
    """Parameters, effective coupling and probe for one randomized check.

    Rates and couplings are log-uniform within one decade of the base values;
    xi in [0, 2], phi in [0, 2 pi), sigma in [-omega_b, omega_b]. Cavity and
    magnon linewidths are capped at 0.95 omega_b to stay resolved-sideband.
    """
    base = SystemParams() if base is None else base

    def spread(value, cap=math.inf):
        lo, hi = math.log10(value) - 1.0, min(math.log10(value) + 1.0, math.log10(cap))
        return 10.0 ** rng.uniform(lo, hi)

    cap = 0.95 * base.omega_b
    params = base.with_(
        kappa_x=spread(base.kappa_x, cap),
        kappa_y=spread(base.kappa_y, cap),
        kappa_m=spread(base.kappa_m, cap),
        gamma_b=spread(base.gamma_b),
        coupling_gamma_1=spread(base.coupling_gamma_1),
        coupling_gamma_2=spread(base.coupling_gamma_2),
    )
    g_eff = spread(BASE_G_MB * base.omega_b) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    probe = ProbeConfig(
        xi=rng.uniform(0.0, 2.0),
        phi=rng.uniform(0.0, 2 * math.pi),
        sigma=rng.uniform(-1.0, 1.0) * base.omega_b,
    )
    return params, g_eff, probe


def oracle_triangle(draws: int = 1000, seed: int = 7, time_domain_draws: int | None = None) -> TriangleReport:
    """Max relative errors: closed form vs linear solve, time domain vs linear solve.

    The time-domain leg runs on the first ``time_domain_draws`` draws with
    gamma_b inflated to 1e-2 omega_b, using the doubling propagator.
    """
    rng = np.random.default_rng(seed)
    time_domain_draws = draws if time_domain_draws is None else min(time_domain_draws, draws)
    worst_closed = 0.0
    worst_time = 0.0
    for i in range(draws):
        params, g_eff, probe = random_draw(rng)
        steady = pinned_coupling(g_eff)
        linear = solve_sidebands(params, steady, probe)[0]
        closed = complex(probe_response(params, steady, probe).c1_plus)
        worst_closed = max(worst_closed, abs(closed - linear) / abs(linear))
        if i < time_domain_draws:
            slow = inflate_phonon_damping(params)
            reference = solve_sidebands(slow, steady, probe)[0]
            td = integrate_time_domain(slow, steady, probe, propagation="doubling", max_samples=512)
            worst_time = max(worst_time, abs(td - reference) / abs(reference))
    return TriangleReport(draws, time_domain_draws, seed, worst_closed, worst_time)
