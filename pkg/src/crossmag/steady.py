"""Classical steady state of the driven magnon, cavities and phonon."""
from __future__ import annotations

from dataclasses import dataclass

from .params import DetuningMode, SystemParams, rabi_frequency


class SteadyStateError(RuntimeError):
    pass


class ConvergenceError(SteadyStateError):
    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual {residual:.3e} rad/s after {iterations} iterations)")


class OverrideConflictError(SteadyStateError):
    pass


@dataclass(frozen=True)
class SteadyState:
    m_s: complex
    b_s: complex
    c1_s: complex
    c2_s: complex
    delta_m: float
    g_eff: complex
    iterations: int = 0
    converged: bool = True
    residual: float = 0.0

    def to_dict(self, omega_b: float | None = None) -> dict:
        def cplx(z):
            return {"re": z.real, "im": z.imag}

        out = {
            "m_s": cplx(self.m_s),
            "b_s": cplx(self.b_s),
            "c1_s": cplx(self.c1_s),
            "c2_s": cplx(self.c2_s),
            "delta_m_rad_s": self.delta_m,
            "g_eff_rad_s": cplx(self.g_eff),
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_rad_s": self.residual,
        }
        if omega_b:
            out["delta_m_over_omega_b"] = self.delta_m / omega_b
            out["g_eff_over_omega_b"] = cplx(self.g_eff / omega_b)
            out["abs_g_eff_over_omega_b"] = abs(self.g_eff) / omega_b
        return out


def magnon_amplitude(params: SystemParams, delta_m: float, drive: complex | None = None) -> complex:
    """m_s for a given magnon detuning; ``drive`` defaults to the Rabi frequency."""
    eps_m = rabi_frequency(params) if drive is None else drive
    delta_x, delta_y, _ = params.detunings()
    zx = params.kappa_x + 1j * delta_x
    zy = params.kappa_y + 1j * delta_y
    zm = params.kappa_m + 1j * delta_m
    g1sq = params.coupling_gamma_1**2
    g2sq = params.coupling_gamma_2**2
    return eps_m * zx * zy / (zx * zy * zm + g1sq * zy + g2sq * zx)


def phonon_amplitude(params: SystemParams, m_s: complex) -> complex:
    return -1j * params.g_mb * abs(m_s) ** 2 / (1j * params.omega_b + params.gamma_b)


def cavity_amplitudes(params: SystemParams, m_s: complex) -> tuple[complex, complex]:
    delta_x, delta_y, _ = params.detunings()
    c1 = -1j * params.coupling_gamma_1 * m_s / (params.kappa_x + 1j * delta_x)
    c2 = -1j * params.coupling_gamma_2 * m_s / (params.kappa_y + 1j * delta_y)
    return c1, c2


def kerr_shifted_detuning(params: SystemParams, delta_m: float, drive: complex | None = None) -> float:
    """One application of Delta_m0 + g_mb (b_s + b_s*) evaluated at ``delta_m``."""
    _, _, delta_m0 = params.detunings()
    b_s = phonon_amplitude(params, magnon_amplitude(params, delta_m, drive))
    return delta_m0 + 2.0 * params.g_mb * b_s.real


def solve_steady_state(
    params: SystemParams,
    *,
    derive_coupling: bool = False,
    drive: complex | None = None,
    damping: float = 0.5,
    tol: float = 1e-9,
    max_iter: int = 10_000,
) -> SteadyState:
    """Steady-state amplitudes and the effective magnomechanical coupling.

    In pinned mode every detuning equals omega_b. In self-consistent mode the
    magnon detuning is iterated as ``d <- d + damping * (F(d) - d)`` with
    ``F`` the Kerr-shifted detuning, until the update falls below
    ``tol * omega_b``.

    Parameters
    ----------
    derive_coupling : bool
        Request the coupling derived from m_s. Conflicts with an explicit
        ``g_mb_effective_override`` on ``params``.
    drive : complex, optional
        Replaces the Rabi frequency (used for scaling and phase checks).
    """
    override = params.g_mb_effective_override
    if derive_coupling and override is not None:
        raise OverrideConflictError("derived G_mb requested but g_mb_effective_override is set")

    _, _, delta_m = params.detunings()
    iterations = 0
    residual = 0.0
    if params.drive_detuning_mode is DetuningMode.SELF_CONSISTENT:
        atol = tol * params.omega_b
        residual = abs(kerr_shifted_detuning(params, delta_m, drive) - delta_m)
        while residual > atol:
            if iterations >= max_iter:
                raise ConvergenceError("Kerr fixed point did not converge", residual, iterations)
            delta_m += damping * (kerr_shifted_detuning(params, delta_m, drive) - delta_m)
            residual = abs(kerr_shifted_detuning(params, delta_m, drive) - delta_m)
            iterations += 1

    m_s = magnon_amplitude(params, delta_m, drive)
    b_s = phonon_amplitude(params, m_s)
    c1_s, c2_s = cavity_amplitudes(params, m_s)
    g_eff = override if override is not None else params.g_mb * m_s
    return SteadyState(
        m_s=m_s,
        b_s=b_s,
        c1_s=c1_s,
        c2_s=c2_s,
        delta_m=delta_m,
        g_eff=g_eff,
        iterations=iterations,
        converged=True,
        residual=residual,
    )


def pinned_coupling(g_eff: complex) -> SteadyState:
    """A steady state that carries only an effective coupling.

    Used where G_mb is fixed by hand and the drive amplitudes are irrelevant.
    """
    return SteadyState(m_s=0j, b_s=0j, c1_s=0j, c2_s=0j, delta_m=float("nan"), g_eff=complex(g_eff))
