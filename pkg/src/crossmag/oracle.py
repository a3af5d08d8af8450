"""Independent checks of the closed-form response.

Two routes that share no algebra with :mod:`crossmag.response`:

* a dense 4x4 linear solve of the sideband equations, by Gaussian
  elimination with partial pivoting;
* fixed-step RK4 integration of the linearized (or the full nonlinear)
  equations of motion, followed by demodulation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .params import ProbeConfig, SystemParams, rabi_frequency
from .steady import SteadyState

RESIDUAL_RTOL = 1e-12
DRIFT_RTOL = 1e-6
DEFAULT_DECAY_TIMES = 30.0
MIN_DECAY_TIMES = 10.0
MAX_STEP_FRACTION = 1e-2


class SingularSystemError(np.linalg.LinAlgError):
    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"sideband matrix is singular (condition estimate {condition:.3e})")


class IntegrationError(ValueError):
    pass


class TransientError(RuntimeError):
    def __init__(self, drift: float):
        self.drift = drift
        super().__init__(f"transient has not decayed: final-window drift {drift:.3e} relative")


@dataclass(frozen=True)
class SidebandSystem:
    """Coefficients for the unknowns (c1+, c2+, m+, b+) and the drive in units of eps_p."""

    matrix: np.ndarray
    drive: np.ndarray


def coupling_matrix(params: SystemParams, steady: SteadyState) -> np.ndarray:
    """Generator M0 of the linearized dynamics, d/dt x = -M0 x + drive."""
    g1, g2, g = params.coupling_gamma_1, params.coupling_gamma_2, steady.g_eff
    return np.array(
        [
            [params.kappa_x, 0, 1j * g1, 0],
            [0, params.kappa_y, 1j * g2, 0],
            [1j * g1, 1j * g2, params.kappa_m, 1j * g],
            [0, 0, 1j * np.conj(g), params.gamma_b],
        ],
        dtype=complex,
    )


def probe_drive(probe: ProbeConfig) -> np.ndarray:
    return np.array([1.0, probe.xi * np.exp(1j * probe.phi), 0.0, 0.0], dtype=complex)


def sideband_system(params: SystemParams, steady: SteadyState, probe: ProbeConfig) -> SidebandSystem:
    sigma = float(probe.sigma)
    matrix = coupling_matrix(params, steady) - 1j * sigma * np.eye(4)
    return SidebandSystem(matrix=matrix, drive=probe_drive(probe))


def gauss_solve(a, b, *, tol: float = 1e-300) -> np.ndarray:
    """Solve a x = b by Gaussian elimination with partial (row) pivoting."""
    a = np.array(a, dtype=complex)
    x = np.array(b, dtype=complex)
    n = len(x)
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= tol:
            raise SingularSystemError(np.linalg.cond(a))
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        for i in range(k + 1, n):
            if a[i, k] != 0:
                lam = a[i, k] / a[k, k]
                a[i, k + 1 :] -= lam * a[k, k + 1 :]
                x[i] -= lam * x[k]
    if abs(a[n - 1, n - 1]) <= tol:
        raise SingularSystemError(np.linalg.cond(a))
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - np.dot(a[k, k + 1 :], x[k + 1 :])) / a[k, k]
    return x


def solve_sidebands(params: SystemParams, steady: SteadyState, probe: ProbeConfig):
    """(c1+, c2+, m+, b+) from the generic linear solve."""
    system = sideband_system(params, steady, probe)
    x = gauss_solve(system.matrix, system.drive)
    residual = np.linalg.norm(system.matrix @ x - system.drive) / np.linalg.norm(system.drive)
    if not residual <= RESIDUAL_RTOL:
        raise SingularSystemError(np.linalg.cond(system.matrix))
    return tuple(complex(v) for v in x)


# -- time domain ---------------------------------------------------------------


def rk4_step(f: Callable, t: float, y, h: float):
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def inflate_phonon_damping(params: SystemParams, ratio: float = 1e-2) -> SystemParams:
    """Copy of ``params`` with gamma_b = ratio * omega_b, so transients decay in microseconds."""
    return replace(params, gamma_b=ratio * params.omega_b)


def _linear_limits(params: SystemParams, steady: SteadyState, sigma: float):
    rates = params.rates
    fast = max(*rates, params.coupling_gamma_1, params.coupling_gamma_2, abs(steady.g_eff), abs(sigma))
    return min(rates), fast


def _check_grid(duration, step, slowest, fastest):
    if duration < MIN_DECAY_TIMES / slowest * (1 - 1e-12):
        raise IntegrationError(f"duration {duration:.3e} s shorter than {MIN_DECAY_TIMES:g}/min(rate)")
    if step > MAX_STEP_FRACTION / fastest * (1 + 1e-12):
        raise IntegrationError(f"step {step:.3e} s exceeds {MAX_STEP_FRACTION:g}/max(rate)")
    if step <= 0:
        raise IntegrationError("step must be positive")


def _window(n_steps: int, step: float, sigma: float, fraction: float) -> int:
    n_win = max(2, int(n_steps * fraction))
    if sigma != 0:
        period = 2 * math.pi / (abs(sigma) * step)
        if n_win >= period:
            n_win = int(round(math.floor(n_win / period) * period))
    return n_win


def _demodulate(times, samples, sigma):
    ref = np.exp(-1j * sigma * times)
    return np.vdot(ref, samples) / np.vdot(ref, ref)


def integrate_time_domain(
    params: SystemParams,
    steady: SteadyState,
    probe: ProbeConfig,
    duration: float | None = None,
    step: float | None = None,
    *,
    propagation: str = "stepwise",
    drive_scale: float = 1.0,
    window_fraction: float = 0.2,
    max_samples: int = 4096,
) -> complex:
    """Demodulated c1+ from RK4 integration of the linearized equations.

    Starts from rest, discards the first ``1 - window_fraction`` of the run,
    and fits ``c1(t) ~ c1+ exp(-i sigma t)`` by least squares over the rest.

    ``propagation="doubling"`` extracts the RK4 one-step map once (by
    stepping basis states through :func:`rk4_step`) and advances it by
    repeated squaring. It yields the same iterates as ``"stepwise"`` up to
    rounding, in O(log n) work.
    """
    sigma = float(probe.sigma)
    slowest, fastest = _linear_limits(params, steady, sigma)
    if duration is None:
        duration = DEFAULT_DECAY_TIMES / slowest
    if step is None:
        step = MAX_STEP_FRACTION / fastest
    _check_grid(duration, step, slowest, fastest)

    m0 = coupling_matrix(params, steady)
    drive = drive_scale * probe_drive(probe)
    n_steps = int(math.ceil(duration / step))
    n_win = _window(n_steps, step, sigma, window_fraction)
    start = n_steps - n_win
    stride = max(1, n_win // max_samples)
    sample_idx = np.arange(start, n_steps + 1, stride)

    def rhs(t, y):
        return -m0 @ y + drive * np.exp(-1j * sigma * t)

    if propagation == "stepwise":
        y = np.zeros(4, dtype=complex)
        samples = np.empty(len(sample_idx), dtype=complex)
        j = 0
        for n in range(n_steps + 1):
            if j < len(sample_idx) and n == sample_idx[j]:
                samples[j] = y[0]
                j += 1
            if n < n_steps:
                y = rk4_step(rhs, n * step, y, step)
    elif propagation == "doubling":
        hom = np.column_stack([rk4_step(lambda t, y: -m0 @ y, 0.0, e, step) for e in np.eye(4, dtype=complex)])
        forced = rk4_step(rhs, 0.0, np.zeros(4, dtype=complex), step)
        q = np.zeros((5, 5), dtype=complex)
        q[:4, :4] = hom
        q[:4, 4] = forced
        q[4, 4] = np.exp(-1j * sigma * step)
        z = np.linalg.matrix_power(q, int(start)) @ np.array([0, 0, 0, 0, 1], dtype=complex)
        q_stride = np.linalg.matrix_power(q, stride)
        samples = np.empty(len(sample_idx), dtype=complex)
        for j in range(len(sample_idx)):
            samples[j] = z[0]
            z = q_stride @ z
    else:
        raise ValueError(f"unknown propagation {propagation!r}")

    times = sample_idx * step
    amp = _demodulate(times, samples, sigma)
    half = len(samples) // 2
    if half >= 2 and abs(amp) > 0:
        first = _demodulate(times[:half], samples[:half], sigma)
        second = _demodulate(times[half:], samples[half:], sigma)
        drift = abs(first - second) / abs(amp)
        if drift > DRIFT_RTOL:
            raise TransientError(drift)
    return complex(amp)


def integrate_full_nonlinear(
    params: SystemParams,
    duration: float | None = None,
    step: float | None = None,
    *,
    window_fraction: float = 0.2,
) -> SteadyState:
    """Long-time averages of the noise-free, probe-free nonlinear dynamics.

    Integrates the drive-frame equations including the radiation-pressure-like
    term g_mb m (b + b*), starting from the empty state.
    """
    dx, dy, dm0 = params.detunings()
    kx, ky, km, gb = params.rates
    g1, g2, g, wb = params.coupling_gamma_1, params.coupling_gamma_2, params.g_mb, params.omega_b
    eps_m = rabi_frequency(params)
    slowest = min(params.rates)
    fastest = max(kx, ky, km, gb, g1, g2, abs(dx), abs(dy), abs(dm0), wb)
    if duration is None:
        duration = DEFAULT_DECAY_TIMES / slowest
    if step is None:
        step = MAX_STEP_FRACTION / fastest
    _check_grid(duration, step, slowest, fastest)

    lx, ly, lm, lb = complex(kx, dx), complex(ky, dy), complex(km, dm0), complex(gb, wb)

    def rhs(c1, c2, m, b):
        return (
            -lx * c1 - 1j * g1 * m,
            -ly * c2 - 1j * g2 * m,
            -lm * m - 1j * (g1 * c1 + g2 * c2) - 2j * g * b.real * m + eps_m,
            -lb * b - 1j * g * (m.real * m.real + m.imag * m.imag),
        )

    n_steps = int(math.ceil(duration / step))
    start = n_steps - max(2, int(n_steps * window_fraction))
    h, h2, h6 = step, step / 2, step / 6
    c1 = c2 = m = b = 0j
    sums = [0j] * 4
    halves = [[0j] * 4, [0j] * 4]
    count = n_steps - start
    mid = start + count // 2
    for n in range(n_steps):
        a1, a2, a3, a4 = rhs(c1, c2, m, b)
        b1, b2, b3, b4 = rhs(c1 + h2 * a1, c2 + h2 * a2, m + h2 * a3, b + h2 * a4)
        d1, d2, d3, d4 = rhs(c1 + h2 * b1, c2 + h2 * b2, m + h2 * b3, b + h2 * b4)
        e1, e2, e3, e4 = rhs(c1 + h * d1, c2 + h * d2, m + h * d3, b + h * d4)
        c1 += h6 * (a1 + 2 * b1 + 2 * d1 + e1)
        c2 += h6 * (a2 + 2 * b2 + 2 * d2 + e2)
        m += h6 * (a3 + 2 * b3 + 2 * d3 + e3)
        b += h6 * (a4 + 2 * b4 + 2 * d4 + e4)
        if n >= start:
            half = halves[0] if n < mid else halves[1]
            for i, v in enumerate((c1, c2, m, b)):
                sums[i] += v
                half[i] += v

    c1_bar, c2_bar, m_bar, b_bar = (s / count for s in sums)
    scale = abs(m_bar)
    drift = 0.0
    if scale > 0:
        first = halves[0][2] / (mid - start)
        second = halves[1][2] / (n_steps - mid)
        drift = abs(first - second) / scale
    if drift > DRIFT_RTOL:
        raise TransientError(drift)
    return SteadyState(
        m_s=m_bar,
        b_s=b_bar,
        c1_s=c1_bar,
        c2_s=c2_bar,
        delta_m=dm0 + 2 * g * b_bar.real,
        g_eff=g * m_bar,
        iterations=n_steps,
        converged=True,
        residual=drift,
    )
