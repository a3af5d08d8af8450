from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossmag.oracle import sideband_system, solve_sidebands
from crossmag.params import ProbeConfig, SystemParams
from crossmag.response import alpha_factor, lambda_factor, probe_response
from crossmag.steady import pinned_coupling
from crossmag.sweep import AxisSpec, Observable, SweepSpec, locate_extrema, run_sweep
from crossmag.verify import random_draw

P = SystemParams()
WB = P.omega_b
G = pinned_coupling(0.32 * WB)

sigmas = st.floats(-1.0, 1.0).map(lambda s: s * WB)
phases = st.floats(0.0, 2 * math.pi)
ratios = st.floats(0.0, 2.0)


def eps(params=P, steady=G, **probe):
    return complex(probe_response(params, steady, ProbeConfig(**probe)).eps_T)


def test_alpha_factor():
    assert alpha_factor(3.0, 0.0) == 3.0
    assert alpha_factor(3.0, 2.0) == np.conj(alpha_factor(3.0, -2.0))
    assert alpha_factor(0.0, 2.0) == -2j


def test_lambda_factor_limits():
    p = P.with_(coupling_gamma_2=0.0)
    s = 0.4 * WB
    expected = alpha_factor(p.kappa_y, s) * alpha_factor(p.kappa_m, s) * alpha_factor(p.gamma_b, s)
    assert lambda_factor(p, pinned_coupling(0), s) == pytest.approx(expected, rel=1e-14)
    lam0 = lambda_factor(P, G, 0.0)
    assert lam0.imag == 0 and lam0.real > 0


def test_lambda_matches_linear_system_minor():
    # Lambda is the (c2, m, b) minor of the sideband matrix
    s = 0.5 * WB
    a = sideband_system(P, G, ProbeConfig(sigma=s)).matrix
    assert np.linalg.det(a[1:, 1:]) == pytest.approx(lambda_factor(P, G, s), rel=1e-10)


@pytest.mark.parametrize("sigma", [0.0, 0.2, -0.7])
def test_decoupled_cavity(sigma):
    p = P.with_(coupling_gamma_1=0.0)
    s = sigma * WB
    got = eps(p, G, sigma=s, xi=1.3, phi=0.4)
    assert got == pytest.approx(2 * p.kappa_x / (p.kappa_x - 1j * s), rel=1e-13)
    if sigma == 0.0:
        assert got == pytest.approx(2.0, rel=1e-15)


def test_single_loop_closed_form():
    p = P.with_(coupling_gamma_2=0.0)
    s = np.linspace(-WB, WB, 101)
    a1, am = p.kappa_x - 1j * s, p.kappa_m - 1j * s
    expected = 2 * p.kappa_x * am / (a1 * am + p.coupling_gamma_1**2)
    got = probe_response(p, pinned_coupling(0), ProbeConfig(sigma=s, xi=0.9, phi=2.0)).eps_T
    np.testing.assert_allclose(got, expected, rtol=1e-12)


def test_default_point_matches_linear_solve():
    probe = ProbeConfig(phi=math.pi / 2, xi=1.0, sigma=0.3 * WB)
    closed = complex(probe_response(P, G, probe).c1_plus)
    linear = solve_sidebands(P, G, probe)[0]
    assert abs(closed - linear) / abs(linear) <= 1e-10


def test_oracle_equivalence_random_draws():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        params, g_eff, probe = random_draw(rng)
        steady = pinned_coupling(g_eff)
        closed = complex(probe_response(params, steady, probe).c1_plus)
        linear = solve_sidebands(params, steady, probe)[0]
        worst = max(worst, abs(closed - linear) / abs(linear))
    assert worst <= 1e-9


@settings(max_examples=200, deadline=None)
@given(sigmas, phases, ratios)
def test_conjugate_mirror_symmetry(s, phi, xi):
    left = eps(sigma=-s, xi=xi, phi=phi)
    right = eps(sigma=s, xi=xi, phi=-phi)
    assert abs(left - np.conj(right)) <= 1e-12 * max(1.0, abs(left))


@settings(max_examples=200, deadline=None)
@given(sigmas, phases, ratios)
def test_phase_periodicity(s, phi, xi):
    assert abs(eps(sigma=s, xi=xi, phi=phi) - eps(sigma=s, xi=xi, phi=phi + 2 * math.pi)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(sigmas, phases, phases)
def test_single_probe_is_phase_blind(s, phi1, phi2):
    assert eps(sigma=s, phi=phi1) == eps(sigma=s, phi=phi2)


@settings(max_examples=100, deadline=None)
@given(sigmas, phases, st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_affine_in_drive_ratio(s, phi, x1, x2):
    e0 = eps(sigma=s)
    e1 = eps(sigma=s, xi=x1, phi=phi)
    e2 = eps(sigma=s, xi=x2, phi=phi)
    # three points on one line in the complex plane, spaced by xi
    assert (e2 - e0) == pytest.approx((e1 - e0) * x2 / x1, rel=1e-9, abs=1e-12)


def test_absorption_even_for_single_probe():
    s = np.linspace(-WB, WB, 2001)
    chi = probe_response(P, G, ProbeConfig(sigma=s)).eps_T.real
    np.testing.assert_allclose(chi, chi[::-1], atol=1e-12, rtol=0)


def test_dips_approach_coupling_as_magnon_linewidth_shrinks():
    p = P.with_(coupling_gamma_2=0.0, kappa_m=P.kappa_m * 1e-3)
    res = run_sweep(p, G, SweepSpec())
    minima = sorted(e.coordinate for e in locate_extrema(res) if e.kind == "min")
    assert minima == pytest.approx([-0.32, 0.32], abs=1e-3)


def test_refined_minimum_matches_brute_force():
    p = P.with_(coupling_gamma_2=0.0)
    res = run_sweep(p, G, SweepSpec(observable=Observable.ABSORPTION))
    refined = [e.coordinate for e in locate_extrema(res) if e.kind == "min" and e.coordinate > 0][0]
    fine = AxisSpec("sigma", refined - 2e-3, refined + 2e-3, 40001).values()
    chi = probe_response(p, G, ProbeConfig(sigma=fine * WB)).eps_T.real
    assert refined == pytest.approx(fine[np.argmin(chi)], abs=2e-7)
