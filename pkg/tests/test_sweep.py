from __future__ import annotations

import math

import numpy as np
import pytest

from crossmag.params import ProbeConfig, SystemParams
from crossmag.steady import pinned_coupling
from crossmag.sweep import (
    AxisSpec,
    Observable,
    SweepError,
    SweepResult,
    SweepSpec,
    evaluate_observable,
    golden_section,
    locate_extrema,
    locate_zero_crossings,
    run_sweep,
)

P = SystemParams()
WB = P.omega_b
G = pinned_coupling(0.32 * WB)


def test_axis_parsing():
    assert AxisSpec.parse("xi:0:2:11") == AxisSpec("xi", 0.0, 2.0, 11)
    for bad in ("xi:0:2", "rho:0:1:5", "xi:1:0:5", "xi:0:1:1", "xi:a:1:3"):
        with pytest.raises(SweepError):
            AxisSpec.parse(bad)


def test_default_grid_pins_zero_detuning():
    x = SweepSpec().axis1.values()
    assert len(x) == 2001 and x[1000] == 0.0


def test_same_axis_twice_rejected():
    with pytest.raises(SweepError):
        SweepSpec(axis2=AxisSpec("sigma", 0, 1, 3))


@pytest.mark.parametrize("observable", list(Observable))
def test_result_independent_of_worker_count(observable):
    spec = SweepSpec(
        axis1=AxisSpec("sigma", -1, 1, 301), axis2=AxisSpec("phi", 0, 2 * math.pi, 7), observable=observable,
        fixed=ProbeConfig(xi=1.0),
    )
    one = run_sweep(P, G, spec, workers=1)
    four = run_sweep(P, G, spec, workers=4)
    assert one.values.tobytes() == four.values.tobytes()
    np.testing.assert_array_equal(one.failed, four.failed)


def test_worker_count_from_environment(monkeypatch):
    from crossmag.sweep import worker_count

    monkeypatch.setenv("CROSSMAG_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("CROSSMAG_WORKERS", "junk")
    assert worker_count() == 1


def test_single_probe_absorption_symmetric():
    v = run_sweep(P, G, SweepSpec()).values
    np.testing.assert_allclose(v, v[::-1], atol=1e-12, rtol=0)


def test_double_window_is_symmetric():
    p = P.with_(coupling_gamma_2=0.0)
    ext = run_sweep(p, G, SweepSpec()).extrema
    minima = sorted(e.coordinate for e in ext if e.kind == "min")
    assert len(minima) == 2 and minima[0] == pytest.approx(-minima[1], abs=1e-12)


def test_refined_extrema_stable_under_grid_doubling():
    p = P.with_(coupling_gamma_2=0.0)
    coarse = locate_extrema(run_sweep(p, G, SweepSpec()))
    fine = locate_extrema(run_sweep(p, G, SweepSpec(axis1=AxisSpec("sigma", -1, 1, 4001))))
    assert [e.kind for e in coarse] == [e.kind for e in fine]
    for a, b in zip(coarse, fine):
        assert abs(a.coordinate - b.coordinate) <= 1e-6


def test_monotone_grid_has_no_extrema():
    spec = SweepSpec(axis1=AxisSpec("sigma", 0.7, 1.0, 301))
    assert run_sweep(P, G, spec).extrema == []
    x = np.linspace(0, 1, 11)
    synthetic = SweepResult(SweepSpec(), (x,), x**2, np.zeros(11, bool))
    assert locate_extrema(synthetic, refine=False) == []


def test_phase_axis_extremes():
    spec = SweepSpec(axis1=AxisSpec("phi", 0, 2 * math.pi, 721), fixed=ProbeConfig(xi=1.0))
    res = run_sweep(P, pinned_coupling(0), spec)
    phi = res.coords[0]
    assert phi[np.argmin(res.values)] == pytest.approx(0.0, abs=1e-9)
    assert phi[np.argmax(res.values)] == pytest.approx(math.pi, abs=1e-9)


def test_phase_ratio_contour_topology():
    # sigma = 0, no magnomechanics: absorption falls with xi at phi = 0 and rises at phi = pi
    spec = SweepSpec(axis1=AxisSpec("phi", 0, 2 * math.pi, 181), axis2=AxisSpec("xi", 0, 2, 101))
    res = run_sweep(P, pinned_coupling(0), spec)
    z = res.values
    np.testing.assert_allclose(z[:, 0], z[0, 0], atol=1e-12)  # xi = 0 row is phase blind
    assert np.all(np.diff(z[90, :]) > 0)
    assert z[0, :].argmin() > 0
    np.testing.assert_allclose(z, z[::-1, :], atol=1e-12)  # phi -> 2 pi - phi at sigma = 0
    assert np.unravel_index(np.argmax(z), z.shape) == (90, 100)


def test_failed_nodes_are_marked_not_fatal():
    p = P.with_(coupling_gamma_1=0.0)
    spec = SweepSpec(axis1=AxisSpec("sigma", -1, 1, 11), observable=Observable.GROUP_DELAY)
    res = run_sweep(p, G, spec)
    assert res.failed.tolist() == [False] * 5 + [True] + [False] * 5
    assert math.isnan(res.values[5])


def test_zero_crossings_of_dispersion():
    p = P.with_(coupling_gamma_1=0.0)
    res = run_sweep(p, G, SweepSpec(observable=Observable.DISPERSION))
    assert res.zero_crossings == [0.0]


def test_golden_section():
    assert golden_section(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-9) == pytest.approx(0.3, abs=1e-9)


def test_locate_extrema_rejects_2d():
    spec = SweepSpec(axis1=AxisSpec("sigma", -1, 1, 5), axis2=AxisSpec("xi", 0, 1, 3))
    with pytest.raises(SweepError):
        locate_extrema(run_sweep(P, G, spec))


def test_evaluate_observable_broadcasts():
    v = evaluate_observable(P, G, "t_m_intensity", np.zeros((3, 1)), np.ones((1, 4)), 0.0)
    assert v.shape == (3, 4)
    assert locate_zero_crossings(SweepResult(SweepSpec(), (np.arange(3.0),), np.array([-1.0, 0.0, 1.0]),
                                             np.zeros(3, bool))) == [1.0]
