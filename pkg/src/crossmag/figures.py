"""Canned recipes that regenerate the data behind each figure panel.

A recipe is a pure function of the base parameters and the effective
coupling used for the "G_mb on" curves. Curves with G_mb off pin it to zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import SystemParams
from .steady import pinned_coupling
from .sweep import AxisSpec, Observable, evaluate_observable

FIG_G_MB = 0.32  # effective coupling for the figure recipes, in units of omega_b
FIG9_GAMMA = 0.18  # magnon-photon coupling of the delay figure, in units of omega_b
PHASES = (("0", 0.0), ("pi/2", math.pi / 2), ("pi", math.pi), ("3pi/2", 3 * math.pi / 2))
RATIOS = (0.0, 0.5, 1.0, 1.5, 2.0)


@dataclass
class Curve:
    label: str
    x: np.ndarray
    y: np.ndarray


@dataclass
class FigureData:
    fig_id: str
    title: str
    x_name: str
    y_name: str
    curves: list[Curve] = field(default_factory=list)
    # contour figures: (x coords, y coords, values indexed [x, y])
    grid: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    grid_names: tuple[str, str] | None = None

    @property
    def is_contour(self) -> bool:
        return self.grid is not None


def _sigma_axis() -> np.ndarray:
    return AxisSpec("sigma", -1.0, 1.0, 2001).values()


def _curve(params, g_eff, observable, label, *, x_name="sigma", x=None, sigma=0.0, xi=0.0, phi=0.0):
    steady = pinned_coupling(g_eff)
    x = _sigma_axis() if x is None else x
    args = {"sigma": sigma * params.omega_b, "xi": xi, "phi": phi}
    args[x_name] = x * params.omega_b if x_name == "sigma" else x
    y = evaluate_observable(params, steady, observable, args["sigma"], args["xi"], args["phi"])
    return Curve(label, x, np.broadcast_to(y, x.shape).copy())


def _absorption_couplings(params, g_on, which):
    no_g2 = params.with_(coupling_gamma_2=0.0)
    options = {
        "G=0,G2=0": (no_g2, 0.0),
        "G!=0,G2=0": (no_g2, g_on),
        "G=0,G2!=0": (params, 0.0),
        "G!=0,G2!=0": (params, g_on),
    }
    return [_curve(p, g, Observable.ABSORPTION, label) for label, (p, g) in options.items() if label in which]


def _phase_family(params, g_eff, observable):
    curves = [_curve(params, g_eff, observable, "xi=0")]
    for name, phi in PHASES:
        curves.append(_curve(params, g_eff, observable, f"xi=1,phi={name}", xi=1.0, phi=phi))
    return curves


def _ratio_family(params, g_eff, phi):
    return [_curve(params, g_eff, Observable.ABSORPTION, f"xi={xi:g}", xi=xi, phi=phi) for xi in RATIOS]


def _interference(params, g_eff, sigma, phi):
    xi = np.linspace(0.0, 1.0, 501)
    return [
        _curve(params, g_eff, obs, label, x_name="xi", x=xi, sigma=sigma, phi=phi)
        for label, obs in (
            ("|T_p|^2", Observable.INTENSITY),
            ("|T_m|^2", Observable.T_M_INTENSITY),
            ("|T_ph|^2", Observable.T_PH_INTENSITY),
        )
    ]


def _contour(params, g_eff, sigma):
    phi = np.linspace(0.0, 2 * math.pi, 181)
    xi = np.linspace(0.0, 2.0, 101)
    pp, xx = np.meshgrid(phi, xi, indexing="ij")
    z = evaluate_observable(params, pinned_coupling(g_eff), Observable.ABSORPTION, sigma * params.omega_b, xx, pp)
    return phi, xi, z


FIGURE_IDS = (
    "2a", "2b", "2c", "3a", "3b", "4a", "4b", "4c", "4d", "5a", "5b",
    "6a", "6b", "6c", "7a", "7b", "8a", "8b", "8c", "8d", "9",
)  # fmt: skip


def build_figure(fig_id: str, params: SystemParams | None = None, g_eff: complex | None = None) -> FigureData:
    """Data for one figure panel.

    ``g_eff`` is the coupling used where G_mb is switched on; it defaults to
    0.32 omega_b. The delay figure also pins both magnon-photon couplings to
    0.18 omega_b.
    """
    if fig_id not in FIGURE_IDS:
        raise KeyError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURE_IDS)}")
    params = SystemParams() if params is None else params
    wb = params.omega_b
    g_on = FIG_G_MB * wb if g_eff is None else g_eff
    absorption = ("sigma", "absorption")

    if fig_id == "2a":
        return FigureData(fig_id, "absorption, single probe", *absorption,
                          _absorption_couplings(params, g_on, ("G=0,G2=0", "G!=0,G2=0", "G=0,G2!=0", "G!=0,G2!=0")))
    if fig_id == "2b":
        return FigureData(fig_id, "absorption, G_mb on, Gamma_2 = 0", *absorption,
                          _absorption_couplings(params, g_on, ("G!=0,G2=0",)))
    if fig_id == "2c":
        return FigureData(fig_id, "absorption, G_mb = 0, Gamma_2 on", *absorption,
                          _absorption_couplings(params, g_on, ("G=0,G2!=0",)))
    if fig_id in ("3a", "3b"):
        g = 0.0 if fig_id == "3a" else g_on
        return FigureData(fig_id, "absorption vs relative phase", *absorption,
                          _phase_family(params, g, Observable.ABSORPTION))
    if fig_id[0] == "4":
        name, phi = PHASES["abcd".index(fig_id[1])]
        return FigureData(fig_id, f"absorption vs ratio, phi={name}", *absorption, _ratio_family(params, g_on, phi))
    if fig_id[0] == "5":
        name, phi = PHASES[0] if fig_id == "5a" else PHASES[2]
        return FigureData(fig_id, f"absorption vs ratio, G_mb = 0, phi={name}", *absorption,
                          _ratio_family(params, 0.0, phi))
    if fig_id[0] == "6":
        g, sigma = {"6a": (0.0, 0.0), "6b": (g_on, 0.0), "6c": (g_on, 0.49)}[fig_id]
        data = FigureData(fig_id, f"absorption at sigma={sigma:g} omega_b", "phi", "absorption")
        data.grid = _contour(params, g, sigma)
        data.grid_names = ("phi", "xi")
        return data
    if fig_id in ("7a", "7b"):
        g = 0.0 if fig_id == "7a" else g_on
        return FigureData(fig_id, "transmission vs relative phase", "sigma", "intensity",
                          _phase_family(params, g, Observable.INTENSITY))
    if fig_id[0] == "8":
        g, sigma, phi = {
            "8a": (0.0, 0.0, 0.0),
            "8b": (0.0, 0.0, math.pi),
            "8c": (g_on, 0.49, 0.0),
            "8d": (g_on, 0.49, math.pi),
        }[fig_id]
        return FigureData(fig_id, f"interference at sigma={sigma:g} omega_b, phi={phi:.4g}", "xi", "intensity",
                          _interference(params, g, sigma, phi))
    # fig 9
    p9 = params.with_(coupling_gamma_1=FIG9_GAMMA * wb, coupling_gamma_2=FIG9_GAMMA * wb)
    curves = [
        _curve(p9, g_on, Observable.GROUP_DELAY, f"phi={name}", xi=1.0, phi=phi) for name, phi in PHASES
    ]
    return FigureData(fig_id, "group delay", "sigma", "tau_g_seconds", curves)


def figure_rows(data: FigureData, omega_b: float):
    """Column names and rows for the figure's CSV table."""
    if data.is_contour:
        x, y, z = data.grid
        header = [*data.grid_names, data.y_name]
        rows = [[x[i], y[j], z[i, j]] for i in range(len(x)) for j in range(len(y))]
        return header, rows
    if data.x_name == "sigma":
        header = ["curve", "sigma_over_omega_b", "sigma_rad_s", data.y_name]
        rows = [[c.label, xv, xv * omega_b, yv] for c in data.curves for xv, yv in zip(c.x, c.y)]
    else:
        header = ["curve", data.x_name, data.y_name]
        rows = [[c.label, xv, yv] for c in data.curves for xv, yv in zip(c.x, c.y)]
    return header, rows
