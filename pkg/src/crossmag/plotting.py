"""Figure rendering to SVG files with matplotlib's non-interactive backend."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .figures import Curve, FigureData  # noqa: E402

# fixed ids and no timestamp, so repeated renders are byte-identical
plt.rcParams.update({"svg.hashsalt": "crossmag", "font.size": 10, "figure.dpi": 100})
_SVG_META = {"Date": None, "Creator": "crossmag"}

AXIS_LABELS = {
    "sigma": r"$\sigma/\omega_b$",
    "phi": r"$\phi$ (rad)",
    "xi": r"$\xi$",
    "absorption": r"$\chi_r$",
    "dispersion": r"$\chi_i$",
    "intensity": r"$|T|^2$",
    "t_m_intensity": r"$|T_m|^2$",
    "t_ph_intensity": r"$|T_{ph}|^2$",
    "group_delay": r"$\tau_g$ ($\mu$s)",
    "tau_g_seconds": r"$\tau_g$ ($\mu$s)",
}


def _label(name: str) -> str:
    return AXIS_LABELS.get(name, name)


def render_figure(data: FigureData, path: Path | str) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if data.is_contour:
        x, y, z = data.grid
        mesh = ax.pcolormesh(x, y, z.T, shading="auto", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=_label(data.y_name))
        ax.set_xlabel(_label(data.grid_names[0]))
        ax.set_ylabel(_label(data.grid_names[1]))
    else:
        # delays are stored in seconds and drawn in microseconds
        scale = 1e6 if data.y_name in ("tau_g_seconds", "group_delay") else 1.0
        for curve in data.curves:
            ax.plot(curve.x, curve.y * scale, lw=1.2, label=curve.label)
        ax.set_xlabel(_label(data.x_name))
        ax.set_ylabel(_label(data.y_name))
        if len(data.curves) > 1:
            ax.legend(fontsize=8, frameon=False)
    ax.set_title(f"{data.fig_id}: {data.title}" if data.fig_id else data.title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def render_series(x, series: dict, x_name: str, y_name: str, title: str, path: Path | str) -> Path:
    """Quick line plot for CLI spectra: ``series`` maps labels to y arrays."""
    data = FigureData("", title, x_name, y_name)
    data.curves = [Curve(label, x, y) for label, y in series.items()]
    return render_figure(data, path)
