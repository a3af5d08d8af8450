"""Grid evaluation of response observables and location of their extrema."""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .params import ProbeConfig, SystemParams
from .response import probe_response
from .steady import SteadyState
from .transport import TauMethod, group_delay, transmission

WORKERS_ENV = "CROSSMAG_WORKERS"
AXIS_NAMES = ("sigma", "phi", "xi")
DEFAULT_SIGMA_COUNT = 2001


class SweepError(ValueError):
    pass


class Observable(str, enum.Enum):
    ABSORPTION = "absorption"
    DISPERSION = "dispersion"
    INTENSITY = "intensity"
    T_M_INTENSITY = "t_m_intensity"
    T_PH_INTENSITY = "t_ph_intensity"
    GROUP_DELAY = "group_delay"


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis. ``sigma`` coordinates are in units of omega_b."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise SweepError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if int(self.count) != self.count or self.count < 2:
            raise SweepError(f"axis {self.name}: count must be an integer >= 2")
        if not self.start < self.stop:
            raise SweepError(f"axis {self.name}: start must be < stop")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))

    @classmethod
    def parse(cls, text: str) -> AxisSpec:
        """Parse ``name:start:stop:count``."""
        try:
            name, start, stop, count = text.split(":")
            return cls(name, float(start), float(stop), int(count))
        except ValueError as exc:
            if isinstance(exc, SweepError):
                raise
            raise SweepError(f"axis must look like name:start:stop:count, got {text!r}") from None


def default_sigma_axis() -> AxisSpec:
    return AxisSpec("sigma", -1.0, 1.0, DEFAULT_SIGMA_COUNT)


@dataclass(frozen=True)
class SweepSpec:
    axis1: AxisSpec = field(default_factory=default_sigma_axis)
    axis2: AxisSpec | None = None
    observable: Observable = Observable.ABSORPTION
    fixed: ProbeConfig = field(default_factory=ProbeConfig)

    def __post_init__(self):
        object.__setattr__(self, "observable", Observable(self.observable))
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise SweepError("axis names must differ in a 2-D sweep")

    @property
    def axes(self) -> tuple[AxisSpec, ...]:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)


@dataclass(frozen=True)
class Extremum:
    coordinate: float
    value: float
    kind: str  # "min" or "max"


@dataclass
class SweepResult:
    spec: SweepSpec
    coords: tuple[np.ndarray, ...]
    values: np.ndarray
    failed: np.ndarray
    extrema: list[Extremum] = field(default_factory=list)
    zero_crossings: list[float] = field(default_factory=list)
    evaluate: Callable | None = field(default=None, repr=False, compare=False)


def evaluate_observable(
    params: SystemParams,
    steady: SteadyState,
    observable: Observable | str,
    sigma,
    xi,
    phi,
    *,
    tau_method: TauMethod | str = TauMethod.ANALYTIC,
) -> np.ndarray:
    """Observable on broadcast arrays of (sigma [rad/s], xi, phi); failed nodes are NaN."""
    observable = Observable(observable)
    probe = ProbeConfig(phi=phi, xi=xi, sigma=sigma)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if observable in (Observable.ABSORPTION, Observable.DISPERSION):
            eps = probe_response(params, steady, probe, check=False).eps_T
            out = np.real(eps) if observable is Observable.ABSORPTION else np.imag(eps)
        elif observable is Observable.GROUP_DELAY:
            out = group_delay(params, steady, probe, tau_method, check=False).tau_g
        else:
            point = transmission(params, steady, probe, check=False)
            t_p = point.t_p
            part = {
                Observable.INTENSITY: t_p,
                # T_m carries no xi/phi dependence; match the grid shape
                Observable.T_M_INTENSITY: np.broadcast_to(point.t_m, np.shape(t_p)),
                Observable.T_PH_INTENSITY: np.broadcast_to(point.t_ph, np.shape(t_p)),
            }[observable]
            out = np.abs(part) ** 2
    out = np.asarray(out, dtype=float)
    return np.where(np.isfinite(out), out, np.nan)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _node_function(params, steady, spec: SweepSpec, tau_method):
    """Map axis coordinates (sigma in omega_b units) to observable values."""
    names = [a.name for a in spec.axes]

    def f(*coords):
        probe = {"sigma": spec.fixed.sigma, "xi": spec.fixed.xi, "phi": spec.fixed.phi}
        for name, c in zip(names, coords):
            probe[name] = np.asarray(c) * params.omega_b if name == "sigma" else np.asarray(c)
        return evaluate_observable(
            params, steady, spec.observable, probe["sigma"], probe["xi"], probe["phi"], tau_method=tau_method
        )

    return f


def run_sweep(
    params: SystemParams,
    steady: SteadyState,
    spec: SweepSpec,
    *,
    workers: int | None = None,
    tau_method: TauMethod | str = TauMethod.ANALYTIC,
) -> SweepResult:
    """Evaluate ``spec.observable`` on every grid node.

    The steady state is computed once by the caller and shared by all nodes.
    Nodes that fail (degenerate response, transmission zero for the delay)
    are marked in ``failed`` and hold NaN.
    """
    coords = tuple(axis.values() for axis in spec.axes)
    mesh = np.meshgrid(*coords, indexing="ij")
    flat = [m.ravel() for m in mesh]
    f = _node_function(params, steady, spec, tau_method)

    workers = worker_count() if workers is None else max(1, workers)
    chunks = np.array_split(np.arange(flat[0].size), workers)
    if workers == 1:
        parts = [f(*flat)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda idx: f(*(c[idx] for c in flat)), chunks))
    values = np.concatenate(parts).reshape(mesh[0].shape)
    failed = np.isnan(values)

    result = SweepResult(spec=spec, coords=coords, values=values, failed=failed, evaluate=f)
    if spec.axis2 is None:
        result.extrema = locate_extrema(result, refine=False)
        result.zero_crossings = locate_zero_crossings(result)
    return result


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float, max_iter: int = 200) -> float:
    """Minimizer of a unimodal ``f`` on [a, b] to absolute tolerance ``tol``."""
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def locate_extrema(result: SweepResult, refine: bool = True, tol: float = 1e-6) -> list[Extremum]:
    """Interior extrema of a 1-D sweep.

    Discrete extrema come from sign changes of the first differences. With
    ``refine`` each is polished by golden-section search on the continuous
    observable inside its two neighbouring grid cells, to ``tol`` in axis
    units (1e-6 omega_b for a sigma axis).
    """
    if result.values.size == 0:
        raise SweepError("empty sweep grid")
    if result.values.ndim != 1:
        raise SweepError("extrema are located on 1-D sweeps only")
    x = result.coords[0]
    y = result.values
    d = np.diff(y)
    found = []
    for i in range(1, len(y) - 1):
        left, right = d[i - 1], d[i]
        if not (np.isfinite(left) and np.isfinite(right)):
            continue
        if left < 0 and right > 0:
            kind = "min"
        elif left > 0 and right < 0:
            kind = "max"
        else:
            continue
        coord, value = float(x[i]), float(y[i])
        if refine and result.evaluate is not None:
            sign = 1.0 if kind == "min" else -1.0

            def g(c):
                v = float(result.evaluate(c))
                return sign * v if math.isfinite(v) else math.inf

            coord = golden_section(g, float(x[i - 1]), float(x[i + 1]), tol)
            value = float(result.evaluate(coord))
        found.append(Extremum(coord, value, kind))
    return found


def locate_zero_crossings(result: SweepResult) -> list[float]:
    """Coordinates where a 1-D observable changes sign, by linear interpolation."""
    x = result.coords[0]
    y = result.values
    out = []
    for i in range(len(y) - 1):
        y0, y1 = y[i], y[i + 1]
        if not (np.isfinite(y0) and np.isfinite(y1)):
            continue
        if y0 == 0:
            out.append(float(x[i]))
        elif y0 * y1 < 0:
            out.append(float(x[i] - y0 * (x[i + 1] - x[i]) / (y1 - y0)))
    if len(y) and y[-1] == 0:
        out.append(float(x[-1]))
    return out
