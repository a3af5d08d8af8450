"""Command-line front end: config loading, subcommand dispatch, CSV/JSON/SVG output."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, to_document
from .params import DetuningMode, ParameterError
from .steady import SteadyStateError, solve_steady_state
from .sweep import AxisSpec, Observable, SweepError, locate_extrema, run_sweep
from .transport import TauMethod, group_delay

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_VERIFICATION = 3

CSV_VERSION = "v1"
DELAY_COLUMNS = (
    "sigma_over_omega_b",
    "sigma_rad_s",
    "re_T_p",
    "im_T_p",
    "intensity",
    "tau_g_seconds",
    "singular_flag",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for validation here
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunManifest:
    """Provenance sidecar written next to every data file."""

    command: str
    argv: list[str]
    config: dict
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    outputs: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def write(self, path: Path) -> Path:
        payload = {
            "tool": "crossmag",
            "version": self.version,
            "timestamp": self.timestamp,
            "command": self.command,
            "argv": self.argv,
            "config": self.config,
            "outputs": self.outputs,
            "summary": self.summary,
        }
        path.write_text(json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n")
        return path


def _jsonable(obj):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _csv_text(header, rows, manifest_name: str) -> str:
    buf = io.StringIO()
    buf.write(f"# crossmag csv {CSV_VERSION}; manifest={manifest_name}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_table(header, rows) -> str:
    records = [dict(zip(header, (_jsonable(v.item() if hasattr(v, "item") else v) for v in row))) for row in rows]
    return json.dumps({"format": f"crossmag json {CSV_VERSION}", "columns": list(header), "rows": records},
                      indent=1, allow_nan=False) + "\n"


class Emitter:
    """Writes the data table, optional SVG and the manifest for one command."""

    def __init__(self, args, run: RunConfig, stem: str):
        self.out = Path(args.out)
        self.fmt = args.format
        self.stem = stem
        self.manifest = RunManifest(command=args.command, argv=list(args.argv), config=to_document(run))
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError(f"--out: cannot create {self.out}: {exc}") from None

    @property
    def manifest_name(self) -> str:
        return f"{self.stem}.manifest.json"

    def _write(self, name: str, text: str) -> Path:
        path = self.out / name
        try:
            path.write_text(text)
        except OSError as exc:
            raise OutputError(f"--out: cannot write {path}: {exc}") from None
        self.manifest.outputs.append(name)
        return path

    def table(self, header, rows) -> Path:
        if self.fmt == "json":
            return self._write(f"{self.stem}.json", _json_table(header, rows))
        return self._write(f"{self.stem}.csv", _csv_text(header, rows, self.manifest_name))

    def svg(self, render) -> Path:
        path = self.out / f"{self.stem}.svg"
        try:
            render(path)
        except OSError as exc:
            raise OutputError(f"--out: cannot write {path}: {exc}") from None
        self.manifest.outputs.append(path.name)
        return path

    def finish(self) -> Path:
        try:
            return self.manifest.write(self.out / self.manifest_name)
        except OSError as exc:
            raise OutputError(f"--out: cannot write manifest: {exc}") from None


class OutputError(Exception):
    pass


# -- argument parsing -------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, outputs: bool = True) -> None:
    p.add_argument("--config", metavar="PATH", help="TOML run configuration")
    p.add_argument("--mode", choices=[m.value for m in DetuningMode], help="drive detuning mode")
    p.add_argument("--gmb-override", type=float, metavar="X", help="pin |G_mb| to X omega_b")
    if outputs:
        p.add_argument("--out", default=".", metavar="DIR", help="output directory (default: .)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--svg", action="store_true", help="also render an SVG plot")


def _probe_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--xi", type=float, help="probe amplitude ratio (cavity 2 over cavity 1)")
    p.add_argument("--phi", type=float, help="relative probe phase in radians")
    p.add_argument("--sigma", type=float, help="probe detuning in units of omega_b (for non-sigma axes)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crossmag", description="Probe response of a cross-cavity magnomechanical system.")
    parser.add_argument("--version", action="version", version=f"crossmag {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("steady", help="print the steady state as JSON")
    _common(p, outputs=False)

    p = sub.add_parser("spectrum", help="1-D sweep of an observable")
    _common(p)
    _probe_flags(p)
    p.add_argument("--observable", choices=[o.value for o in Observable])
    p.add_argument("--axis", metavar="NAME:START:STOP:COUNT", help="sweep axis (sigma in omega_b units)")
    p.add_argument("--method", choices=[m.value for m in TauMethod], default=TauMethod.ANALYTIC.value)
    p.add_argument("--refine", action="store_true", help="refine extrema on the continuous observable")

    p = sub.add_parser("delay", help="transmission and group delay versus sigma")
    _common(p)
    _probe_flags(p)
    p.add_argument("--axis", metavar="sigma:START:STOP:COUNT", help="sigma axis in omega_b units")
    p.add_argument("--method", choices=[m.value for m in TauMethod], default=TauMethod.ANALYTIC.value)

    p = sub.add_parser("sweep2d", help="2-D sweep of an observable")
    _common(p)
    _probe_flags(p)
    p.add_argument("--observable", choices=[o.value for o in Observable])
    p.add_argument("--axis1", metavar="NAME:START:STOP:COUNT")
    p.add_argument("--axis2", metavar="NAME:START:STOP:COUNT")
    p.add_argument("--layout", choices=("long", "matrix"), default="long")
    p.add_argument("--method", choices=[m.value for m in TauMethod], default=TauMethod.ANALYTIC.value)

    p = sub.add_parser("verify", help="randomized oracle agreement check")
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--time-domain-draws", type=int, help="limit the slower time-domain leg")

    p = sub.add_parser("fig", help="regenerate a figure panel (CSV + SVG)")
    from .figures import FIGURE_IDS

    p.add_argument("figure", choices=FIGURE_IDS, metavar="ID", help=f"one of {' '.join(FIGURE_IDS)}")
    p.add_argument("--config", metavar="PATH", help="TOML run configuration")
    p.add_argument("--gmb-override", type=float, metavar="X", help="G_mb for the 'on' curves, units of omega_b")
    p.add_argument("--out", default=".", metavar="DIR")
    return parser


# -- configuration ----------------------------------------------------------


def _resolve(args) -> RunConfig:
    """Config file plus command-line overrides."""
    run = load_config(args.config) if getattr(args, "config", None) else load_config()
    params, probe, sweep = run
    changes = {}
    if getattr(args, "mode", None):
        changes["drive_detuning_mode"] = DetuningMode(args.mode)
    if getattr(args, "gmb_override", None) is not None and args.command != "fig":
        changes["g_mb_effective_override"] = complex(args.gmb_override * params.omega_b)
    if changes:
        try:
            params = params.with_(**changes)
        except ParameterError as exc:
            raise ConfigError(f"{exc.key}: {exc}") from None
    probe_changes = {}
    for name in ("xi", "phi"):
        if getattr(args, name, None) is not None:
            probe_changes[name] = getattr(args, name)
    if getattr(args, "sigma", None) is not None:
        probe_changes["sigma"] = args.sigma * params.omega_b
    try:
        probe = probe.with_(**probe_changes)
    except ParameterError as exc:
        raise ConfigError(f"--{exc.key}: {exc}") from None

    sweep_changes = {"fixed": probe}
    if getattr(args, "observable", None):
        sweep_changes["observable"] = Observable(args.observable)
    if getattr(args, "axis", None):
        sweep_changes["axis1"] = AxisSpec.parse(args.axis)
        sweep_changes["axis2"] = None
    if getattr(args, "axis1", None):
        sweep_changes["axis1"] = AxisSpec.parse(args.axis1)
    if getattr(args, "axis2", None):
        sweep_changes["axis2"] = AxisSpec.parse(args.axis2)
    sweep = replace(sweep, **sweep_changes)
    return RunConfig(params, probe, sweep)


def _axis_columns(axis: AxisSpec, omega_b: float, values):
    if axis.name == "sigma":
        return ["sigma_over_omega_b", "sigma_rad_s"], [(v, v * omega_b) for v in values]
    return [axis.name], [(v,) for v in values]


# -- subcommands ------------------------------------------------------------


def cmd_steady(args) -> int:
    run = _resolve(args)
    params = run.params
    steady = solve_steady_state(params)
    wb = params.omega_b
    rates = dict(zip(("kappa_x", "kappa_y", "kappa_m", "gamma_b"), params.rates))
    payload = {
        "mode": params.drive_detuning_mode.value,
        "steady_state": steady.to_dict(wb),
        "omega_b_rad_s": wb,
        "rates": {name: {"rad_s": v, "over_omega_b": v / wb} for name, v in rates.items()},
        "couplings": {
            name: {"rad_s": v, "over_omega_b": v / wb}
            for name, v in (("gamma_1", params.coupling_gamma_1), ("gamma_2", params.coupling_gamma_2))
        },
    }
    print(json.dumps(_jsonable(payload), indent=2, allow_nan=False))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    run = _resolve(args)
    spec = replace(run.sweep, axis2=None)
    steady = solve_steady_state(run.params)
    result = run_sweep(run.params, steady, spec, tau_method=args.method)
    extrema = locate_extrema(result, refine=True) if args.refine else result.extrema

    axis = spec.axis1
    x = result.coords[0]
    cols, lead = _axis_columns(axis, run.params.omega_b, x)
    header = [*cols, spec.observable.value, "node_error"]
    rows = [[*lead[i], result.values[i], bool(result.failed[i])] for i in range(len(x))]

    emit = Emitter(args, run, "spectrum")
    emit.table(header, rows)
    if args.svg:
        from .plotting import render_series

        emit.svg(lambda p: render_series(x, {spec.observable.value: result.values}, axis.name,
                                         spec.observable.value, "spectrum", p))
    emit.manifest.summary = {
        "extrema": [{"coordinate": e.coordinate, "value": e.value, "kind": e.kind} for e in extrema],
        "zero_crossings": list(result.zero_crossings),
        "failed_nodes": int(result.failed.sum()),
        "refined": bool(args.refine),
    }
    emit.finish()
    return EXIT_OK


def cmd_delay(args) -> int:
    run = _resolve(args)
    axis = AxisSpec.parse(args.axis) if args.axis else run.sweep.axis1
    if axis.name != "sigma":
        raise SweepError("delay: the axis must be sigma")
    params = run.params
    steady = solve_steady_state(params)
    x = axis.values()
    point = group_delay(params, steady, run.probe.with_(sigma=x * params.omega_b), args.method, check=False)
    t_p = np.asarray(point.t_p)
    rows = [
        [x[i], x[i] * params.omega_b, t_p[i].real, t_p[i].imag, abs(t_p[i]) ** 2, point.tau_g[i], bool(point.singular[i])]
        for i in range(len(x))
    ]
    emit = Emitter(args, run, "delay")
    emit.table(DELAY_COLUMNS, rows)
    if args.svg:
        from .plotting import render_series

        emit.svg(lambda p: render_series(x, {"tau_g": np.asarray(point.tau_g)}, "sigma", "tau_g_seconds",
                                         "group delay", p))
    emit.manifest.summary = {"singular_nodes": int(np.sum(point.singular)), "method": TauMethod(args.method).value}
    emit.finish()
    return EXIT_OK


def cmd_sweep2d(args) -> int:
    run = _resolve(args)
    spec = run.sweep
    if spec.axis2 is None:
        spec = replace(spec, axis2=AxisSpec("xi", 0.0, 2.0, 101) if spec.axis1.name != "xi" else AxisSpec(
            "phi", 0.0, 2 * math.pi, 181))
    steady = solve_steady_state(run.params)
    result = run_sweep(run.params, steady, spec, tau_method=args.method)
    a1, a2 = spec.axis1, spec.axis2
    x, y = result.coords
    wb = run.params.omega_b

    if args.layout == "matrix":
        header = [f"{a1.name}\\{a2.name}", *(_fmt(v) for v in y)]
        rows = [[x[i], *result.values[i]] for i in range(len(x))]
    else:
        c1, lead1 = _axis_columns(a1, wb, x)
        c2, lead2 = _axis_columns(a2, wb, y)
        header = [*c1, *c2, spec.observable.value, "node_error"]
        rows = [
            [*lead1[i], *lead2[j], result.values[i, j], bool(result.failed[i, j])]
            for i in range(len(x))
            for j in range(len(y))
        ]
    emit = Emitter(args, run, "sweep2d")
    emit.table(header, rows)
    if args.svg:
        from .figures import FigureData
        from .plotting import render_figure

        data = FigureData("", f"{spec.observable.value}", a1.name, spec.observable.value)
        data.grid = (x, y, result.values)
        data.grid_names = (a1.name, a2.name)
        emit.svg(lambda p: render_figure(data, p))
    emit.manifest.summary = {"failed_nodes": int(result.failed.sum()), "layout": args.layout}
    emit.finish()
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import oracle_triangle

    if args.draws < 1:
        raise UsageError("crossmag verify: error: --draws must be >= 1")
    report = oracle_triangle(args.draws, args.seed, args.time_domain_draws)
    print(json.dumps(_jsonable(report.to_dict()), indent=2))
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def cmd_fig(args) -> int:
    from .figures import FIG_G_MB, build_figure, figure_rows
    from .plotting import render_figure

    args.format = "csv"
    run = _resolve(args)
    params = run.params
    g_eff = None if args.gmb_override is None else args.gmb_override * params.omega_b
    data = build_figure(args.figure, params, g_eff)
    header, rows = figure_rows(data, params.omega_b)
    emit = Emitter(args, run, f"fig_{args.figure}")
    emit.table(header, rows)
    emit.svg(lambda p: render_figure(data, p))
    g_on = FIG_G_MB if args.gmb_override is None else args.gmb_override
    emit.manifest.summary = {"figure": args.figure, "g_eff_over_omega_b": g_on}
    emit.finish()
    return EXIT_OK


COMMANDS = {
    "steady": cmd_steady,
    "spectrum": cmd_spectrum,
    "delay": cmd_delay,
    "sweep2d": cmd_sweep2d,
    "verify": cmd_verify,
    "fig": cmd_fig,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.argv = argv
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ParameterError, SweepError, SteadyStateError, OutputError) as exc:
        print(f"crossmag: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
