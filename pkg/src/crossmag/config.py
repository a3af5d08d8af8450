"""Structured run configuration (TOML) for parameters, probe and sweep."""
from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, NamedTuple

import jsonschema
import tomli
import tomli_w

from .params import DetuningMode, ParameterError, ProbeConfig, SystemParams, amplitude_ratio
from .sweep import AxisSpec, SweepError, SweepSpec

# (section, config key) -> SystemParams field, for keys that carry a frequency
FREQUENCY_KEYS = {
    ("modes", "omega_cavity_1"): "omega_cavity_1",
    ("modes", "omega_cavity_2"): "omega_cavity_2",
    ("modes", "omega_b"): "omega_b",
    ("damping", "kappa_x"): "kappa_x",
    ("damping", "kappa_y"): "kappa_y",
    ("damping", "kappa_m"): "kappa_m",
    ("damping", "gamma_b"): "gamma_b",
    ("couplings", "gamma_1"): "coupling_gamma_1",
    ("couplings", "gamma_2"): "coupling_gamma_2",
    ("couplings", "g_mb"): "g_mb",
    ("drive", "gyromagnetic_ratio"): "gyromagnetic_ratio",
}
PLAIN_KEYS = {
    ("modes", "bias_field"): "bias_field",
    ("drive", "drive_field"): "drive_field",
    ("drive", "temperature"): "temperature",
    ("material", "spin_density"): "spin_density",
    ("material", "sphere_diameter"): "sphere_diameter",
}
FIELD_PATHS = {v: f"{s}.{k}" for (s, k), v in {**FREQUENCY_KEYS, **PLAIN_KEYS}.items()}
FIELD_PATHS.update(
    drive_detuning_mode="drive.detuning_mode",
    g_mb_effective_override="couplings.g_mb_effective_override",
    xi="probe.xi",
    sigma="probe.sigma",
)


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


class RunConfig(NamedTuple):
    params: SystemParams
    probe: ProbeConfig
    sweep: SweepSpec


def schema() -> dict:
    return json.loads(resources.files("crossmag").joinpath("config_schema.json").read_text())


def _validate(doc: Mapping[str, Any]) -> None:
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {err.message}")


def _exclusive(section: Mapping, a: str, b: str, name: str) -> None:
    if a in section and b in section:
        raise ConfigError(f"{name}.{b}: conflicts with {name}.{a}")


def _read(source) -> dict:
    if isinstance(source, Mapping):
        return dict(source)
    path = Path(source)
    try:
        with path.open("rb") as fh:
            return tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"<document>: malformed TOML in {path}: {exc}") from None


def load_config(source=None) -> RunConfig:
    """Load and validate a run configuration.

    ``source`` is a path to a TOML file, an already-parsed mapping, or None
    for the built-in defaults. Frequencies are converted to rad/s here, once.
    """
    doc = _read(source) if source is not None else {}
    _validate(doc)
    scale = 2 * math.pi if doc.get("frequency_units", "hz") == "hz" else 1.0

    fields: dict[str, Any] = {}
    for (section, key), name in FREQUENCY_KEYS.items():
        if key in doc.get(section, {}):
            fields[name] = doc[section][key] * scale
    for (section, key), name in PLAIN_KEYS.items():
        if key in doc.get(section, {}):
            fields[name] = doc[section][key]

    damping = doc.get("damping", {})
    couplings = doc.get("couplings", {})
    drive = doc.get("drive", {})
    probe_doc = doc.get("probe", {})
    _exclusive(damping, "gamma_b", "gamma_b_over_omega_b", "damping")
    _exclusive(couplings, "g_mb_effective_override", "g_mb_effective_override_over_omega_b", "couplings")
    _exclusive(probe_doc, "sigma", "sigma_over_omega_b", "probe")
    _exclusive(probe_doc, "xi", "power_x", "probe")
    _exclusive(probe_doc, "xi", "power_y", "probe")

    omega_b = fields.get("omega_b", SystemParams.omega_b)
    if "gamma_b_over_omega_b" in damping:
        fields["gamma_b"] = damping["gamma_b_over_omega_b"] * omega_b
    elif "gamma_b" not in fields and "omega_b" in fields:
        # the default phonon linewidth is tied to omega_b
        fields["gamma_b"] = 1e-5 * omega_b
    if "g_mb_effective_override" in couplings:
        value = couplings["g_mb_effective_override"]
        if isinstance(value, Mapping):
            value = complex(value["re"], value["im"])
        fields["g_mb_effective_override"] = value * scale
    elif "g_mb_effective_override_over_omega_b" in couplings:
        fields["g_mb_effective_override"] = couplings["g_mb_effective_override_over_omega_b"] * omega_b
    if "detuning_mode" in drive:
        fields["drive_detuning_mode"] = DetuningMode(drive["detuning_mode"])

    try:
        params = SystemParams(**fields)
    except ParameterError as exc:
        raise ConfigError(f"{FIELD_PATHS.get(exc.key, exc.key)}: {exc}") from None

    probe_fields: dict[str, Any] = {}
    if "phi" in probe_doc:
        probe_fields["phi"] = probe_doc["phi"]
    if "sigma" in probe_doc:
        probe_fields["sigma"] = probe_doc["sigma"] * scale
    elif "sigma_over_omega_b" in probe_doc:
        probe_fields["sigma"] = probe_doc["sigma_over_omega_b"] * params.omega_b
    if "xi" in probe_doc:
        probe_fields["xi"] = probe_doc["xi"]
    elif "power_x" in probe_doc or "power_y" in probe_doc:
        if not ("power_x" in probe_doc and "power_y" in probe_doc):
            raise ConfigError("probe.power_x: power_x and power_y must be given together")
        try:
            probe_fields["xi"] = amplitude_ratio(probe_doc["power_x"], probe_doc["power_y"], params)
        except ParameterError as exc:
            raise ConfigError(f"probe.{exc.key}: {exc}") from None
    try:
        probe = ProbeConfig(**probe_fields)
    except ParameterError as exc:
        raise ConfigError(f"probe.{exc.key}: {exc}") from None

    sweep_doc = doc.get("sweep", {})
    try:
        sweep_fields: dict[str, Any] = {"fixed": probe}
        if "axis1" in sweep_doc:
            sweep_fields["axis1"] = AxisSpec(**sweep_doc["axis1"])
        if "axis2" in sweep_doc:
            sweep_fields["axis2"] = AxisSpec(**sweep_doc["axis2"])
        if "observable" in sweep_doc:
            sweep_fields["observable"] = sweep_doc["observable"]
        sweep = SweepSpec(**sweep_fields)
    except SweepError as exc:
        raise ConfigError(f"sweep: {exc}") from None
    return RunConfig(params, probe, sweep)


def _axis_dict(axis: AxisSpec) -> dict:
    return {"name": axis.name, "start": axis.start, "stop": axis.stop, "count": int(axis.count)}


def to_document(run: RunConfig) -> dict:
    """Configuration document in angular units that reloads to identical values."""
    params, probe, sweep = run
    doc: dict[str, Any] = {"frequency_units": "rad/s"}
    for (section, key), name in {**FREQUENCY_KEYS, **PLAIN_KEYS}.items():
        value = getattr(params, name)
        if value is not None:
            doc.setdefault(section, {})[key] = value
    doc.setdefault("drive", {})["detuning_mode"] = params.drive_detuning_mode.value
    if params.g_mb_effective_override is not None:
        g = params.g_mb_effective_override
        doc["couplings"]["g_mb_effective_override"] = {"re": g.real, "im": g.imag}
    doc["probe"] = {"phi": float(probe.phi), "xi": float(probe.xi), "sigma": float(probe.sigma)}
    sweep_doc: dict[str, Any] = {"observable": sweep.observable.value, "axis1": _axis_dict(sweep.axis1)}
    if sweep.axis2 is not None:
        sweep_doc["axis2"] = _axis_dict(sweep.axis2)
    doc["sweep"] = sweep_doc
    return doc


def dump_config(run: RunConfig) -> str:
    return tomli_w.dumps(to_document(run))
