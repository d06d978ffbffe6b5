"""Run configuration: JSON schema, defaults, physics checks and dotted overrides.

A config is a JSON object with one ``command`` plus the parameter blocks that
command needs. :func:`resolve` fills every default so the recorded config is
complete, and :func:`validate` returns a list of ``(field.path, message)``
diagnostics instead of raising.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

import jsonschema

COMMANDS = ("linear", "transient", "sweep", "dispersion", "tmm", "fit")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_oscillator = _obj({"amplitude": _nonneg, "center": _pos, "width": _pos}, ["amplitude", "center", "width"])

_index = {
    "oneOf": [
        {"type": "number", "minimum": 1},
        _obj({"n": {"type": "number", "exclusiveMinimum": 0}, "k": _nonneg}, ["n"]),
    ]
}

_layer = _obj({"thickness": _pos, "index": _index}, ["thickness", "index"])

_mirror = {
    "oneOf": [
        _obj(
            {
                "kind": {"const": "quarter_wave"},
                "n_high": {"type": "number", "minimum": 1},
                "n_low": {"type": "number", "minimum": 1},
                "pairs": {"type": "integer", "minimum": 1},
                "center": _pos,
                "high_first": {"type": "boolean"},
            },
            ["kind"],
        ),
        _obj({"kind": {"const": "layers"}, "layers": {"type": "array", "items": _layer, "minItems": 1}}, ["kind", "layers"]),
        _obj(
            {
                "kind": {"const": "sheet"},
                "reflectivity": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "transmission": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
                "phase": _num,
            },
            ["kind", "reflectivity"],
        ),
    ]
}

_range_or_list = {
    "oneOf": [
        {"type": "array", "items": _num, "minItems": 1},
        _obj({"start": _num, "stop": _num, "step": _pos}, ["start", "stop", "step"]),
    ]
}

CONFIG_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "polariton-engine run configuration",
    **_obj(
        {
            "command": {"enum": list(COMMANDS)},
            "seed": {"type": "integer", "minimum": 0},
            "grid": _obj({"nu_min": _pos, "nu_max": _pos, "step": _pos}),
            "qm": _obj(
                {
                    "omega0": _pos,
                    "omega_c": _pos,
                    "anh": _num,
                    "gN": _nonneg,
                    "delta": {"type": "number", "exclusiveMinimum": -1},
                    "kappa": _pos,
                    "gamma_m": _nonneg,
                    "f_pu": {"type": "number", "minimum": 0, "maximum": 0.5},
                }
            ),
            "dielectric": _obj(
                {"n_bg": {"type": "number", "minimum": 1}, "oscillators": {"type": "array", "items": _oscillator}}
            ),
            "cavity": _obj(
                {
                    "length": _pos,
                    "r_mirror": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                    "t_mirror": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
                    "phase": _num,
                    "n_c": {"type": "number", "minimum": 1},
                }
            ),
            "stack": _obj(
                {
                    "ambient": _index,
                    "substrate": {"oneOf": [{"type": "null"}, _index]},
                    "mirror": _mirror,
                    "spacer": _pos,
                    "polarization": {"enum": ["s", "p"]},
                    "theta": {"type": "number", "minimum": 0, "exclusiveMaximum": 90},
                    "thetas": {"oneOf": [{"type": "null"}, _range_or_list]},
                    "nu01": {"type": ["number", "null"], "exclusiveMinimum": 0},
                }
            ),
            "linear": _obj({"model": {"enum": ["quantum", "fabry_perot", "stack"]}}),
            "transient": _obj({"model": {"enum": ["quantum", "fabry_perot", "stack"]}}),
            "sweep": _obj(
                {
                    "model": {"enum": ["quantum", "classical", "both"]},
                    "optics": {"enum": ["fabry_perot", "stack"]},
                    "detunings": {"type": "array", "items": _num, "minItems": 1},
                    "lp_targets": {"type": ["array", "null"], "items": _pos},
                }
            ),
            "dispersion": _obj(
                {"e_vib": _pos, "g0": _nonneg, "e0": _pos, "n_c": {"type": "number", "minimum": 1}, "thetas": _range_or_list}
            ),
            "fit": _obj(
                {
                    "target": {"enum": ["lorentz", "dispersion"]},
                    "observations": {"type": ["string", "null"]},
                    "channel": {"type": "string"},
                    "pathlength": _pos,
                    "initial": {"type": ["array", "null"], "items": _num},
                    "truth": {"type": ["array", "null"], "items": _num},
                    "thetas": _range_or_list,
                    "noise": _obj(
                        {"kind": {"enum": ["none", "multiplicative", "uniform", "gaussian"]}, "level": _nonneg}
                    ),
                    "max_iter": {"type": "integer", "minimum": 1},
                }
            ),
        },
        ["command"],
    ),
}

DEFAULTS: dict = {
    "seed": 0,
    "grid": {"nu_min": 1900.0, "nu_max": 2060.0, "step": 0.05},
    "qm": {
        "omega0": 1983.0,
        "omega_c": 1983.0,
        "anh": 7.5,
        "gN": 18.5,
        "delta": -0.25,
        "kappa": 10.0,
        "gamma_m": 3.0,
        "f_pu": 0.0,
    },
    "dielectric": {"n_bg": 1.375, "oscillators": [{"amplitude": 2600.0, "center": 1983.0, "width": 3.0}]},
    "cavity": {"length": 2.5e-3, "r_mirror": 0.96, "t_mirror": None, "phase": 0.0, "n_c": 1.375},
    "stack": {
        "ambient": 1.4,
        "substrate": None,
        "mirror": {"kind": "quarter_wave", "n_high": 4.0, "n_low": 2.0, "pairs": 3, "center": 1983.0, "high_first": False},
        "spacer": 2.6377328852373854e-3,
        "polarization": "s",
        "theta": 0.0,
        "thetas": None,
        "nu01": None,
    },
    "linear": {"model": "quantum"},
    "transient": {"model": "quantum"},
    "sweep": {"model": "quantum", "optics": "fabry_perot", "detunings": [-8.0, -2.0, 3.0, 8.0], "lp_targets": None},
    "dispersion": {"e_vib": 1983.0, "g0": 18.5, "e0": 1932.0, "n_c": 1.375, "thetas": {"start": 0.0, "stop": 40.0, "step": 1.0}},
    "fit": {
        "target": "lorentz",
        "observations": None,
        "channel": "absorbance",
        "pathlength": 1e-3,
        "initial": None,
        "truth": None,
        "thetas": {"start": 0.0, "stop": 40.0, "step": 2.0},
        "noise": {"kind": "none", "level": 0.0},
        "max_iter": 200,
    },
}

_OPTICS_BLOCKS = {"quantum": (), "fabry_perot": ("dielectric", "cavity"), "stack": ("dielectric", "stack")}


def command_blocks(merged: dict) -> tuple[str, ...]:
    """Parameter blocks a command actually reads (and so records in its sidecars)."""
    command = merged["command"]
    if command == "linear":
        model = merged["linear"]["model"]
        return ("grid", "linear") + (("qm",) if model == "quantum" else _OPTICS_BLOCKS[model])
    if command == "transient":
        return ("grid", "transient", "qm") + _OPTICS_BLOCKS[merged["transient"]["model"]]
    if command == "sweep":
        sw = merged["sweep"]
        extra = () if sw["model"] == "quantum" else _OPTICS_BLOCKS[sw["optics"]]
        return ("grid", "sweep", "qm") + extra
    if command == "dispersion":
        return ("dispersion",)
    if command == "tmm":
        return ("grid", "dielectric", "stack")
    return ("grid", "dielectric", "fit") if merged["fit"]["target"] == "lorentz" else ("fit",)


MAX_GRID_POINTS = 5_000_000


class ConfigError(ValueError):
    """Validation failure carrying ``(path, message)`` diagnostics."""

    def __init__(self, diagnostics: list[tuple[str, str]]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(f"{p}: {m}" for p, m in diagnostics))


def load(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([(str(path), f"cannot read config: {exc.strerror or exc}")]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([(str(path), f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")]) from exc
    if not isinstance(data, dict):
        raise ConfigError([(str(path), "top level must be a JSON object")])
    return data


def parse_override(item: str) -> tuple[str, object]:
    """``"qm.f_pu=0.05"`` -> ``("qm.f_pu", 0.05)``; values are JSON, falling back to a string."""
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError([(item, "override must look like key.path=value")])
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def apply_overrides(config: dict, overrides) -> dict:
    out = copy.deepcopy(config)
    for key, value in overrides:
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            if not isinstance(child, dict):
                raise ConfigError([(key, f"'{part}' is not an object")])
            node = child
        node[parts[-1]] = value
    return out


def _merge(defaults: dict, given: dict) -> dict:
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "mirror":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _mirror_defaults(mirror: dict) -> dict:
    if mirror.get("kind") == "quarter_wave":
        return _merge(DEFAULTS["stack"]["mirror"], mirror)
    if mirror.get("kind") == "sheet":
        return _merge({"transmission": None, "phase": 0.0}, mirror)
    return mirror


def _path(error: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in error.absolute_path) or "<root>"


def schema_errors(config: dict) -> list[tuple[str, str]]:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: (_path(e), e.message))
    out = []
    for e in errors:
        if e.validator == "oneOf" and e.context:
            out += _one_of_errors(e)
        else:
            out.append((_path(e), e.message))
    return out


def _one_of_errors(e: jsonschema.ValidationError) -> list[tuple[str, str]]:
    """Errors of the branch the instance was aiming at, instead of the generic oneOf message."""
    branches = e.validator_value
    kinds = [b.get("properties", {}).get("kind", {}).get("const") for b in branches]
    if isinstance(e.instance, dict) and any(kinds):
        kind = e.instance.get("kind")
        if kind not in kinds:
            return [(_path(e) + ".kind", f"{kind!r} is not one of {[k for k in kinds if k]}")]
        branch = kinds.index(kind)
        return [(_path(c), c.message) for c in e.context if c.relative_schema_path[0] == branch]
    best = max(e.context, key=lambda c: len(c.absolute_path))
    return [(_path(best), best.message)]


def resolve(config: dict) -> dict:
    """Defaults merged in, restricted to the blocks the command reads."""
    merged = _merge(DEFAULTS, config)
    if isinstance(merged["stack"].get("mirror"), dict):
        merged["stack"]["mirror"] = _mirror_defaults(merged["stack"]["mirror"])
    resolved = {"command": merged["command"], "seed": merged["seed"]}
    for block in sorted(command_blocks(merged)):
        resolved[block] = merged[block]
    return resolved


def expand_range(spec) -> list[float]:
    """A list of numbers, or ``{start, stop, step}`` with ``stop`` included when on the grid."""
    if isinstance(spec, dict):
        n = int(round((spec["stop"] - spec["start"]) / spec["step"]))
        values = [spec["start"] + i * spec["step"] for i in range(n + 1)]
        return [v for v in values if v <= spec["stop"] + 1e-9 * spec["step"]]
    return [float(v) for v in spec]


def physics_errors(cfg: dict, base_dir: Path | None = None) -> list[tuple[str, str]]:
    """Cross-field checks the schema cannot express. ``cfg`` must be resolved."""
    errs = []
    grid = cfg.get("grid")
    if grid is not None:
        if not grid["nu_min"] < grid["nu_max"]:
            errs.append(("grid.nu_max", "must exceed grid.nu_min"))
        elif (grid["nu_max"] - grid["nu_min"]) / grid["step"] > MAX_GRID_POINTS:
            errs.append(("grid.step", f"grid would exceed {MAX_GRID_POINTS} points"))
        elif (grid["nu_max"] - grid["nu_min"]) / grid["step"] < 2:
            errs.append(("grid.step", "grid needs at least 3 points"))
    qm = cfg.get("qm")
    if qm is not None and not qm["omega0"] - 2 * qm["anh"] > 0:
        errs.append(("qm.anh", "1->2 line omega0 - 2 anh must be positive"))
    cav = cfg.get("cavity")
    if cav is not None:
        t = cav["t_mirror"]
        if t is not None and cav["r_mirror"] + t > 1 + 1e-12:
            errs.append(("cavity.t_mirror", "r_mirror + t_mirror must not exceed 1"))
    stack = cfg.get("stack")
    if stack is not None:
        mirror = stack["mirror"]
        if mirror["kind"] == "sheet" and mirror["transmission"] is not None:
            if mirror["reflectivity"] + mirror["transmission"] > 1 + 1e-12:
                errs.append(("stack.mirror.transmission", "reflectivity + transmission must not exceed 1"))
        if isinstance(stack["ambient"], dict) and stack["ambient"].get("k", 0) > 0:
            errs.append(("stack.ambient.k", "the incidence medium must be lossless"))
        thetas = [stack["theta"]] + (expand_range(stack["thetas"]) if stack["thetas"] is not None else [])
        if any(not 0 <= t < 90 for t in thetas):
            errs.append(("stack.thetas", "angles must lie in [0, 90) degrees"))
    sweep = cfg.get("sweep")
    if sweep is not None and sweep["lp_targets"] is not None and qm is not None:
        if any(t >= qm["omega0"] for t in sweep["lp_targets"]):
            errs.append(("sweep.lp_targets", "lower-polariton targets must lie below qm.omega0"))
    disp = cfg.get("dispersion")
    if disp is not None:
        thetas = expand_range(disp["thetas"])
        if any(not 0 <= t < 90 for t in thetas):
            errs.append(("dispersion.thetas", "angles must lie in [0, 90) degrees"))
    fit = cfg.get("fit")
    if fit is not None:
        errs += _fit_errors(cfg, fit, base_dir)
    return errs


def _fit_errors(cfg, fit, base_dir):
    errs = []
    if fit["observations"] is not None:
        path = resolve_path(fit["observations"], base_dir)
        if not path.is_file():
            errs.append(("fit.observations", f"file not found: {path}"))
    elif fit["truth"] is None:
        errs.append(("fit.truth", "synthetic runs need generating parameters when no observations file is given"))
    if fit["target"] == "lorentz":
        for key in ("initial", "truth"):
            v = fit[key]
            if v is not None and (len(v) == 0 or len(v) % 3):
                errs.append((f"fit.{key}", "expects (amplitude, center, width) triples"))
        if fit["initial"] is None and not cfg["dielectric"]["oscillators"]:
            errs.append(("fit.initial", "no start values: give fit.initial or dielectric.oscillators"))
    else:
        for key in ("initial", "truth"):
            v = fit[key]
            if v is not None and len(v) != 4:
                errs.append((f"fit.{key}", "expects (g0, e_vib, e0, n_c)"))
        if len(set(expand_range(fit["thetas"]))) < 4 and fit["observations"] is None:
            errs.append(("fit.thetas", "need at least 4 distinct angles"))
    if fit["noise"]["kind"] != "none" and fit["observations"] is not None:
        errs.append(("fit.noise", "noise applies to synthetic data only"))
    return errs


def resolve_path(value: str, base_dir: Path | None) -> Path:
    path = Path(value)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return path


def validate(config: dict, base_dir: Path | None = None) -> tuple[dict | None, list[tuple[str, str]]]:
    """Schema then physics validation. Returns the resolved config (or None) and diagnostics."""
    errs = schema_errors(config)
    if errs:
        return None, errs
    resolved = resolve(config)
    errs = physics_errors(resolved, base_dir)
    return (None, errs) if errs else (resolved, [])


def load_and_validate(path, overrides=(), seed: int | None = None) -> dict:
    """Read, override, validate and resolve; raises :class:`ConfigError` with all diagnostics."""
    raw = apply_overrides(load(path), [parse_override(o) if isinstance(o, str) else o for o in overrides])
    if seed is not None:
        raw["seed"] = seed
    resolved, errs = validate(raw, Path(path).resolve().parent)
    if errs:
        raise ConfigError(errs)
    return resolved
