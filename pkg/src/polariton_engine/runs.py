"""Config-driven runs: build model objects from a resolved config and render artifacts.

Every ``run_*`` function is pure: it takes a resolved config and returns a
list of :class:`Artifact` (file name, text, one-line summary). Writing is
left to the caller so a failed run leaves nothing on disk.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .config import expand_range, resolve_path
from .dielectric import DielectricModel, LorentzOscillator
from .fabry_perot import CavityGeometry, fp_transmission
from .fitting import absorbance, dispersion_model, fit_dispersion, fit_lorentz
from .polariton_model import dispersion_curve
from .pump_probe import (
    TransientScenario,
    classical_transient,
    detuning_for_lp,
    detuning_sweep,
    extract_features,
    quantum_transient,
)
from .quantum_model import QmParams, linear_transmission
from .spectrum import Spectrum, find_peaks, make_grid
from .transfer_matrix import Layer, LayerStack, Mirror, microcavity, polariton_absorption_vs_angle, quarter_wave_mirror, tra


@dataclass
class Artifact:
    name: str
    text: str
    summary: str
    sidecar: bool = True


# ---------------------------------------------------------------------------
# builders


def build_grid(cfg: dict) -> np.ndarray:
    g = cfg["grid"]
    return make_grid(g["nu_min"], g["nu_max"], g["step"])


def build_qm(cfg: dict) -> QmParams:
    return QmParams(**cfg["qm"])


def build_medium(cfg: dict) -> DielectricModel:
    d = cfg["dielectric"]
    return DielectricModel(d["n_bg"], tuple(LorentzOscillator(**o) for o in d["oscillators"]))


def build_cavity(cfg: dict) -> CavityGeometry:
    return CavityGeometry(**cfg["cavity"])


def _index(spec) -> complex | float:
    if spec is None or isinstance(spec, (int, float)):
        return spec if spec is None else float(spec)
    return complex(spec["n"], spec.get("k", 0.0))


def build_mirror(spec: dict) -> list:
    if spec["kind"] == "quarter_wave":
        return quarter_wave_mirror(spec["n_high"], spec["n_low"], spec["pairs"], spec["center"], spec["high_first"])
    if spec["kind"] == "layers":
        return [Layer(lay["thickness"], _index(lay["index"])) for lay in spec["layers"]]
    return [Mirror(spec["reflectivity"], spec["transmission"], spec["phase"])]


def build_stack(cfg: dict, medium=None) -> LayerStack:
    s = cfg["stack"]
    medium = build_medium(cfg) if medium is None else medium
    mirror = build_mirror(s["mirror"])
    ambient = _index(s["ambient"])
    if s["mirror"]["kind"] == "sheet":
        # a sheet mirror sits inside the spacer's background index
        mirror = [Mirror(m.reflectivity, m.transmission, m.phase, index=medium.n_bg) for m in mirror]
    return microcavity(
        medium,
        s["spacer"],
        mirror,
        ambient=ambient,
        substrate=_index(s["substrate"]),
        polarization=s["polarization"],
        theta=s["theta"],
    )


def _nu01(cfg: dict) -> float:
    if cfg.get("stack", {}).get("nu01") is not None:
        return cfg["stack"]["nu01"]
    if "qm" in cfg:
        return cfg["qm"]["omega0"]
    osc = cfg["dielectric"]["oscillators"]
    if not osc:
        raise ValueError("no vibrational line to reference: set stack.nu01 or add an oscillator")
    return max(osc, key=lambda o: o["amplitude"])["center"]


def _fmt(x) -> str:
    return "nan" if x is None or not np.isfinite(x) else f"{x:.3f}"


# ---------------------------------------------------------------------------
# commands


def run_linear(cfg: dict) -> list[Artifact]:
    grid = build_grid(cfg)
    model = cfg["linear"]["model"]
    if model == "quantum":
        spec = linear_transmission(build_qm(cfg).with_(f_pu=0.0), grid)
    elif model == "fabry_perot":
        spec = fp_transmission(build_cavity(cfg), build_medium(cfg), grid)
    else:
        spec = tra(build_stack(cfg), grid)
    peaks = find_peaks(spec.grid, spec["T"], min_height=0.02 * float(spec["T"].max()))
    note = ", ".join(f"{p:.3f}" for p in peaks[:6])
    return [Artifact("linear.csv", io.spectrum_text(spec), f"{model} transmission, {grid.size} points, peaks at [{note}] cm^-1")]


def _transient_spectrum(cfg: dict, model: str, grid) -> Spectrum:
    p = build_qm(cfg)
    if model == "quantum":
        return quantum_transient(p, grid)
    optics = build_cavity(cfg) if model == "fabry_perot" else build_stack(cfg)
    return classical_transient(build_medium(cfg), optics, p.f_pu, grid, p.omega12, p.delta, p.gamma_m)


def run_transient(cfg: dict) -> list[Artifact]:
    grid = build_grid(cfg)
    model = cfg["transient"]["model"]
    spec = _transient_spectrum(cfg, model, grid)
    feats = extract_features(spec, cfg["qm"]["omega0"])
    summary = (
        f"{model} transient at f={cfg['qm']['f_pu']:g}, {grid.size} points, max|dT|={np.max(np.abs(spec['dT'])):.3g}, "
        f"UP zero crossing {_fmt(feats.up_zero_crossing)}, LP extremum at {_fmt(feats.lp_extremum_position)}"
    )
    return [Artifact("transient.csv", io.spectrum_text(spec), summary)]


def run_sweep(cfg: dict) -> list[Artifact]:
    grid = build_grid(cfg)
    sw = cfg["sweep"]
    p = build_qm(cfg)
    detunings = sw["detunings"]
    if sw["lp_targets"] is not None:
        detunings = [detuning_for_lp(t, p) for t in sw["lp_targets"]]
    classical = sw["model"] in ("classical", "both")
    optics = None
    medium = None
    thetas = None
    if classical:
        medium = build_medium(cfg)
        if sw["optics"] == "fabry_perot":
            optics = build_cavity(cfg)
        else:
            optics = build_stack(cfg, medium)
            if cfg["stack"]["thetas"] is not None:
                thetas = expand_range(cfg["stack"]["thetas"])
    scenario = TransientScenario(
        model=sw["model"], qm=p, medium=medium, optics=optics, f=p.f_pu, detunings=detunings, thetas=thetas, grid=grid
    )
    result = detuning_sweep(scenario)
    artifacts, rows = [], []
    counters: dict[str, int] = {}
    for row in result.rows:
        k = counters[row.model] = counters.get(row.model, 0) + 1
        name = f"sweep_{row.model}_{k:02d}.csv"
        label = f"theta={row.theta:g} deg" if row.theta is not None else f"detuning={row.detuning:g}"
        artifacts.append(
            Artifact(
                name,
                io.spectrum_text(row.spectrum),
                f"{row.model} transient, {label}, LP {_fmt(row.features.e_lp)}, UP {_fmt(row.features.e_up)}",
            )
        )
        rows.append((row.model, row.detuning, row.theta, row.features, name))
    artifacts.append(Artifact("sweep_summary.csv", io.sweep_summary_text(rows), f"sweep summary, {len(rows)} rows"))
    return artifacts


def run_dispersion(cfg: dict) -> list[Artifact]:
    d = cfg["dispersion"]
    thetas = np.asarray(expand_range(d["thetas"]))
    curve = dispersion_curve(d["e_vib"], d["g0"], thetas, d["e0"], d["n_c"])
    header = ("theta_deg", "e_cav_cm-1", "detuning_cm-1", "e_lp_cm-1", "e_up_cm-1", "photon_lp", "photon_up", "splitting_cm-1")
    cols = (curve.theta, curve.e_cav, curve.detuning, curve.e_lp, curve.e_up, curve.photon_lp, curve.photon_up, curve.splitting)
    where = "none" if curve.resonance_angle is None else f"{curve.resonance_angle:.4f} deg"
    summary = f"dispersion, {thetas.size} angles, resonance at {where}, min splitting {curve.min_splitting:.6f} cm^-1"
    return [Artifact("dispersion.csv", io.table_text(header, zip(*cols)), summary)]


def run_tmm(cfg: dict) -> list[Artifact]:
    grid = build_grid(cfg)
    stack = build_stack(cfg)
    spec = tra(stack, grid)
    out = [
        Artifact(
            "tmm.csv",
            io.spectrum_text(spec),
            f"stack T/R/A at theta={stack.theta:g} deg ({stack.polarization}), {grid.size} points, "
            f"max|T+R+A-1|={np.max(np.abs(spec['T'] + spec['R'] + spec['A'] - 1)):.1e}",
        )
    ]
    if cfg["stack"]["thetas"] is not None:
        nu01 = _nu01(cfg)
        sweep = polariton_absorption_vs_angle(stack, expand_range(cfg["stack"]["thetas"]), grid, nu01)
        summary = (
            f"angle sweep, {sweep.theta.size} angles, min splitting at {sweep.theta_min_splitting:g} deg, "
            f"max polariton absorption at {sweep.theta_max_absorption:g} deg"
        )
        if sweep.diagnostics:
            summary += f", {len(sweep.diagnostics)} angle(s) unresolved"
        out.append(Artifact("tmm_angles.csv", io.table_text(io.ANGLE_COLUMNS, sweep.rows()), summary))
    return out


def _noise(rng, kind: str, level: float, data: np.ndarray) -> np.ndarray:
    if kind == "multiplicative":
        return data * (1 + level * rng.standard_normal(data.shape))
    if kind == "uniform":
        return data + rng.uniform(-level, level, data.shape)
    if kind == "gaussian":
        return data + level * rng.standard_normal(data.shape)
    return data


def run_fit(cfg: dict, base_dir: Path | None = None) -> list[Artifact]:
    fit = cfg["fit"]
    rng = np.random.default_rng(cfg["seed"])
    if fit["target"] == "lorentz":
        return _fit_lorentz(cfg, fit, rng, base_dir)
    return _fit_dispersion(cfg, fit, rng, base_dir)


def _triples(values) -> tuple[LorentzOscillator, ...]:
    return tuple(LorentzOscillator(*values[i : i + 3]) for i in range(0, len(values), 3))


def _fit_lorentz(cfg, fit, rng, base_dir):
    medium = build_medium(cfg)
    initial = medium if fit["initial"] is None else medium.with_oscillators(_triples(fit["initial"]))
    if fit["observations"] is not None:
        observed = io.read_spectrum(resolve_path(fit["observations"], base_dir))
        if fit["channel"] not in observed:
            raise ValueError(f"observations have no channel '{fit['channel']}' (found {', '.join(observed.names)})")
        data_spec = Spectrum(observed.grid, {"absorbance": observed[fit["channel"]]})
        source = "observations"
    else:
        grid = build_grid(cfg)
        truth = medium.with_oscillators(_triples(fit["truth"]))
        clean = absorbance(truth, grid, fit["pathlength"])
        data_spec = Spectrum(grid, {"absorbance": _noise(rng, fit["noise"]["kind"], fit["noise"]["level"], clean)})
        source = "synthetic"
    result = fit_lorentz(data_spec, initial, fit["pathlength"], max_iter=fit["max_iter"])
    model = result.extras.pop("model")
    fitted = data_spec.with_channel("model", absorbance(model, data_spec.grid, fit["pathlength"]))
    values = ", ".join(f"{n}={v:.6g}" for n, v in zip(result.names, result.values))
    return [
        Artifact("fit_result.json", io.fit_result_text(result), f"lorentz fit ({source}): {values}; converged={result.converged}"),
        Artifact("fit_data.csv", io.spectrum_text(fitted), f"absorbance data and fitted model, {data_spec.grid.size} points"),
    ]


def _fit_dispersion(cfg, fit, rng, base_dir):
    if fit["observations"] is not None:
        theta, lp, up = io.read_dispersion_points(resolve_path(fit["observations"], base_dir))
        source = "observations"
    else:
        theta = np.asarray(expand_range(fit["thetas"]))
        lp, up, _ = dispersion_model(theta, *fit["truth"])
        lp = _noise(rng, fit["noise"]["kind"], fit["noise"]["level"], lp)
        up = _noise(rng, fit["noise"]["kind"], fit["noise"]["level"], up)
        source = "synthetic"
    result = fit_dispersion(theta, lp, up, initial=fit["initial"], max_iter=fit["max_iter"])
    m_lp, m_up, e_cav = dispersion_model(theta, *result.values)
    header = ("theta_deg", "e_lp_cm-1", "e_up_cm-1", "model_e_lp_cm-1", "model_e_up_cm-1", "model_e_cav_cm-1")
    values = ", ".join(f"{n}={v:.6g}" for n, v in zip(result.names, result.values))
    return [
        Artifact("fit_result.json", io.fit_result_text(result), f"dispersion fit ({source}): {values}; converged={result.converged}"),
        Artifact("fit_data.csv", io.table_text(header, zip(theta, lp, up, m_lp, m_up, e_cav)), f"dispersion data and model, {theta.size} angles"),
    ]


RUNNERS = {
    "linear": run_linear,
    "transient": run_transient,
    "sweep": run_sweep,
    "dispersion": run_dispersion,
    "tmm": run_tmm,
    "fit": run_fit,
}


def run(cfg: dict, base_dir: Path | None = None) -> list[Artifact]:
    if cfg["command"] == "fit":
        return run_fit(cfg, base_dir)
    return RUNNERS[cfg["command"]](cfg)

