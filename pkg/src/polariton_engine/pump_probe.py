"""Pump-probe (transient) spectra from the classical and quantum cavity models.

Every transient signal here uses one sign convention, -(T_excited - T_ground),
so bleach of a transmission dip shows up positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import brentq

from .dielectric import DielectricModel, LorentzOscillator, coupling_to_amplitude, excited_model
from .fabry_perot import (
    CavityGeometry,
    fp_transmission,
    free_spectral_range,
    length_for_mode,
    reflectivity_for_linewidth,
)
from .polariton_model import cavity_for_lp
from .quantum_model import QmParams, transient_transmission, up_resonance
from .spectrum import Spectrum, find_peaks, zero_crossings
from .transfer_matrix import LayerStack, replace_spacer_medium, tra

#: Half-width of the LP / UP windows used for feature extraction, cm^-1.
REGION_HALF_WIDTH = 10.0


def transient_signal(t_excited, t_ground):
    return -(np.asarray(t_excited) - np.asarray(t_ground))


def _classical_T(medium: DielectricModel, optics, grid) -> np.ndarray:
    if isinstance(optics, CavityGeometry):
        return fp_transmission(optics, medium, grid)["T"]
    if isinstance(optics, LayerStack):
        return tra(replace_spacer_medium(optics, medium), grid)["T"]
    raise TypeError("optics must be a CavityGeometry or a LayerStack")


def classical_transient(
    medium: DielectricModel,
    optics: CavityGeometry | LayerStack,
    f: float,
    grid,
    hot_center: float,
    delta: float = 0.0,
    hot_width: float | None = None,
    ground_index: int = 0,
) -> Spectrum:
    """Ground, excited and difference transmission of the dispersive-medium cavity.

    ``optics`` is either a single-layer cavity (Airy formula) or a layer stack
    whose thickest interior layer is the spacer holding ``medium``.
    """
    grid = np.asarray(grid, dtype=float)
    excited = excited_model(medium, ground_index, f, hot_center, hot_width, delta)
    t_ground = _classical_T(medium, optics, grid)
    t_excited = _classical_T(excited, optics, grid)
    return Spectrum(
        grid,
        {"T_ground": t_ground, "T_excited": t_excited, "dT": transient_signal(t_excited, t_ground)},
    )


def quantum_transient(p: QmParams, grid) -> Spectrum:
    """Ground, excited (``p.f_pu``) and difference transmission of the quantum model."""
    grid = np.asarray(grid, dtype=float)
    t_ground = transient_transmission(p.with_(f_pu=0.0), grid)["T"]
    t_excited = transient_transmission(p, grid)["T"]
    return Spectrum(
        grid,
        {"T_ground": t_ground, "T_excited": t_excited, "dT": transient_signal(t_excited, t_ground)},
    )


# ---------------------------------------------------------------------------
# feature extraction


@dataclass
class TransientFeatures:
    """Polariton landmarks of one transient spectrum (NaN where absent)."""

    e_lp: float = np.nan
    e_up: float = np.nan
    lp_extremum_position: float = np.nan
    lp_extremum: float = np.nan
    up_zero_crossing: float = np.nan
    up_signs: tuple[int, int] = (0, 0)
    up_extremum: float = np.nan
    diagnostic: str = ""

    @property
    def resolved(self) -> bool:
        return not self.diagnostic


def ground_polaritons(spec: Spectrum, nu01: float, window: float = 60.0, channel: str = "T_ground"):
    """Ground-state LP/UP transmission maxima closest to ``nu01`` on each side."""
    x = spec.grid
    y = spec[channel]
    mask = np.abs(x - nu01) <= window
    x, y = x[mask], y[mask]
    if x.size < 3:
        return None
    peaks = find_peaks(x, y, min_height=0.02 * float(y.max()), min_prominence=1e-3 * float(y.max()))
    below = peaks[peaks < nu01]
    above = peaks[peaks > nu01]
    if below.size == 0 or above.size == 0:
        return None
    return float(below.max()), float(above.min())


def extract_features(spec: Spectrum, nu01: float, half_width: float = REGION_HALF_WIDTH) -> TransientFeatures:
    """LP-region extremum and UP-region zero crossing of the ``dT`` channel.

    Regions are ``half_width`` either side of the ground-state LP and UP peaks.
    The UP zero crossing is the one closest to the UP peak; ``up_signs`` gives
    the sign of the largest lobe below and above that crossing.
    """
    pair = ground_polaritons(spec, nu01)
    if pair is None:
        return TransientFeatures(diagnostic=f"no polariton pair resolved around {nu01:g} cm^-1")
    lp, up = pair
    x, dT = spec.grid, spec["dT"]
    out = TransientFeatures(e_lp=lp, e_up=up)

    lp_mask = np.abs(x - lp) <= half_width
    i = int(np.argmax(np.abs(dT[lp_mask])))
    out.lp_extremum_position = float(x[lp_mask][i])
    out.lp_extremum = float(dT[lp_mask][i])

    up_mask = np.abs(x - up) <= half_width
    xu, yu = x[up_mask], dT[up_mask]
    out.up_extremum = float(np.max(np.abs(yu))) if yu.size else np.nan
    crossings = zero_crossings(xu, yu)
    if crossings.size == 0:
        out.diagnostic = "dT does not change sign in the UP region"
        return out
    zc = float(crossings[np.argmin(np.abs(crossings - up))])
    out.up_zero_crossing = zc
    below, above = yu[xu < zc], yu[xu > zc]
    if below.size and above.size:
        out.up_signs = (
            int(np.sign(below[np.argmax(np.abs(below))])),
            int(np.sign(above[np.argmax(np.abs(above))])),
        )
    return out


# ---------------------------------------------------------------------------
# scenarios and sweeps


@dataclass
class TransientScenario:
    """Inputs for a transient run in one or both models.

    The classical path uses ``medium`` (0->1 band at ``ground_index``) inside
    ``optics``; the quantum path uses ``qm``. The excited fraction, 1->2 line
    and electrical anharmonicity are taken from ``f`` and ``qm`` for both.
    """

    model: Literal["classical", "quantum", "both"] = "quantum"
    qm: QmParams = field(default_factory=QmParams)
    medium: DielectricModel | None = None
    optics: CavityGeometry | LayerStack | None = None
    f: float = 0.05
    detunings: Sequence[float] = (0.0,)
    thetas: Sequence[float] | None = None
    grid: np.ndarray = field(default_factory=lambda: np.arange(1900.0, 2060.0 + 1e-9, 0.05))
    ground_index: int = 0

    def __post_init__(self):
        if self.model not in ("classical", "quantum", "both"):
            raise ValueError(f"unknown model {self.model!r}")
        if not 0 <= self.f <= 0.5:
            raise ValueError("excited fraction must lie in [0, 0.5]")
        if not np.all(np.isfinite(self.detunings)):
            raise ValueError("detunings must be finite")
        self.grid = np.asarray(self.grid, dtype=float)
        if self.model in ("classical", "both") and (self.medium is None or self.optics is None):
            raise ValueError("the classical model needs a medium and optics")


@dataclass
class SweepRow:
    model: str
    detuning: float
    theta: float | None
    spectrum: Spectrum
    features: TransientFeatures


@dataclass
class DetuningSweepResult:
    rows: list[SweepRow]

    def for_model(self, model: str) -> list[SweepRow]:
        return [r for r in self.rows if r.model == model]

    @property
    def diagnostics(self) -> list[str]:
        return [
            f"{r.model} detuning={r.detuning:g}: {r.features.diagnostic}"
            for r in self.rows
            if r.features.diagnostic
        ]


def detuning_for_lp(e_lp: float, p: QmParams) -> float:
    """Cavity detuning that places the (undamped) lower polariton at ``e_lp``."""
    return cavity_for_lp(e_lp, p.omega0, p.gN) - p.omega0


def tune_cavity(cav: CavityGeometry, target: float, n_c: float | None = None) -> CavityGeometry:
    """Same cavity with its length changed so the nearest empty mode sits at ``target``."""
    n_c = cav.n_c if n_c is None else n_c
    fsr = 1.0 / (2 * n_c * cav.length)
    order = int(round(target / fsr + cav.phase / np.pi))
    return replace(cav, length=length_for_mode(target, order, n_c, cav.phase), n_c=n_c)


def detuning_sweep(scenario: TransientScenario) -> DetuningSweepResult:
    """Transient spectra and features at each detuning (or tilt angle for stacks)."""
    sc = scenario
    p = sc.qm.with_(f_pu=sc.f)
    rows: list[SweepRow] = []
    if sc.model in ("quantum", "both"):
        for d in sc.detunings:
            spec = quantum_transient(p.with_(omega_c=p.omega0 + d), sc.grid)
            rows.append(SweepRow("quantum", float(d), None, spec, extract_features(spec, p.omega0)))
    if sc.model in ("classical", "both"):
        kw = dict(hot_center=p.omega12, delta=p.delta, hot_width=p.gamma_m, ground_index=sc.ground_index)
        if isinstance(sc.optics, LayerStack):
            thetas = sc.thetas if sc.thetas is not None else [sc.optics.theta]
            for th in thetas:
                spec = classical_transient(sc.medium, sc.optics.at_angle(float(th)), sc.f, sc.grid, **kw)
                feats = extract_features(spec, p.omega0)
                d = feats.e_up + feats.e_lp - 2 * p.omega0
                rows.append(SweepRow("classical", float(d), float(th), spec, feats))
        else:
            for d in sc.detunings:
                cav = tune_cavity(sc.optics, p.omega0 + d, n_c=sc.medium.n_bg)
                spec = classical_transient(sc.medium, cav, sc.f, sc.grid, **kw)
                rows.append(SweepRow("classical", float(d), None, spec, extract_features(spec, p.omega0)))
    return DetuningSweepResult(rows)


# ---------------------------------------------------------------------------
# classical <-> quantum


def splitting_of(spec: Spectrum, nu01: float, channel: str = "T_ground") -> float:
    pair = ground_polaritons(spec, nu01, channel=channel)
    if pair is None:
        return np.nan
    return pair[1] - pair[0]


def matched_classical(
    p: QmParams,
    n_bg: float = 1.375,
    spacer: float = 2.5e-3,
    grid=None,
) -> tuple[DielectricModel, CavityGeometry]:
    """Dielectric medium and single-layer cavity mirroring the quantum parameters.

    The cavity mode order is the one whose spacer length is closest to
    ``spacer`` (cm); the mirror reflectivity gives an empty-cavity linewidth
    ``kappa``; the 0->1 amplitude is calibrated so the ground-state
    transmission peaks sit ``2 gN`` apart at zero detuning.
    """
    if grid is None:
        grid = np.arange(p.omega0 - 80, p.omega0 + 80, 0.02)
    grid = np.asarray(grid, dtype=float)
    order = max(1, int(round(2 * n_bg * spacer * p.omega_c)))
    length = length_for_mode(p.omega_c, order, n_bg)
    fsr = free_spectral_range(CavityGeometry(length=length, r_mirror=0.5, n_c=n_bg))
    cav = CavityGeometry(length=length, r_mirror=reflectivity_for_linewidth(p.kappa, fsr), n_c=n_bg)
    if p.gN == 0:
        return DielectricModel(n_bg, (LorentzOscillator(0.0, p.omega0, p.gamma_m),)), cav

    cav0 = tune_cavity(cav, p.omega0)

    def gap(amplitude):
        medium = DielectricModel(n_bg, (LorentzOscillator(amplitude, p.omega0, p.gamma_m),))
        spec = fp_transmission(cav0, medium, grid)
        s = splitting_of(Spectrum(grid, {"T_ground": spec["T"]}), p.omega0)
        return (s if np.isfinite(s) else 0.0) - 2 * p.gN

    guess = coupling_to_amplitude(p.gN, n_bg)
    lo, hi = 0.5 * guess, 1.5 * guess
    while gap(lo) > 0:
        lo /= 2
    while gap(hi) < 0:
        hi *= 2
    amplitude = brentq(gap, lo, hi, xtol=1e-6)
    return DielectricModel(n_bg, (LorentzOscillator(amplitude, p.omega0, p.gamma_m),)), cav


@dataclass
class ModelComparison:
    classical: TransientFeatures
    quantum: TransientFeatures
    diagnostics: list[str]

    @property
    def empty(self) -> bool:
        return bool(self.diagnostics)

    @property
    def up_zero_crossing_difference(self) -> float:
        return self.classical.up_zero_crossing - self.quantum.up_zero_crossing

    @property
    def lp_extremum_difference(self) -> float:
        return self.classical.lp_extremum_position - self.quantum.lp_extremum_position

    @property
    def same_sign_pattern(self) -> bool:
        c, q = self.classical, self.quantum
        return c.up_signs == q.up_signs and np.sign(c.lp_extremum) == np.sign(q.lp_extremum)

    def table(self) -> list[tuple[str, float, float, float]]:
        """Rows of (feature, classical, quantum, classical - quantum)."""
        c, q = self.classical, self.quantum
        rows = []
        for name in ("e_lp", "e_up", "up_zero_crossing", "lp_extremum_position", "lp_extremum"):
            a, b = getattr(c, name), getattr(q, name)
            rows.append((name, a, b, a - b))
        return rows


def compare_models(classical: Spectrum, quantum: Spectrum, nu01: float) -> ModelComparison:
    """Feature-by-feature comparison of two transient spectra (``T_ground`` and ``dT`` channels)."""
    fc = extract_features(classical, nu01)
    fq = extract_features(quantum, nu01)
    diagnostics = [f"{name}: {f.diagnostic}" for name, f in (("classical", fc), ("quantum", fq)) if f.diagnostic]
    return ModelComparison(fc, fq, diagnostics)


def compare_matched(p: QmParams, grid=None, n_bg: float = 1.375) -> ModelComparison:
    """Run both models with shared lines, splitting and excited fraction ``p.f_pu``."""
    if grid is None:
        grid = np.arange(p.omega0 - 80, p.omega0 + 80, 0.01)
    medium, cav = matched_classical(p, n_bg=n_bg)
    cls = classical_transient(medium, cav, p.f_pu, grid, p.omega12, p.delta, p.gamma_m)
    qm = quantum_transient(p, grid)
    return compare_models(cls, qm, p.omega0)


# ---------------------------------------------------------------------------
# excited fraction from the UP shift


def up_shift(f: float, p: QmParams) -> float:
    """Red-shift of the UP resonance when a fraction ``f`` is excited."""
    return up_resonance(p.with_(f_pu=0.0)) - up_resonance(p.with_(f_pu=f))


def estimate_excited_fraction(shift: float, p: QmParams, tol: float = 1e-9) -> float:
    """Excited fraction whose UP red-shift equals ``shift`` (cm^-1), by bisection."""
    top = up_shift(0.5, p)
    if not 0 <= shift <= top:
        raise ValueError(f"shift {shift} outside attainable range [0, {top:.6g}] cm^-1")
    if shift == 0:
        return 0.0
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if up_shift(mid, p) < shift:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2
