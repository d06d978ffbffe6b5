"""Damped least-squares fitting of oscillator and dispersion parameters.

The optimiser is a Levenberg-Marquardt loop with a central-difference
Jacobian. Positivity and lower bounds are enforced by reparametrisation, so
the inner problem is unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dielectric import DielectricModel, LorentzOscillator, optical_constants
from .fabry_perot import cavity_mode_at_angle
from .polariton_model import branch_energies
from .spectrum import Spectrum

LN10 = np.log(10.0)


# ---------------------------------------------------------------------------
# parameter transforms


@dataclass(frozen=True)
class Transform:
    """Map between a natural parameter and the unconstrained internal one.

    ``kind`` is ``"free"``, ``"log"`` (value > lower), or ``"abs"`` (value >= 0,
    reachable at exactly 0).
    """

    kind: str = "free"
    lower: float = 0.0

    def to_internal(self, value: float) -> float:
        if self.kind == "log":
            if not value > self.lower:
                raise ValueError(f"initial value {value} must exceed bound {self.lower}")
            return float(np.log(value - self.lower))
        if self.kind == "abs":
            if value < 0:
                raise ValueError(f"initial value {value} must be >= 0")
        return float(value)

    def to_natural(self, internal: float) -> float:
        if self.kind == "log":
            return float(self.lower + np.exp(internal))
        if self.kind == "abs":
            return float(abs(internal))
        return float(internal)


FREE = Transform()
POSITIVE = Transform("log")
NONNEGATIVE = Transform("abs")


@dataclass
class FitProblem:
    """Residual function of the natural parameters plus start point and stopping rules."""

    residuals: Callable[[np.ndarray], np.ndarray]
    initial: Sequence[float]
    names: Sequence[str]
    transforms: Sequence[Transform] | None = None
    max_iter: int = 200
    gtol: float = 1e-12
    xtol: float = 1e-12
    ftol: float = 1e-15

    def __post_init__(self):
        self.initial = np.asarray(self.initial, dtype=float)
        if self.transforms is None:
            self.transforms = [FREE] * len(self.initial)
        if not len(self.names) == len(self.initial) == len(self.transforms):
            raise ValueError("names, initial values and transforms must have equal length")

    def natural(self, internal: np.ndarray) -> np.ndarray:
        return np.array([t.to_natural(v) for t, v in zip(self.transforms, internal)])

    def internal(self, natural: np.ndarray) -> np.ndarray:
        return np.array([t.to_internal(v) for t, v in zip(self.transforms, natural)])


@dataclass
class FitResult:
    names: list[str]
    values: np.ndarray
    stderr: np.ndarray
    residual_norm: float
    initial_residual_norm: float
    converged: bool
    n_iter: int
    message: str
    cost_log: list[float] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.values)))

    def to_json_dict(self) -> dict:
        return {
            "parameters": {n: float(v) for n, v in zip(self.names, self.values)},
            "stderr": {n: _json_float(s) for n, s in zip(self.names, self.stderr)},
            "residual_norm": float(self.residual_norm),
            "initial_residual_norm": float(self.initial_residual_norm),
            "converged": bool(self.converged),
            "n_iter": int(self.n_iter),
            "message": self.message,
            "extras": {k: _jsonable(v) for k, v in self.extras.items()},
        }


def _json_float(x):
    x = float(x)
    return x if np.isfinite(x) else None


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_json_float(x) for x in v.ravel()]
    if isinstance(v, (float, np.floating)):
        return _json_float(v)
    return v


# ---------------------------------------------------------------------------
# optimiser


def numerical_jacobian(fun, x: np.ndarray) -> np.ndarray:
    """Central differences with step max(1e-6 |x|, 1e-8) per coordinate."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        h = max(1e-6 * abs(x[j]), 1e-8)
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        cols.append((fun(xp) - fun(xm)) / (2 * h))
    return np.column_stack(cols)


def levenberg_marquardt(problem: FitProblem) -> FitResult:
    """Minimise 0.5 ||r||^2 over the internal parameters of ``problem``."""

    def fun(u):
        return np.asarray(problem.residuals(problem.natural(u)), dtype=float)

    u = problem.internal(problem.initial)
    r = fun(u)
    if r.size < u.size:
        raise ValueError(f"{r.size} residuals cannot determine {u.size} parameters")
    if not np.all(np.isfinite(r)):
        raise ValueError("residuals are not finite at the initial point")
    cost = 0.5 * float(r @ r)
    initial_norm = np.sqrt(2 * cost)
    log = [cost]
    lam = 1e-3
    converged = False
    message = "maximum number of iterations reached"
    it = 0
    while it < problem.max_iter:
        it += 1
        J = numerical_jacobian(fun, u)
        col_norms = np.linalg.norm(J, axis=0)
        cosine = np.abs(J.T @ r) / np.maximum(col_norms * np.linalg.norm(r), 1e-300)
        if np.max(cosine) <= problem.gtol:
            converged, message = True, "gradient below tolerance"
            break
        scale = np.maximum(np.sum(J * J, axis=0), 1e-12 * max(1.0, np.max(np.sum(J * J, axis=0))))
        accepted = False
        while lam < 1e16:
            aug = np.vstack([J, np.diag(np.sqrt(lam * scale))])
            rhs = np.concatenate([-r, np.zeros(u.size)])
            step = np.linalg.lstsq(aug, rhs, rcond=None)[0]
            u_new = u + step
            r_new = fun(u_new)
            cost_new = 0.5 * float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
            if cost_new < cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            converged, message = True, "no further decrease possible"
            break
        reduction = cost - cost_new
        # internal coordinates are O(1) or larger (logs, energies), hence the unit floor
        small_step = np.all(np.abs(step) <= problem.xtol * (np.abs(u) + 1.0))
        u, r, cost = u_new, r_new, cost_new
        log.append(cost)
        lam = max(lam / 10, 1e-12)
        if cost == 0:
            converged, message = True, "exact fit"
            break
        if small_step:
            converged, message = True, "step below tolerance"
            break
        if reduction <= problem.ftol * cost:
            converged, message = True, "relative reduction below tolerance"
            break

    values = problem.natural(u)
    stderr = _standard_errors(problem, values, r)
    return FitResult(
        names=list(problem.names),
        values=values,
        stderr=stderr,
        residual_norm=float(np.sqrt(2 * cost)),
        initial_residual_norm=float(initial_norm),
        converged=converged,
        n_iter=it,
        message=message,
        cost_log=log,
    )


def _standard_errors(problem: FitProblem, values: np.ndarray, r: np.ndarray) -> np.ndarray:
    m, n = r.size, values.size
    if m <= n:
        return np.full(n, np.nan)
    J = numerical_jacobian(lambda v: np.asarray(problem.residuals(v), dtype=float), values)
    s2 = float(r @ r) / (m - n)
    cov = np.linalg.pinv(J.T @ J) * s2
    return np.sqrt(np.clip(np.diag(cov), 0, None))


# ---------------------------------------------------------------------------
# oscillators from witness-sample absorbance


def absorbance(model: DielectricModel, nu, pathlength: float) -> np.ndarray:
    """Decadic absorbance alpha L / ln 10 of a film of ``pathlength`` cm."""
    return np.asarray(optical_constants(model, nu).alpha) * pathlength / LN10


def fit_lorentz(
    spectrum: Spectrum,
    initial: DielectricModel,
    pathlength: float,
    channel: str = "absorbance",
    **options,
) -> FitResult:
    """Fit amplitude, center and width of every oscillator to an absorbance spectrum.

    ``initial`` supplies the start values and the (fixed) background index.
    ``extras["model"]`` of the result holds the fitted :class:`DielectricModel`.
    """
    nu = spectrum.grid
    data = spectrum[channel]
    if not np.all(np.isfinite(data)):
        raise ValueError("absorbance contains non-finite values")
    if np.ptp(data) <= 1e-12 * max(1.0, float(np.max(np.abs(data)))):
        raise ValueError("flat absorbance spectrum: nothing to fit")
    if not initial.oscillators:
        raise ValueError("need at least one initial oscillator")

    n_osc = len(initial.oscillators)
    names, start, transforms = [], [], []
    for i, osc in enumerate(initial.oscillators):
        names += [f"A{i}", f"nu{i}", f"Gamma{i}"]
        start += [osc.amplitude, osc.center, osc.width]
        transforms += [POSITIVE, POSITIVE, POSITIVE]

    def build(v):
        return initial.with_oscillators(
            LorentzOscillator(v[3 * i], v[3 * i + 1], v[3 * i + 2]) for i in range(n_osc)
        )

    def residuals(v):
        return absorbance(build(v), nu, pathlength) - data

    result = levenberg_marquardt(FitProblem(residuals, start, names, transforms, **options))
    result.extras["model"] = build(result.values)
    return result


# ---------------------------------------------------------------------------
# dispersion (anti-crossing) fits


DISPERSION_NAMES = ("g0", "e_vib", "e0", "n_c")


def dispersion_model(theta, g0, e_vib, e0, n_c):
    e_cav = cavity_mode_at_angle(e0, theta, n_c)
    lp, up = branch_energies(e_vib, e_cav, g0)
    return lp, up, e_cav


def _dispersion_guess(theta, e_lp, e_up, n_c=1.5):
    split = e_up - e_lp
    i = int(np.argmin(split))
    g0 = split[i] / 2
    e_vib = (e_lp[i] + e_up[i]) / 2
    e_cav = e_lp + e_up - e_vib
    j = int(np.argmin(theta))
    e0 = e_cav[j] * np.sqrt(1 - np.sin(np.deg2rad(theta[j])) ** 2 / n_c**2)
    return [g0, e_vib, e0, n_c]


def fit_dispersion(theta, e_lp, e_up, initial: Sequence[float] | None = None, **options) -> FitResult:
    """Fit (g0, E_vib, E0, n_c) of the two-branch model with a tilt-tuned cavity.

    ``extras["sum_rule_residual"]`` holds |E_LP + E_UP - E_vib - E_cav(theta)|
    per point at the fitted parameters.
    """
    theta = np.asarray(theta, dtype=float)
    e_lp = np.asarray(e_lp, dtype=float)
    e_up = np.asarray(e_up, dtype=float)
    if not theta.shape == e_lp.shape == e_up.shape or theta.ndim != 1:
        raise ValueError("theta, E_LP and E_UP must be 1-D arrays of equal length")
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(e_lp)) and np.all(np.isfinite(e_up))):
        raise ValueError("dispersion data contain non-finite values")
    if np.unique(theta).size < 4:
        raise ValueError("need at least 4 distinct tilt angles")
    if np.any(e_up < e_lp):
        raise ValueError("E_UP must not be below E_LP")
    if np.ptp(e_lp) == 0 and np.ptp(e_up) == 0:
        raise ValueError("branches do not disperse: cavity tuning is not identifiable")

    start = list(initial) if initial is not None else _dispersion_guess(theta, e_lp, e_up)
    transforms = [NONNEGATIVE, POSITIVE, POSITIVE, Transform("log", 1.0)]

    def residuals(v):
        g0, e_vib, e0, n_c = v
        if n_c <= np.max(np.sin(np.deg2rad(theta))):
            return np.full(2 * theta.size, 1e6)
        lp, up, _ = dispersion_model(theta, g0, e_vib, e0, n_c)
        return np.concatenate([lp - e_lp, up - e_up])

    result = levenberg_marquardt(FitProblem(residuals, start, DISPERSION_NAMES, transforms, **options))
    g0, e_vib, e0, n_c = result.values
    e_cav = cavity_mode_at_angle(e0, theta, n_c)
    result.extras["sum_rule_residual"] = np.abs(e_lp + e_up - e_vib - e_cav)
    return result
