"""Two coupled oscillators: polariton branches, detuning and Hopfield fractions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fabry_perot import angle_for_mode, cavity_mode_at_angle


@dataclass(frozen=True)
class CoupledModes:
    """Bare vibration and cavity energies (cm^-1) and coupling ``g0`` (half the Rabi splitting)."""

    e_vib: float
    e_cav: float
    g0: float

    def __post_init__(self):
        if not (self.e_vib > 0 and self.e_cav > 0):
            raise ValueError("bare energies must be positive")
        if not self.g0 >= 0:
            raise ValueError("coupling must be non-negative")

    @property
    def detuning(self) -> float:
        return self.e_cav - self.e_vib


@dataclass(frozen=True)
class PolaritonPair:
    """Branch energies with (photon, vibration) Hopfield fractions for each branch."""

    e_lp: float
    e_up: float
    hopfield_lp: tuple[float, float]
    hopfield_up: tuple[float, float]

    @property
    def splitting(self) -> float:
        return self.e_up - self.e_lp


def branch_energies(e_vib, e_cav, g0):
    """Vectorised lower and upper branch energies.

    Written as min/max of the bare energies pushed apart by
    g0^2 / (half + |Delta| / 2), which equals half - |Delta| / 2 without the
    cancellation that loses g0 when g0 << |Delta|.
    """
    e_vib, e_cav, g0 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (e_vib, e_cav, g0)))
    gap = np.abs(e_vib - e_cav) / 2
    half = np.hypot(g0, gap)
    with np.errstate(invalid="ignore", divide="ignore"):
        push = np.where(half > 0, g0**2 / np.where(half > 0, half + gap, 1.0), 0.0)
    return np.minimum(e_vib, e_cav) - push, np.maximum(e_vib, e_cav) + push


def photon_fraction_lp(e_vib, e_cav, g0):
    """Photon weight of the lower branch; the upper branch has the complement.

    Squared cavity component of the lower eigenvector of [[E_cav, g0], [g0, E_vib]],
    written as (1 - Delta / sqrt(4 g0^2 + Delta^2)) / 2 with Delta = E_cav - E_vib.
    For ``g0 = 0`` and ``Delta = 0`` the lower branch is taken to be the vibration.
    """
    delta = np.asarray(e_cav, dtype=float) - np.asarray(e_vib, dtype=float)
    g0 = np.asarray(g0, dtype=float)
    root = np.sqrt(4 * g0**2 + delta**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(root > 0, 0.5 * (1 - delta / np.where(root > 0, root, 1.0)), 0.0)
    return frac


def polariton_energies(m: CoupledModes) -> PolaritonPair:
    lp, up = branch_energies(m.e_vib, m.e_cav, m.g0)
    x = float(photon_fraction_lp(m.e_vib, m.e_cav, m.g0))
    return PolaritonPair(float(lp), float(up), (x, 1 - x), (1 - x, x))


def detuning(e_up: float, e_lp: float, e_vib: float) -> float:
    """Cavity detuning from measured branch positions: E_UP + E_LP - 2 E_vib."""
    if e_up < e_lp:
        raise ValueError("E_UP must not be below E_LP")
    return e_up + e_lp - 2 * e_vib


def cavity_for_lp(e_lp: float, e_vib: float, g0: float) -> float:
    """Cavity energy that puts the lower branch at ``e_lp`` (requires ``e_lp < e_vib``).

    Inverts the branch formula: (E_LP - E_vib)(E_LP - E_cav) = g0^2.
    """
    if not e_lp < e_vib:
        raise ValueError("the lower branch lies below the vibration")
    return e_lp + g0**2 / (e_vib - e_lp)


@dataclass
class DispersionCurve:
    """Branch table over tilt angle plus the exact anti-crossing point."""

    theta: np.ndarray
    e_cav: np.ndarray
    detuning: np.ndarray
    e_lp: np.ndarray
    e_up: np.ndarray
    photon_lp: np.ndarray
    resonance_angle: float | None
    min_splitting: float

    @property
    def splitting(self) -> np.ndarray:
        return self.e_up - self.e_lp

    @property
    def photon_up(self) -> np.ndarray:
        return 1 - self.photon_lp


def dispersion_curve(e_vib: float, g0: float, thetas, e0: float, n_c: float) -> DispersionCurve:
    """Polariton branches as the cavity is tilt-tuned from its normal-incidence energy ``e0``.

    ``resonance_angle`` is the tilt where the cavity crosses the vibration
    (``None`` if that happens outside the span of ``thetas``); ``min_splitting``
    is the branch gap there, or the smallest gap on the grid otherwise.
    """
    thetas = np.asarray(thetas, dtype=float)
    e_cav = cavity_mode_at_angle(e0, thetas, n_c)
    e_cav = np.atleast_1d(e_cav)
    lp, up = branch_energies(e_vib, e_cav, g0)
    try:
        theta_res = angle_for_mode(e_vib, e0, n_c)
    except ValueError:
        theta_res = None
    if theta_res is not None and not thetas.min() <= theta_res <= thetas.max():
        theta_res = None
    if theta_res is not None:
        lo, hi = branch_energies(e_vib, cavity_mode_at_angle(e0, theta_res, n_c), g0)
        min_split = float(hi - lo)
    else:
        min_split = float(np.min(up - lp))
    return DispersionCurve(
        theta=thetas,
        e_cav=e_cav,
        detuning=e_cav - e_vib,
        e_lp=lp,
        e_up=up,
        photon_lp=photon_fraction_lp(e_vib, e_cav, g0),
        resonance_angle=theta_res,
        min_splitting=min_split,
    )
