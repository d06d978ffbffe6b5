"""Lorentz-oscillator dielectric function of the intracavity medium.

Frequencies are wavenumbers in cm^-1 and oscillator amplitudes carry
cm^-2, so every Lorentzian term ``A / (nu0**2 - nu**2)`` is dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

#: W(CO)6 T1u carbonyl stretch in hexane.
WCO6_CENTER = 1983.0
WCO6_WIDTH = 3.0


@dataclass(frozen=True)
class LorentzOscillator:
    """One Lorentzian band: amplitude (cm^-2), center and full width (cm^-1)."""

    amplitude: float
    center: float
    width: float

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ValueError(f"oscillator amplitude must be >= 0, got {self.amplitude}")
        if not self.center > 0:
            raise ValueError(f"oscillator center must be > 0, got {self.center}")
        if not self.width > 0:
            raise ValueError(f"oscillator width must be > 0, got {self.width}")


@dataclass(frozen=True)
class DielectricModel:
    """Background index plus an ordered tuple of Lorentz oscillators."""

    n_bg: float = 1.0
    oscillators: tuple[LorentzOscillator, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.n_bg >= 1:
            raise ValueError(f"background index must be >= 1, got {self.n_bg}")
        object.__setattr__(self, "oscillators", tuple(self.oscillators))

    def with_oscillators(self, oscillators) -> DielectricModel:
        return replace(self, oscillators=tuple(oscillators))


@dataclass(frozen=True)
class OpticalConstants:
    n: np.ndarray | float
    k: np.ndarray | float
    alpha: np.ndarray | float


def _check_frequency(nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    if np.any(~(nu > 0)):
        raise ValueError("wavenumbers must be strictly positive")
    return nu


def permittivity(model: DielectricModel, nu):
    """Real and imaginary permittivity ``(eps1, eps2)`` at wavenumber(s) ``nu``."""
    nu = _check_frequency(nu)
    eps1 = np.full(nu.shape, model.n_bg**2)
    eps2 = np.zeros(nu.shape)
    for osc in model.oscillators:
        detune = osc.center**2 - nu**2
        denom = detune**2 + (osc.width * nu) ** 2
        eps1 = eps1 + osc.amplitude * detune / denom
        eps2 = eps2 + osc.amplitude * osc.width * nu / denom
    if eps1.ndim == 0:
        return float(eps1), float(eps2)
    return eps1, eps2


def _nk(eps1, eps2):
    modulus = np.hypot(eps1, eps2)
    n = np.sqrt((eps1 + modulus) / 2)
    # (modulus - eps1) written as eps2^2 / (modulus + eps1) when eps1 > 0 to avoid cancellation
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = np.where(eps1 > 0, eps2**2 / (modulus + eps1), modulus - eps1)
    k = np.sqrt(np.maximum(stable, 0.0) / 2)
    return n, k


def optical_constants(model: DielectricModel, nu) -> OpticalConstants:
    """Refractive index, extinction coefficient and absorption coefficient (cm^-1)."""
    nu = _check_frequency(nu)
    eps1, eps2 = permittivity(model, nu)
    n, k = _nk(np.asarray(eps1), np.asarray(eps2))
    alpha = 4 * np.pi * nu * k
    if np.ndim(n) == 0:
        return OpticalConstants(float(n), float(k), float(alpha))
    return OpticalConstants(n, k, alpha)


def optical_constants_from_permittivity(eps1, eps2, nu=None) -> OpticalConstants:
    """Same conversion starting from given permittivity values.

    ``alpha`` is only meaningful when ``nu`` is supplied; otherwise it is NaN.
    """
    eps1 = np.asarray(eps1, dtype=float)
    eps2 = np.asarray(eps2, dtype=float)
    n, k = _nk(eps1, eps2)
    alpha = np.nan * k if nu is None else 4 * np.pi * _check_frequency(nu) * k
    if n.ndim == 0:
        return OpticalConstants(float(n), float(k), float(alpha))
    return OpticalConstants(n, k, alpha)


def complex_index(model: DielectricModel, nu) -> np.ndarray:
    """Complex refractive index ``n + i k`` (absorbing media have ``k > 0``)."""
    oc = optical_constants(model, nu)
    return np.asarray(oc.n) + 1j * np.asarray(oc.k)


def excited_model(
    model: DielectricModel,
    ground_index: int,
    f: float,
    hot_center: float,
    hot_width: float | None = None,
    delta: float = 0.0,
) -> DielectricModel:
    """Medium with a fraction ``f`` of the molecules in v=1.

    The 0->1 band loses ``2f`` of its amplitude (bleach plus stimulated
    emission) and a 1->2 band of amplitude ``2f(1+delta)^2 A0`` is appended
    at ``hot_center``. Both factors are the squares of the cavity couplings
    in the effective three-mode matrix, so the classical and quantum models
    share one excitation level. The hot band is appended even at ``f = 0``
    (amplitude exactly 0) so the oscillator layout does not depend on ``f``.

    Parameters
    ----------
    model : DielectricModel
        Ground-state medium.
    ground_index : int
        Position of the 0->1 band in ``model.oscillators``.
    f : float
        Excited fraction, 0 <= f <= 0.5.
    hot_center : float
        1->2 transition wavenumber, cm^-1.
    hot_width : float, optional
        1->2 full width, cm^-1. Defaults to the 0->1 width.
    delta : float
        Electrical anharmonicity, mu12 = sqrt(2) mu01 (1 + delta).
    """
    if not 0 <= f <= 0.5:
        raise ValueError(f"excited fraction must lie in [0, 0.5], got {f}")
    if not -len(model.oscillators) <= ground_index < len(model.oscillators):
        raise IndexError(f"ground_index {ground_index} out of range")
    ground = model.oscillators[ground_index]
    width = ground.width if hot_width is None else hot_width
    oscillators = list(model.oscillators)
    oscillators[ground_index] = replace(ground, amplitude=ground.amplitude * (1 - 2 * f))
    oscillators.append(
        LorentzOscillator(2 * f * (1 + delta) ** 2 * ground.amplitude, hot_center, width)
    )
    return model.with_oscillators(oscillators)


def coupling_to_amplitude(g: float, n_bg: float) -> float:
    """Oscillator amplitude giving collective coupling ``g`` (cm^-1) in a cavity.

    Near resonance the polariton condition eps(nu) nu^2 = n_bg^2 nu_c^2
    reduces to (nu - nu_c)(nu - nu0) = A / (4 n_bg^2), so g^2 = A / (4 n_bg^2).
    Good to a few percent; use the calibration in ``pump_probe`` when the
    exact transmission splitting matters.
    """
    return 4 * n_bg**2 * g**2
