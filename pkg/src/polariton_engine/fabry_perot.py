"""Single-layer Fabry-Perot cavity: Airy transmission, mode combs and tilt tuning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dielectric import DielectricModel, optical_constants
from .spectrum import Spectrum


@dataclass(frozen=True)
class CavityGeometry:
    """Planar cavity with two identical mirrors.

    Attributes
    ----------
    length : float
        Spacer length, cm (25 um = 2.5e-3 cm).
    r_mirror : float
        Mirror intensity reflectivity.
    t_mirror : float or None
        Mirror intensity transmission; ``None`` means lossless, ``1 - r_mirror``.
    phase : float
        Mirror reflection phase, radians.
    n_c : float
        Background index of the spacer, used for empty-cavity mode math.
    """

    length: float = 2.5e-3
    r_mirror: float = 0.96
    t_mirror: float | None = None
    phase: float = 0.0
    n_c: float = 1.375

    def __post_init__(self):
        if not 0 < self.r_mirror < 1:
            raise ValueError(f"mirror reflectivity must lie in (0, 1), got {self.r_mirror}")
        if self.t_mirror is None:
            object.__setattr__(self, "t_mirror", 1.0 - self.r_mirror)
        if not 0 < self.t_mirror <= 1 - self.r_mirror + 1e-12:
            raise ValueError(
                f"mirror transmission must lie in (0, 1 - R], got {self.t_mirror}"
            )
        if not self.length > 0:
            raise ValueError(f"cavity length must be > 0, got {self.length}")
        if not self.n_c >= 1:
            raise ValueError(f"cavity index must be >= 1, got {self.n_c}")


def airy_transmission(n, alpha, nu, cav: CavityGeometry):
    """Airy formula with frequency-dependent index ``n`` and absorption ``alpha``."""
    L = cav.length
    single = np.exp(-np.asarray(alpha) * L)
    R = cav.r_mirror
    denom = 1 + R**2 * single**2 - 2 * R * single * np.cos(4 * np.pi * np.asarray(n) * L * nu + 2 * cav.phase)
    return cav.t_mirror**2 * single / denom


def fp_transmission(cav: CavityGeometry, medium: DielectricModel | None, grid) -> Spectrum:
    """Transmission of the cavity filled with ``medium`` (empty spacer if ``None``)."""
    grid = np.asarray(grid, dtype=float)
    if medium is None:
        medium = DielectricModel(cav.n_c)
    oc = optical_constants(medium, grid)
    return Spectrum(grid, {"T": airy_transmission(oc.n, oc.alpha, grid, cav)})


def free_spectral_range(cav: CavityGeometry) -> float:
    """Mode spacing 1 / (2 n_c L) in cm^-1 at normal incidence."""
    return 1.0 / (2 * cav.n_c * cav.length)


def mode_frequencies(cav: CavityGeometry, nu_min: float, nu_max: float) -> np.ndarray:
    """Empty-cavity resonances (cos term equal to 1) inside ``[nu_min, nu_max]``."""
    fsr = free_spectral_range(cav)
    offset = cav.phase / np.pi
    m_lo = int(np.ceil(nu_min / fsr + offset))
    m_hi = int(np.floor(nu_max / fsr + offset))
    m = np.arange(max(m_lo, 1), m_hi + 1)
    return (m - offset) * fsr


def length_for_mode(nu: float, order: int, n_c: float, phase: float = 0.0) -> float:
    """Spacer length (cm) placing empty-cavity mode ``order`` at ``nu``."""
    return (order - phase / np.pi) / (2 * n_c * nu)


def airy_fwhm(r_mirror: float, fsr: float) -> float:
    """Exact full width at half maximum of a lossless Airy peak, cm^-1."""
    s = (1 - r_mirror) / (2 * np.sqrt(r_mirror))
    return float(fsr / np.pi * 2 * np.arcsin(min(s, 1.0)))


def reflectivity_for_linewidth(fwhm: float, fsr: float) -> float:
    """Mirror reflectivity giving Airy peaks of width ``fwhm`` at spacing ``fsr``."""
    if not 0 < fwhm < fsr / 2:
        raise ValueError("linewidth must be positive and below half the free spectral range")
    s = np.sin(np.pi * fwhm / (2 * fsr))
    root = -s + np.sqrt(s * s + 1)
    return float(root**2)


def cavity_mode_at_angle(e0, theta_deg, n_c: float):
    """Mode frequency at external tilt ``theta_deg`` for normal-incidence frequency ``e0``.

    Planar-cavity law E0 / sqrt(1 - sin^2(theta) / n_c^2); the mode blue-shifts
    monotonically with tilt.
    """
    theta = np.deg2rad(np.asarray(theta_deg, dtype=float))
    if np.any(theta < 0) or np.any(theta >= np.pi / 2):
        raise ValueError("tilt angle must lie in [0, 90) degrees")
    ratio = np.sin(theta) / n_c
    if np.any(ratio >= 1):
        raise ValueError("sin(theta) >= n_c: no propagating internal angle")
    out = np.asarray(e0) / np.sqrt(1 - ratio**2)
    return float(out) if out.ndim == 0 else out


def angle_for_mode(target, e0: float, n_c: float):
    """Inverse of :func:`cavity_mode_at_angle`: tilt in degrees that moves ``e0`` to ``target``."""
    target = np.asarray(target, dtype=float)
    if np.any(target < e0):
        raise ValueError("tilting only blue-shifts the mode; target must be >= e0")
    s = n_c * np.sqrt(1 - (e0 / target) ** 2)
    if np.any(s >= 1):
        raise ValueError("target mode is not reachable below 90 degrees")
    out = np.rad2deg(np.arcsin(s))
    return float(out) if out.ndim == 0 else out
