"""2x2 transfer-matrix solver for planar stacks of dispersive, absorbing layers.

Conventions: wavenumbers in cm^-1, thicknesses in cm, ``theta`` is the
external (vacuum) incidence angle in degrees, so the conserved transverse
wavevector is ``2 pi nu sin(theta)`` in every layer. Absorbing media have
``n + i k`` with ``k > 0``; fields vary as ``exp(i (kz z - omega t))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Sequence, Union

import numpy as np

from .dielectric import DielectricModel, complex_index
from .spectrum import Spectrum, find_peaks

Medium = Union[DielectricModel, complex, float]
Polarization = Literal["s", "p"]


class NoSplittingError(ValueError):
    """Raised when two transmission maxima bracketing the vibration are not found."""


@dataclass(frozen=True)
class Layer:
    """Homogeneous slab; ``thickness=np.inf`` marks the two outer half-spaces.

    ``medium`` is a constant index (float or complex ``n + ik``) or a
    :class:`DielectricModel`.
    """

    thickness: float
    medium: Medium

    def index(self, nu: np.ndarray) -> np.ndarray:
        if isinstance(self.medium, DielectricModel):
            return complex_index(self.medium, nu)
        return np.full(np.shape(nu), complex(self.medium))


@dataclass(frozen=True)
class Mirror:
    """Zero-thickness partially reflecting sheet embedded in a medium of real index ``index``.

    The sheet is symmetric: amplitude reflection ``sqrt(R) exp(i phase)`` from
    either side and transmission ``i sqrt(T) exp(i phase)``, which is energy
    conserving for ``T = 1 - R`` and passive for ``T < 1 - R``. Two such sheets
    around a film of the same background index form the ideal etalon of the
    single-layer Airy formula.
    """

    reflectivity: float
    transmission: float | None = None
    phase: float = 0.0
    index: float = 1.0

    def __post_init__(self):
        if not 0 <= self.reflectivity < 1:
            raise ValueError("mirror reflectivity must lie in [0, 1)")
        if self.transmission is None:
            object.__setattr__(self, "transmission", 1.0 - self.reflectivity)
        if not 0 < self.transmission <= 1 - self.reflectivity + 1e-12:
            raise ValueError("mirror transmission must lie in (0, 1 - R]")


Element = Union[Layer, Mirror]


@dataclass(frozen=True)
class LayerStack:
    """Ordered elements, incidence side first; the first and last are half-spaces."""

    layers: tuple[Element, ...]
    polarization: Polarization = "s"
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        layers = self.layers
        if len(layers) < 3:
            raise ValueError("a stack needs an ambient, at least one film and a substrate")
        for end in (layers[0], layers[-1]):
            if not isinstance(end, Layer) or not np.isinf(end.thickness):
                raise ValueError("first and last elements must be semi-infinite layers")
        for el in layers[1:-1]:
            if isinstance(el, Layer) and not (0 < el.thickness < np.inf):
                raise ValueError("interior layers need a finite positive thickness")
        if self.polarization not in ("s", "p"):
            raise ValueError(f"polarization must be 's' or 'p', got {self.polarization!r}")
        if not 0 <= self.theta < 90:
            raise ValueError("incidence angle must lie in [0, 90) degrees")

    def reversed(self) -> LayerStack:
        return replace(self, layers=self.layers[::-1])

    def at_angle(self, theta: float) -> LayerStack:
        return replace(self, theta=theta)


def _normal_component(n: np.ndarray, beta: float) -> np.ndarray:
    """``n cos(theta_j)`` with the branch that decays or propagates forward."""
    q = np.sqrt(n * n - beta * beta + 0j)
    flip = (q.imag < 0) | ((q.imag == 0) & (q.real < 0))
    return np.where(flip, -q, q)


def _interface(n_i, q_i, n_j, q_j, pol):
    if pol == "s":
        den = q_i + q_j
        return (q_i - q_j) / den, 2 * q_i / den
    # p polarization, q = n cos(theta), cos = q / n
    c_i = q_i / n_i
    c_j = q_j / n_j
    den = n_j * c_i + n_i * c_j
    return (n_j * c_i - n_i * c_j) / den, 2 * n_i * c_i / den


def _interface_matrix(r, t):
    m = np.empty(r.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1 / t
    m[..., 0, 1] = r / t
    m[..., 1, 0] = r / t
    m[..., 1, 1] = 1 / t
    return m


def _sheet_matrix(mirror: Mirror, shape):
    r = np.sqrt(mirror.reflectivity) * np.exp(1j * mirror.phase)
    t = 1j * np.sqrt(mirror.transmission) * np.exp(1j * mirror.phase)
    m = np.empty(shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1 / t
    m[..., 0, 1] = -r / t
    m[..., 1, 0] = r / t
    m[..., 1, 1] = (t * t - r * r) / t
    return m


def _propagation_matrix(phase):
    m = np.zeros(phase.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = np.exp(-1j * phase)
    m[..., 1, 1] = np.exp(1j * phase)
    return m


def amplitudes(stack: LayerStack, grid):
    """Complex amplitude coefficients ``(r, t)`` and the ambient/substrate indices.

    Returns ``r, t, (n0, q0), (nN, qN)`` with ``q = n cos(theta)``.
    """
    nu = np.asarray(grid, dtype=float)
    if np.any(nu <= 0):
        raise ValueError("wavenumbers must be strictly positive")
    beta = np.sin(np.deg2rad(stack.theta))
    pol = stack.polarization

    # Expand mirrors into (host interface, sheet, host interface); host is a zero-thickness medium.
    media: list[np.ndarray] = []
    ops: list[tuple[str, object]] = []
    for el in stack.layers:
        if isinstance(el, Mirror):
            media.append(np.full(nu.shape, complex(el.index)))
            ops.append(("sheet", el))
        else:
            n = el.index(nu)
            if np.any(n.imag < 0):
                raise ValueError("gain media (k < 0) are not supported")
            media.append(n)
            ops.append(("layer", el))

    n0 = media[0]
    if np.any(n0.imag != 0) or np.any(media[-1].imag != 0):
        raise ValueError("ambient and substrate half-spaces must be non-absorbing")
    if np.any(beta >= n0.real):
        raise ValueError("sin(theta) >= ambient index: incident wave is evanescent")

    qs = [_normal_component(n, beta) for n in media]
    total = np.broadcast_to(np.eye(2, dtype=complex), nu.shape + (2, 2)).copy()
    for j in range(len(media)):
        kind, el = ops[j]
        if j > 0:
            r, t = _interface(media[j - 1], qs[j - 1], media[j], qs[j], pol)
            total = total @ _interface_matrix(r, t)
        if kind == "sheet":
            total = total @ _sheet_matrix(el, nu.shape)
        elif 0 < j < len(media) - 1:
            phase = 2 * np.pi * nu * qs[j] * el.thickness
            total = total @ _propagation_matrix(phase)

    t = 1 / total[..., 0, 0]
    r = total[..., 1, 0] / total[..., 0, 0]
    return r, t, (n0, qs[0]), (media[-1], qs[-1])


def tra(stack: LayerStack, grid) -> Spectrum:
    """Intensity transmission, reflection and absorption ``A = 1 - T - R``."""
    grid = np.asarray(grid, dtype=float)
    r, t, (n0, q0), (nn, qn) = amplitudes(stack, grid)
    if stack.polarization == "s":
        ratio = qn.real / q0.real
    else:
        ratio = (nn * np.conj(qn / nn)).real / (n0 * np.conj(q0 / n0)).real
    T = ratio * np.abs(t) ** 2
    R = np.abs(r) ** 2
    return Spectrum(grid, {"T": T, "R": R, "A": 1 - T - R})


def quarter_wave_mirror(
    n_high: complex,
    n_low: complex,
    pairs: int,
    center: float,
    high_first: bool = True,
) -> list[Layer]:
    """Quarter-wave Bragg reflector at ``center`` (cm^-1): ``pairs`` H/L pairs.

    With ``high_first`` the sequence is H L H L ... as seen from the incidence side.
    """
    def qw(n):
        return Layer(1.0 / (4 * complex(n).real * center), n)

    pair = [qw(n_high), qw(n_low)] if high_first else [qw(n_low), qw(n_high)]
    return pair * pairs


def microcavity(
    medium: Medium,
    spacer: float,
    mirror: Sequence[Element],
    ambient: Medium = 1.0,
    substrate: Medium | None = None,
    polarization: Polarization = "s",
    theta: float = 0.0,
) -> LayerStack:
    """ambient | mirror | spacer filled with ``medium`` | mirror reversed | substrate.

    ``mirror`` is listed from the ambient side toward the spacer; the second
    mirror is its mirror image so the cavity is symmetric.
    """
    substrate = ambient if substrate is None else substrate
    layers = (
        [Layer(np.inf, ambient)]
        + list(mirror)
        + [Layer(spacer, medium)]
        + list(mirror)[::-1]
        + [Layer(np.inf, substrate)]
    )
    return LayerStack(tuple(layers), polarization, theta)


def replace_spacer_medium(stack: LayerStack, medium: Medium, spacer_index: int | None = None) -> LayerStack:
    """Copy of ``stack`` with the spacer layer's medium swapped.

    The spacer defaults to the thickest interior layer.
    """
    if spacer_index is None:
        spacer_index = _spacer_index(stack)
    layers = list(stack.layers)
    layers[spacer_index] = replace(layers[spacer_index], medium=medium)
    return replace(stack, layers=tuple(layers))


def _spacer_index(stack: LayerStack) -> int:
    interior = [
        (el.thickness, i)
        for i, el in enumerate(stack.layers[1:-1], start=1)
        if isinstance(el, Layer)
    ]
    if not interior:
        raise ValueError("stack has no interior layer")
    return max(interior)[1]


@dataclass
class AngleSweep:
    """Per-angle polariton table from :func:`polariton_absorption_vs_angle`."""

    theta: np.ndarray
    e_lp: np.ndarray
    e_up: np.ndarray
    a_lp: np.ndarray
    a_up: np.ndarray
    diagnostics: list[str] = field(default_factory=list)

    @property
    def splitting(self) -> np.ndarray:
        return self.e_up - self.e_lp

    @property
    def absorption(self) -> np.ndarray:
        """Mean polariton absorption (A_LP + A_UP) / 2."""
        return (self.a_lp + self.a_up) / 2

    @property
    def theta_min_splitting(self) -> float:
        return float(self.theta[np.nanargmin(self.splitting)])

    @property
    def theta_max_absorption(self) -> float:
        return float(self.theta[np.nanargmax(self.absorption)])

    def rows(self):
        for row in zip(self.theta, self.e_lp, self.e_up, self.a_lp, self.a_up, self.splitting):
            yield tuple(float(v) for v in row)


def locate_polaritons(
    stack: LayerStack, grid, nu01: float, window: float = 60.0, min_height: float = 0.0
):
    """LP and UP as the transmission maxima closest to ``nu01`` on either side.

    Returns ``(E_LP, E_UP)`` refined to sub-grid precision. The grid should be
    no coarser than 0.1 cm^-1. Maxima lower than ``min_height`` are ignored.
    Raises :class:`NoSplittingError` when one side has no maximum inside
    ``nu01 +/- window``.
    """
    grid = _window(grid, nu01, window)
    return _bracketing_peaks(grid, tra(stack, grid)["T"], nu01, min_height, stack.theta)


def _window(grid, nu01, window):
    grid = np.asarray(grid, dtype=float)
    return grid[(grid >= nu01 - window) & (grid <= nu01 + window)]


def _bracketing_peaks(grid, T, nu01, min_height, theta):
    peaks = find_peaks(grid, T, min_height=min_height, min_prominence=1e-4 * float(T.max()))
    below = peaks[peaks < nu01]
    above = peaks[peaks > nu01]
    if below.size == 0 or above.size == 0:
        raise NoSplittingError(
            f"theta={theta:g}: {peaks.size} transmission peak(s) near {nu01:g} cm^-1, "
            "no polariton pair bracketing the vibration (weak coupling?)"
        )
    return float(below.max()), float(above.min())


def polariton_absorption_vs_angle(
    stack: LayerStack,
    thetas,
    grid,
    nu01: float,
    window: float = 60.0,
    min_rel_height: float = 0.05,
) -> AngleSweep:
    """Polariton frequencies, absorption and splitting across tilt angles.

    Transmission maxima weaker than ``min_rel_height`` times the largest
    transmission seen anywhere in the sweep are ignored; this drops the faint
    ripples a far-detuned cavity leaves around the bare absorption line.
    Angles without a polariton pair contribute NaN entries and a line in
    ``diagnostics``; if no angle yields a pair, :class:`NoSplittingError` is raised.
    """
    thetas = np.asarray(thetas, dtype=float)
    grid = _window(grid, nu01, window)
    spectra = [tra(stack.at_angle(float(th)), grid)["T"] for th in thetas]
    floor = min_rel_height * max(float(T.max()) for T in spectra)
    out = np.full((4, thetas.size), np.nan)
    diagnostics = []
    for i, (theta, T) in enumerate(zip(thetas, spectra)):
        try:
            lp, up = _bracketing_peaks(grid, T, nu01, floor, theta)
        except NoSplittingError as exc:
            diagnostics.append(str(exc))
            continue
        A = tra(stack.at_angle(float(theta)), np.array([lp, up]))["A"]
        out[:, i] = lp, up, A[0], A[1]
    if np.all(np.isnan(out[0])):
        raise NoSplittingError("no polariton splitting at any angle: " + diagnostics[0])
    return AngleSweep(thetas, out[0], out[1], out[2], out[3], diagnostics)
