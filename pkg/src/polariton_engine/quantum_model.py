"""Input-output model of a cavity mode coupled to an ensemble of anharmonic vibrations.

The probe sees the cavity through the cavity-cavity element of the resolvent
of a 3x3 non-Hermitian mode-coupling matrix with rows (cavity, 0->1
polarization, 1->2 polarization). A fraction ``f_pu`` of excited molecules
contracts the 0->1 coupling by sqrt(1 - 2 f_pu) and opens a 1->2 channel of
strength gN sqrt(2 f_pu) (1 + delta). Damping enters as -i * FWHM / 2 on the
diagonal. All quantities are in cm^-1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .spectrum import Spectrum


@dataclass(frozen=True)
class QmParams:
    """Model parameters; defaults reproduce the W(CO)6 microcavity at zero detuning.

    Attributes
    ----------
    omega0 : float
        Fundamental (0->1) molecular frequency.
    omega_c : float
        Cavity frequency.
    anh : float
        Anharmonic shift; the 1->2 line sits at ``omega0 - 2 * anh``.
    gN : float
        Collective coupling g sqrt(N).
    delta : float
        Electrical anharmonicity, mu12 = sqrt(2) mu01 (1 + delta).
    kappa : float
        Cavity FWHM.
    gamma_m : float
        Molecular FWHM (used for both molecular lines).
    f_pu : float
        Excited fraction N_pump / N.
    """

    omega0: float = 1983.0
    omega_c: float = 1983.0
    anh: float = 7.5
    gN: float = 18.5
    delta: float = -0.25
    kappa: float = 10.0
    gamma_m: float = 3.0
    f_pu: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if not self.gamma_m >= 0:
            raise ValueError("gamma_m must be >= 0")
        if not self.gN >= 0:
            raise ValueError("gN must be >= 0")
        if not 0 <= self.f_pu <= 0.5:
            raise ValueError("f_pu must lie in [0, 0.5]")
        if not self.delta > -1:
            raise ValueError("delta must be > -1")

    @property
    def omega12(self) -> float:
        return self.omega0 - 2 * self.anh

    @property
    def detuning(self) -> float:
        return self.omega_c - self.omega0

    def with_(self, **changes) -> QmParams:
        return replace(self, **changes)


def couplings(p: QmParams) -> tuple[float, float]:
    """Cavity couplings to the 0->1 and 1->2 polarizations."""
    g01 = p.gN * np.sqrt(1 - 2 * p.f_pu)
    g12 = p.gN * np.sqrt(2 * p.f_pu) * (1 + p.delta)
    return float(g01), float(g12)


def build_h_eff(p: QmParams) -> np.ndarray:
    """Complex-symmetric 3x3 mode-coupling matrix (cavity, 0->1, 1->2)."""
    g01, g12 = couplings(p)
    h = np.zeros((3, 3), dtype=complex)
    h[0, 0] = p.omega_c - 0.5j * p.kappa
    h[1, 1] = p.omega0 - 0.5j * p.gamma_m
    h[2, 2] = p.omega12 - 0.5j * p.gamma_m
    h[0, 1] = h[1, 0] = g01
    h[0, 2] = h[2, 0] = g12
    return h


@dataclass
class Eigensystem:
    """Sorted eigenvalues, unit eigenvectors (columns) and ||(M - lambda I) v|| per pair."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    near_degenerate: list[tuple[int, int]]


def _char_poly_shifted(m: np.ndarray):
    """Shift tr/3 and coefficients (p, q) of t^3 + p t + q for M - (tr/3) I."""
    shift = np.trace(m) / 3
    a = m - shift * np.eye(3)
    minors = (
        a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
        + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
    )
    det = (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )
    return shift, minors, -det


def _depressed_cubic_roots(p: complex, q: complex) -> np.ndarray:
    """Roots of t^3 + p t + q by Cardano's formula on the complex plane."""
    disc = np.sqrt(q * q / 4 + p**3 / 27 + 0j)
    u3 = -q / 2 + disc
    alt = -q / 2 - disc
    if abs(alt) > abs(u3):
        u3 = alt
    if u3 == 0:
        return np.zeros(3, dtype=complex)
    u = u3 ** (1 / 3)
    omega = np.exp(2j * np.pi / 3)
    roots = []
    for k in range(3):
        uk = u * omega**k
        roots.append(uk - p / (3 * uk))
    return np.asarray(roots, dtype=complex)


def _polish(t: complex, p: complex, q: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        f = (t * t + p) * t + q
        df = 3 * t * t + p
        if df == 0:
            break
        step = f / df
        t_new = t - step
        if abs((t_new * t_new + p) * t_new + q) > abs(f):
            break
        t = t_new
    return t


def _refine_cluster(ts: np.ndarray, p: complex) -> np.ndarray:
    """Tighten a close root pair that Newton polishing cannot resolve.

    The depressed cubic has roots summing to 0 and pairwise products summing
    to ``p``, so with the isolated root ``c`` fixed the pair solves
    x^2 + c x + (p + c^2) = 0. Roots are finally re-centred so their sum is
    exactly the trace.
    """
    scale = max(1.0, float(np.max(np.abs(ts))))
    gaps = [(abs(ts[i] - ts[j]), i, j) for i in range(3) for j in range(i + 1, 3)]
    gap, i, j = min(gaps)
    k = 3 - i - j
    if gap < 1e-4 * scale and abs(ts[k] - ts[i]) > 1e-2 * scale:
        c = ts[k]
        root = np.sqrt(c * c / 4 - (p + c * c) + 0j)
        ts = ts.copy()
        ts[i], ts[j] = -c / 2 - root, -c / 2 + root
    return ts - ts.mean()


def _null_vector(a: np.ndarray) -> np.ndarray:
    """Unit vector spanning the (numerical) kernel of a singular 3x3 matrix."""
    cands = [np.cross(a[0], a[1]), np.cross(a[0], a[2]), np.cross(a[1], a[2])]
    v = max(cands, key=np.linalg.norm)
    norm = np.linalg.norm(v)
    if norm == 0:
        # rank <= 1: any vector orthogonal (bilinearly) to the largest row
        row = a[np.argmax(np.linalg.norm(a, axis=1))]
        if np.linalg.norm(row) == 0:
            return np.array([1.0, 0.0, 0.0], dtype=complex)
        basis = np.eye(3)[np.argmin(np.abs(row))]
        v = np.cross(row, basis)
        norm = np.linalg.norm(v)
    return v / norm


def eigenvalues_3x3(m, degeneracy_tol: float = 1e-6) -> Eigensystem:
    """Eigenvalues of a 3x3 complex matrix from its characteristic cubic.

    Values are sorted by real part, then imaginary part. Pairs closer than
    ``degeneracy_tol`` are reported in ``near_degenerate`` and trigger a
    ``RuntimeWarning``; their eigenvectors are poorly conditioned.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    shift, p, q = _char_poly_shifted(m)
    ts = _refine_cluster(np.array([_polish(t, p, q) for t in _depressed_cubic_roots(p, q)]), p)
    values = ts + shift
    order = np.lexsort((values.imag, values.real))
    values = values[order]

    vectors = np.empty((3, 3), dtype=complex)
    residuals = np.empty(3)
    for i, lam in enumerate(values):
        a = m - lam * np.eye(3)
        v = _null_vector(a)
        vectors[:, i] = v
        residuals[i] = np.linalg.norm(a @ v)

    pairs = [
        (i, j)
        for i in range(3)
        for j in range(i + 1, 3)
        if abs(values[i] - values[j]) < degeneracy_tol
    ]
    if pairs:
        warnings.warn(f"near-degenerate eigenvalues {pairs}", RuntimeWarning, stacklevel=2)
    return Eigensystem(values, vectors, residuals, pairs)


def resonances(p: QmParams) -> np.ndarray:
    """Complex resonances of the transient system, sorted by real part."""
    return eigenvalues_3x3(build_h_eff(p)).values


def up_resonance(p: QmParams) -> float:
    """Real part of the highest resonance (the upper polariton)."""
    return float(resonances(p)[-1].real)


def _grid(grid) -> np.ndarray:
    return np.asarray(grid, dtype=float)


def cavity_amplitude(p: QmParams, grid) -> np.ndarray:
    """Complex transmission amplitude (kappa/2) [(i w - i h_eff)^-1]_cc.

    The 1->2 line and the cavity decouple from the 0->1 line except through the
    cavity, so the cavity element of the resolvent is a continued fraction.
    """
    w = _grid(grid)
    h = build_h_eff(p)
    self_energy = h[0, 1] ** 2 / (w - h[1, 1]) + h[0, 2] ** 2 / (w - h[2, 2])
    green = 1 / (w - h[0, 0] - self_energy)
    return -1j * (p.kappa / 2) * green


def linear_transmission(p: QmParams, grid) -> Spectrum:
    """Ground-state probe transmission, normalised so the empty-cavity peak is 1."""
    if p.f_pu != 0:
        raise ValueError("linear_transmission needs f_pu = 0; use transient_transmission")
    w = _grid(grid)
    mol = 1j * (w - p.omega0) - p.gamma_m / 2
    cav = 1j * (w - p.omega_c) - p.kappa / 2
    amp = (p.kappa / 2) * mol / (cav * mol + p.gN**2)
    return Spectrum(w, {"T": np.abs(amp) ** 2})


def transient_transmission(p: QmParams, grid) -> Spectrum:
    """Probe transmission with an excited fraction ``p.f_pu`` of molecules."""
    w = _grid(grid)
    return Spectrum(w, {"T": np.abs(cavity_amplitude(p, w)) ** 2})


def delta_T_qm(p: QmParams, grid) -> Spectrum:
    """Pump-probe signal -(T_excited - T_ground)."""
    w = _grid(grid)
    excited = transient_transmission(p, w)["T"]
    ground = transient_transmission(p.with_(f_pu=0.0), w)["T"]
    return Spectrum(w, {"dT": -(excited - ground)})
