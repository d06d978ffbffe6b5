"""Spectrum container and peak utilities shared by the optics modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Spectrum:
    """Frequency grid (cm^-1) with named real-valued channels.

    Parameters
    ----------
    grid : array_like
        Strictly increasing wavenumbers in cm^-1.
    channels : dict[str, array_like]
        Channel name to values, each the same length as ``grid``.
    """

    grid: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 1 or self.grid.size == 0:
            raise ValueError("grid must be a non-empty 1-D array")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        self.channels = {k: np.asarray(v, dtype=float) for k, v in self.channels.items()}
        for name, values in self.channels.items():
            if values.shape != self.grid.shape:
                raise ValueError(
                    f"channel {name!r} has length {values.size}, grid has {self.grid.size}"
                )

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def __contains__(self, name: str) -> bool:
        return name in self.channels

    @property
    def names(self) -> list[str]:
        return list(self.channels)

    def with_channel(self, name: str, values) -> Spectrum:
        channels = dict(self.channels)
        channels[name] = values
        return Spectrum(self.grid.copy(), channels)

    def window(self, lo: float, hi: float) -> Spectrum:
        """Sub-spectrum restricted to ``lo <= grid <= hi``."""
        mask = (self.grid >= lo) & (self.grid <= hi)
        return Spectrum(self.grid[mask], {k: v[mask] for k, v in self.channels.items()})


def make_grid(nu_min: float, nu_max: float, step: float) -> np.ndarray:
    """Uniform grid from ``nu_min`` to ``nu_max`` inclusive.

    The point count is rounded so that floating-point accumulation never
    adds or drops the last point.
    """
    if not nu_min < nu_max:
        raise ValueError("nu_min must be smaller than nu_max")
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((nu_max - nu_min) / step + 1e-9)) + 1
    return nu_min + step * np.arange(n)


def find_peaks(x, y, min_height: float = 0.0, min_prominence: float = 0.0) -> np.ndarray:
    """Local maxima of ``y(x)`` with parabolic sub-grid refinement.

    A point is a maximum when it exceeds its left neighbour and is not
    smaller than its right one (flat tops count once). Prominence is
    measured against the higher of the two minima separating the peak
    from the nearest higher samples.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        return np.empty(0)
    idx = np.where((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1
    out = []
    for i in idx:
        if y[i] < min_height:
            continue
        if min_prominence > 0 and _prominence(y, i) < min_prominence:
            continue
        out.append(_parabolic_vertex(x, y, i))
    return np.asarray(out)


def _prominence(y: np.ndarray, i: int) -> float:
    left = y[:i][::-1]
    higher = np.nonzero(left > y[i])[0]
    left_min = left[: higher[0]].min() if higher.size else (left.min() if left.size else y[i])
    right = y[i + 1 :]
    higher = np.nonzero(right > y[i])[0]
    right_min = right[: higher[0]].min() if higher.size else (right.min() if right.size else y[i])
    return float(y[i] - max(left_min, right_min))


def _parabolic_vertex(x: np.ndarray, y: np.ndarray, i: int) -> float:
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a >= 0:
        return float(x1)
    vertex = -b / (2 * a)
    return float(np.clip(vertex, x0, x2))


def zero_crossings(x, y) -> np.ndarray:
    """Linearly interpolated sign changes of ``y(x)``; exact zeros are kept once."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = []
    s = np.sign(y)
    for i in range(len(y) - 1):
        if s[i] == 0:
            if i == 0 or s[i - 1] != 0:
                out.append(x[i])
        elif s[i + 1] != 0 and s[i] != s[i + 1]:
            out.append(x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i]))
    return np.asarray(out)


def fwhm(x, y) -> float:
    """Full width at half maximum of the tallest peak, interpolated at both edges."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    half = y[i] / 2
    lo = i
    while lo > 0 and y[lo] > half:
        lo -= 1
    hi = i
    while hi < len(y) - 1 and y[hi] > half:
        hi += 1
    if y[lo] > half or y[hi] > half:
        raise ValueError("peak is not resolved to half maximum inside the grid")
    left = x[lo] + (half - y[lo]) * (x[lo + 1] - x[lo]) / (y[lo + 1] - y[lo])
    right = x[hi - 1] + (half - y[hi - 1]) * (x[hi] - x[hi - 1]) / (y[hi] - y[hi - 1])
    return float(right - left)
