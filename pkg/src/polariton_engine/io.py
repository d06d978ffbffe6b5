"""Deterministic CSV/JSON persistence for spectra, tables and fit results.

Floats are written with ``repr`` (shortest string that parses back to the
same double), so a write/read cycle is exact and identical inputs give
identical bytes. Files are UTF-8 with LF line endings.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .spectrum import Spectrum

GRID_COLUMN = "wavenumber_cm-1"


class FileFormatError(ValueError):
    """Malformed data file; ``line`` is 1-based when the problem is row-specific."""

    def __init__(self, path, message: str, line: int | None = None):
        self.path = str(path)
        self.line = line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def table_text(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} values for {len(header)} columns")
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def spectrum_text(spec: Spectrum) -> str:
    names = spec.names
    cols = [spec.grid] + [spec[n] for n in names]
    return table_text([GRID_COLUMN] + names, zip(*cols))


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def sidecar_text(config: dict, artifact: str) -> str:
    return json_text({"artifact": artifact, "config": config, "engine": "polariton-engine", "version": __version__})


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_spectrum(path, spec: Spectrum, config: dict | None = None) -> Path:
    """Write a spectrum CSV and, when ``config`` is given, its sidecar."""
    path = Path(path)
    _write(path, spectrum_text(spec))
    if config is not None:
        _write(sidecar_path(path), sidecar_text(config, path.name))
    return path


def _read_lines(path) -> list[str]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise FileFormatError(path, f"cannot read: {exc.strerror or exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FileFormatError(path, "not valid UTF-8") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _parse_float(path, token: str, line: int, column: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise FileFormatError(path, f"column '{column}': cannot parse {token!r} as a number", line) from None


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Header and float matrix of a numeric CSV; empty cells read as NaN."""
    lines = _read_lines(path)
    if not lines:
        raise FileFormatError(path, "empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if len(set(header)) != len(header) or any(not h for h in header):
        raise FileFormatError(path, "header has empty or duplicate column names", 1)
    rows = []
    for lineno, text in enumerate(lines[1:], start=2):
        if not text.strip():
            raise FileFormatError(path, "blank line", lineno)
        cells = text.split(",")
        if len(cells) != len(header):
            raise FileFormatError(path, f"expected {len(header)} values, found {len(cells)}", lineno)
        rows.append(
            [np.nan if c.strip() == "" else _parse_float(path, c, lineno, h) for c, h in zip(cells, header)]
        )
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


def read_spectrum(path) -> Spectrum:
    """Parse a spectrum CSV, checking the header, row shape and grid ordering."""
    header, data = read_table(path)
    if header[0] != GRID_COLUMN:
        raise FileFormatError(path, f"first column must be '{GRID_COLUMN}', found '{header[0]}'", 1)
    if len(header) < 2:
        raise FileFormatError(path, "no data channels", 1)
    if data.shape[0] < 2:
        raise FileFormatError(path, "need at least two rows")
    grid = data[:, 0]
    if not np.all(np.isfinite(grid)):
        bad = int(np.flatnonzero(~np.isfinite(grid))[0])
        raise FileFormatError(path, "non-finite wavenumber", bad + 2)
    steps = np.diff(grid)
    if np.any(steps <= 0):
        bad = int(np.flatnonzero(steps <= 0)[0]) + 1
        raise FileFormatError(path, "wavenumbers must be strictly increasing", bad + 2)
    return Spectrum(grid, {name: data[:, i + 1].copy() for i, name in enumerate(header[1:])})


def read_sidecar(path) -> dict:
    side = sidecar_path(path)
    try:
        return json.loads(side.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileFormatError(side, f"missing sidecar: {exc.strerror or exc}") from exc


# ---------------------------------------------------------------------------
# sweep summaries and fit results

SWEEP_COLUMNS = (
    "model",
    "detuning_cm-1",
    "theta_deg",
    "e_lp_cm-1",
    "e_up_cm-1",
    "up_zero_crossing_cm-1",
    "lp_extremum_position_cm-1",
    "lp_extremum",
    "spectrum_file",
)

ANGLE_COLUMNS = ("theta_deg", "e_lp_cm-1", "e_up_cm-1", "a_lp", "a_up", "splitting_cm-1")

DISPERSION_COLUMNS = ("theta_deg", "e_lp_cm-1", "e_up_cm-1")


def read_dispersion_points(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(theta, E_LP, E_UP) columns of a dispersion CSV; extra columns are ignored."""
    header, data = read_table(path)
    missing = [c for c in DISPERSION_COLUMNS if c not in header]
    if missing:
        raise FileFormatError(path, f"missing column(s) {', '.join(missing)}", 1)
    cols = [data[:, header.index(c)] for c in DISPERSION_COLUMNS]
    for col, name in zip(cols, DISPERSION_COLUMNS):
        bad = np.flatnonzero(~np.isfinite(col))
        if bad.size:
            raise FileFormatError(path, f"column '{name}' has a missing value", int(bad[0]) + 2)
    return tuple(cols)


def sweep_summary_text(rows) -> str:
    """``rows`` are (model, detuning, theta, features, file name) tuples."""
    out = []
    for model, detuning, theta, f, name in rows:
        out.append(
            (model, detuning, theta, f.e_lp, f.e_up, f.up_zero_crossing, f.lp_extremum_position, f.lp_extremum, name)
        )
    return table_text(SWEEP_COLUMNS, out)


def read_sweep_summary(path) -> list[dict]:
    lines = _read_lines(path)
    if not lines or lines[0] != ",".join(SWEEP_COLUMNS):
        raise FileFormatError(path, "not a sweep summary (unexpected header)", 1)
    out = []
    for lineno, text in enumerate(lines[1:], start=2):
        cells = text.split(",")
        if len(cells) != len(SWEEP_COLUMNS):
            raise FileFormatError(path, f"expected {len(SWEEP_COLUMNS)} values, found {len(cells)}", lineno)
        row = {"model": cells[0], "spectrum_file": cells[-1]}
        for col, c in zip(SWEEP_COLUMNS[1:-1], cells[1:-1]):
            row[col] = np.nan if c == "" else _parse_float(path, c, lineno, col)
        out.append(row)
    return out


def fit_result_text(result) -> str:
    data = result.to_json_dict()
    data["extras"] = {k: v for k, v in data["extras"].items() if _json_ok(v)}
    return json_text(data)


def _json_ok(v) -> bool:
    try:
        json.dumps(v, allow_nan=False)
    except (TypeError, ValueError):
        return False
    return True


def read_fit_result(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(path, f"invalid JSON: {exc.msg}", exc.lineno) from exc
