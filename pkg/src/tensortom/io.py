"""File formats: tensor grids (binary), sinograms (CSV + JSON sidecar), plot CSV."""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .fields import TensorField
from .grid import GridSpec
from .transform import Sinogram

MAGIC = b"TTGRID01"
_HEADER = struct.Struct("<8sI")


class FormatError(ValueError):
    """Malformed or inconsistent input file."""


def save_tensor(path, F: TensorField) -> None:
    """Magic, little-endian u32 n, then f11, f12, f22 as row-major float64 [i, j] = (x1_i, x2_j)."""
    n = F.grid.n
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n))
        for comp in F.components:
            fh.write(np.ascontiguousarray(comp, dtype="<f8").tobytes())


def load_tensor(path) -> TensorField:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, n = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 3 * n * n * 8
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for n={n}, found {len(data)}")
    try:
        grid = GridSpec(n)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    arr = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(3, n, n).astype(float)
    try:
        return TensorField(grid, arr[0], arr[1], arr[2])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _sidecar(path) -> Path:
    p = Path(path)
    return p.with_suffix(p.suffix + ".json")


def save_sinogram(path, s: Sinogram, cls: str | None = None) -> None:
    """CSV ``beta,phi,value`` with beta as the outer loop; metadata in ``<path>.json``."""
    betas, phis = s.betas, s.phis
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "phi", "value"])
        for b in range(s.n_beta):
            for p in range(s.n_phi):
                w.writerow([repr(float(betas[b])), repr(float(phis[p])), repr(float(s.values[b, p]))])
    meta = {"mu": s.mu, "n_beta": s.n_beta, "n_phi": s.n_phi}
    if cls is not None:
        meta["class"] = cls
    _sidecar(path).write_text(json.dumps(meta, indent=2, sort_keys=True))


def load_sinogram(path) -> tuple[Sinogram, dict]:
    side = _sidecar(path)
    if not Path(path).exists():
        raise FormatError(f"{path}: no such file")
    if not side.exists():
        raise FormatError(f"{side}: missing sinogram sidecar")
    try:
        meta = json.loads(side.read_text())
        n_beta, n_phi, mu = int(meta["n_beta"]), int(meta["n_phi"]), float(meta["mu"])
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"{side}: {exc}") from exc
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["beta", "phi", "value"]:
        raise FormatError(f"{path}: expected header beta,phi,value")
    body = rows[1:]
    if len(body) != n_beta * n_phi:
        raise FormatError(f"{path}: {len(body)} rows, expected {n_beta * n_phi}")
    try:
        values = np.array([float(r[2]) for r in body]).reshape(n_beta, n_phi)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    try:
        return Sinogram(mu, n_beta, n_phi, values), meta
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def save_plot_csv(path, F: TensorField) -> None:
    """Inside nodes as ``x,y,f11,f12,f22`` rows for external plotting."""
    g = F.grid
    x1, x2 = g.mesh
    ins = g.inside
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "f11", "f12", "f22"])
        for row in zip(x1[ins], x2[ins], F.f11[ins], F.f12[ins], F.f22[ins]):
            w.writerow([repr(float(v)) for v in row])
