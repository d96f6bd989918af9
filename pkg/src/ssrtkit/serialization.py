"""File formats: sinogram CSV / binary dumps, JSON reports, atomic writes."""

import io
import json
import math
import os
import struct
from importlib import resources
from pathlib import Path

import numpy as np

from .transforms import Sinogram, SinogramGrid

MAGIC = b"SSRT1"
_HEADER = struct.Struct("<5sIIdd")  # magic, n_rho, n_theta, sigma (nan: radon), theta_step


def atomic_write_bytes(path, payload):
    """Write via a temporary sibling and ``os.replace`` so readers never see
    a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    atomic_write_text(path, dumps_json(obj))


def load_schema(name):
    """Load one of the JSON schemas shipped in ``ssrtkit/schemas``."""
    text = resources.files("ssrtkit").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


# -- sinograms ---------------------------------------------------------------------

def sinogram_to_csv(sino):
    """Two header rows (``theta_deg,...`` and ``rho,...``) then one row per
    rho bin: the rho value followed by that row's values."""
    buf = io.StringIO()
    g = sino.grid
    buf.write("theta_deg," + ",".join(repr(float(t)) for t in np.degrees(g.theta_values)) + "\n")
    buf.write("rho," + ",".join(repr(float(r)) for r in g.rho_values) + "\n")
    for rho, row in zip(g.rho_values, sino.values):
        buf.write(repr(float(rho)) + "," + ",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def sinogram_from_csv(text, kind="radon", sigma=None):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head_t = lines[0].split(",")
    head_r = lines[1].split(",")
    if head_t[0] != "theta_deg" or head_r[0] != "rho":
        raise ValueError("not a sinogram CSV: missing theta_deg/rho header rows")
    thetas = np.radians(np.array(head_t[1:], dtype=float))
    rhos = np.array(head_r[1:], dtype=float)
    values = np.array([ln.split(",")[1:] for ln in lines[2:]], dtype=float)
    grid = _grid_from_axes(thetas, rhos)
    return Sinogram(grid, values, kind, sigma)


def _grid_from_axes(thetas, rhos):
    theta_step = math.pi / len(thetas)
    rho_step = float(rhos[1] - rhos[0]) if len(rhos) > 1 else 1.0
    return SinogramGrid(thetas, rhos, theta_step, rho_step)


def sinogram_to_bytes(sino):
    """Binary dump: header, theta values, rho values, then the values in
    row-major (rho, theta) order; all little-endian float64."""
    g = sino.grid
    sigma = math.nan if sino.sigma is None else sino.sigma
    header = _HEADER.pack(MAGIC, g.n_rho, g.n_theta, sigma, g.theta_step)
    body = b"".join(
        np.ascontiguousarray(a, dtype="<f8").tobytes()
        for a in (g.theta_values, g.rho_values, sino.values)
    )
    return header + body


def sinogram_from_bytes(data):
    if len(data) < _HEADER.size or not data.startswith(MAGIC):
        raise ValueError("not an SSRT1 sinogram dump")
    magic, n_rho, n_theta, sigma, theta_step = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError("not an SSRT1 sinogram dump")
    off = _HEADER.size
    expected = off + 8 * (n_theta + n_rho + n_rho * n_theta)
    if len(data) != expected:
        raise ValueError(f"sinogram dump has {len(data)} bytes, expected {expected}")
    arr = np.frombuffer(data, dtype="<f8", offset=off).astype(np.float64)
    thetas = arr[:n_theta]
    rhos = arr[n_theta:n_theta + n_rho]
    values = arr[n_theta + n_rho:].reshape(n_rho, n_theta)
    rho_step = float(rhos[1] - rhos[0]) if n_rho > 1 else 1.0
    grid = SinogramGrid(thetas, rhos, theta_step, rho_step)
    if math.isnan(sigma):
        return Sinogram(grid, values, "radon")
    return Sinogram(grid, values, "ssrt", sigma)


def write_sinogram(path, sino):
    """Format from suffix: ``.csv`` for text, anything else for the binary dump."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        atomic_write_text(path, sinogram_to_csv(sino))
    else:
        atomic_write_bytes(path, sinogram_to_bytes(sino))


def read_sinogram(path):
    path = Path(path)
    data = path.read_bytes()
    if data.startswith(MAGIC):
        return sinogram_from_bytes(data)
    return sinogram_from_csv(data.decode("utf-8"))


def projections_csv(measure):
    """Columns ``rho,proj,reflected`` for one inspected projection."""
    buf = io.StringIO()
    buf.write("rho,proj,reflected\n")
    for r, p, q in zip(measure.rho, measure.projection, measure.reflected):
        buf.write(f"{float(r)!r},{float(p)!r},{float(q)!r}\n")
    return buf.getvalue()
