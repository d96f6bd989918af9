"""Image containers, raster I/O, binarization, impulse noise and the
rotate-by-pi ground-truth oracle.

Coordinates
-----------
Arrays are indexed ``pixels[row, col]``.  All transform math uses centered
coordinates ``x = col - (width - 1) / 2`` and ``y = row - (height - 1) / 2``,
so ``y`` grows downwards and the origin is the image center.
"""

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .validation import (
    EmptyObjectError,
    ValidationError,
    check_array_2d,
    check_binary,
    check_fraction,
    check_unit_range,
)

__all__ = [
    "GrayImage",
    "NormalizedImage",
    "as_gray",
    "centered_coordinates",
    "load_image",
    "save_image",
    "normalize",
    "binarize",
    "add_impulse_noise",
    "rotate_pi_about_centroid",
    "em_measure",
]


@dataclass(frozen=True)
class GrayImage:
    """Intensity grid with values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = check_unit_range(check_array_2d(self.pixels, "pixels"), "pixels")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def shape(self):
        return self.pixels.shape

    def is_binary(self):
        return bool(np.all((self.pixels == 0) | (self.pixels == 1)))


@dataclass(frozen=True)
class NormalizedImage(GrayImage):
    """Image rescaled to unit total mass; ``total_mass`` is the original sum."""

    total_mass: float = field(default=1.0)


def as_gray(img):
    if isinstance(img, GrayImage):
        return img
    return GrayImage(np.asarray(img, dtype=np.float64))


def _as_normalized(img):
    if isinstance(img, NormalizedImage):
        return img
    return normalize(img)


def centered_coordinates(shape):
    """Return ``(x, y)`` grids of centered pixel-center coordinates."""
    h, w = shape
    x = np.arange(w, dtype=np.float64) - (w - 1) / 2.0
    y = np.arange(h, dtype=np.float64) - (h - 1) / 2.0
    return np.meshgrid(x, y)


# -- raster I/O --------------------------------------------------------------

def _read_pgm(data):
    """Parse binary (P5) or ASCII (P2) PGM bytes into (values, maxval)."""
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise ValueError("unsupported format: not a PGM file")
    tokens = []
    pos = 2
    # header: width, height, maxval; '#' comments run to end of line
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError("truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise ValueError("zero-dimension image")
    if not 0 < maxval < 65536:
        raise ValueError(f"invalid PGM maxval {maxval}")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        count = width * height
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    else:
        body = data[pos:].split(b"#")[0] if b"#" in data[pos:] else data[pos:]
        raw = np.array(body.split(), dtype=np.int64)
        if raw.size < width * height:
            raise ValueError("truncated PGM data")
        raw = raw[: width * height]
    return raw.reshape(height, width).astype(np.float64), maxval


def load_image(path):
    """Load an 8/16-bit grayscale PNG or PGM (P5/P2) as a :class:`GrayImage`.

    Stored integers are mapped linearly onto [0, 1] using the format's
    full-scale value.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    data = path.read_bytes()
    if data[:2] in (b"P5", b"P2"):
        values, maxval = _read_pgm(data)
        return GrayImage(values / maxval)
    try:
        with Image.open(path) as im:
            im.load()
            fmt, mode = im.format, im.mode
            arr = np.asarray(im)
    except Exception as exc:  # PIL raises a zoo of types for bad files
        raise ValueError(f"unreadable image {path}: {exc}") from exc
    if fmt != "PNG":
        raise ValueError(f"unsupported format {fmt!r}; expected PNG or PGM")
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"unsupported PNG mode {mode!r}; expected grayscale")
    if mode == "1":
        return GrayImage(arr.astype(np.float64))
    if mode == "L":
        return GrayImage(arr.astype(np.float64) / 255.0)
    if mode in ("I;16", "I;16B", "I"):
        return GrayImage(arr.astype(np.float64) / 65535.0)
    raise ValueError(f"unsupported PNG mode {mode!r}; expected grayscale")


def _to_uint8(pixels):
    return np.rint(np.asarray(pixels) * 255.0).astype(np.uint8)


def save_image(img, path, fmt=None):
    """Write an image as 8-bit PNG, PGM P5 (``"pgm"``) or PGM P2 (``"pgm-ascii"``).

    The format defaults from the suffix (``.png`` / ``.pgm``).  The write is
    atomic: a temporary sibling file is renamed over the target.
    """
    img = as_gray(img)
    path = Path(path)
    if fmt is None:
        fmt = {".png": "png", ".pgm": "pgm"}.get(path.suffix.lower())
        if fmt is None:
            raise ValidationError(f"cannot infer image format from {path.name!r}")
    q = _to_uint8(img.pixels)
    h, w = q.shape
    if fmt == "png":
        buf = io.BytesIO()
        Image.fromarray(q, mode="L").save(buf, format="PNG")
        payload = buf.getvalue()
    elif fmt == "pgm":
        payload = b"P5\n%d %d\n255\n" % (w, h) + q.tobytes()
    elif fmt == "pgm-ascii":
        rows = "\n".join(" ".join(str(v) for v in row) for row in q)
        payload = (f"P2\n{w} {h}\n255\n" + rows + "\n").encode("ascii")
    else:
        raise ValidationError(f"unsupported output format {fmt!r}")
    from .serialization import atomic_write_bytes

    atomic_write_bytes(path, payload)


# -- pixel operations ---------------------------------------------------------

def normalize(img):
    """Divide by the total mass so the pixels sum to one."""
    img = as_gray(img)
    total = float(img.pixels.sum())
    if total <= 0.0:
        raise EmptyObjectError()
    if isinstance(img, NormalizedImage):
        return NormalizedImage(img.pixels / total, total_mass=img.total_mass * total)
    return NormalizedImage(img.pixels / total, total_mass=total)


def binarize(img, threshold):
    """Pixels at or above ``threshold`` become 1, the rest 0."""
    img = as_gray(img)
    threshold = check_fraction(threshold, "threshold")
    return GrayImage((img.pixels >= threshold).astype(np.float64))


def add_impulse_noise(img, density, seed):
    """Salt-and-pepper noise.

    Each pixel site is corrupted independently with probability ``density``;
    a corrupted site becomes 0 or 1 with equal probability.  The result is
    a pure function of ``(img, density, seed)``.
    """
    img = as_gray(img)
    density = check_fraction(density, "density")
    rng = np.random.default_rng(seed)
    hit = rng.random(img.shape) < density
    salt = rng.random(img.shape) < 0.5
    out = img.pixels.copy()
    out[hit] = salt[hit].astype(np.float64)
    return GrayImage(out)


def rotate_pi_about_centroid(img, centroid):
    """Point-reflect the image through ``centroid`` (centered coordinates).

    Output pixel ``p`` takes the input value at ``2 * centroid - p`` using
    nearest-neighbour sampling (``floor(v + 0.5)``, which keeps the map an
    involution even for half-integer targets).  Samples outside the input
    are zero.
    """
    img = as_gray(img)
    h, w = img.shape
    xc, yc = centroid
    col_c = xc + (w - 1) / 2.0
    row_c = yc + (h - 1) / 2.0
    if not (-0.5 <= col_c <= w - 0.5 and -0.5 <= row_c <= h - 0.5):
        raise ValidationError(f"centroid {centroid} lies outside the image")
    cols = np.floor(2.0 * col_c - np.arange(w) + 0.5).astype(np.int64)
    rows = np.floor(2.0 * row_c - np.arange(h) + 0.5).astype(np.int64)
    col_ok = (cols >= 0) & (cols < w)
    row_ok = (rows >= 0) & (rows < h)
    out = np.zeros((h, w))
    out[np.ix_(row_ok, col_ok)] = img.pixels[np.ix_(rows[row_ok], cols[col_ok])]
    return GrayImage(out)


def em_measure(f, f_rotated, t):
    """Area of ``|f - f_rotated|`` over the area of ``f``.

    Returns ``(E_m, E_m < t)``.  Both inputs must be exactly binary.
    """
    f = as_gray(f).pixels
    fr = as_gray(f_rotated).pixels
    if f.shape != fr.shape:
        raise ValidationError(f"dimension mismatch: {f.shape} vs {fr.shape}")
    check_binary(f, "f")
    check_binary(fr, "f_rotated")
    area = float(f.sum())
    if area == 0.0:
        raise EmptyObjectError()
    em = float(np.abs(f - fr).sum()) / area
    return em, bool(em < t)
