"""Random-bar dataset, rotation-oracle ground truth and precision reporting."""

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .imagecore import as_gray, em_measure, load_image, rotate_pi_about_centroid, save_image
from .moments import compute_moments
from .serialization import atomic_write_text
from .shapes import rectangle
from .symmetry import SymmetryParams, check_central_symmetry
from .validation import ValidationError

logger = logging.getLogger(__name__)

__all__ = [
    "GenConfig",
    "Label",
    "EvalReport",
    "generate_bars",
    "load_manifest",
    "load_dataset",
    "render_bars",
    "ground_truth_label",
    "label_ground_truth",
    "evaluate",
    "thread_limit",
]


@dataclass(frozen=True)
class GenConfig:
    """Random-bar generator settings.

    Bar centers are drawn uniformly from the half-pixel lattice inside the
    frame, orientations uniformly from [0, pi), widths uniformly from
    ``width_range`` and lengths uniformly from ``length_range``, which
    defaults to [size/4, 3 size/4].
    """

    count: int = 500
    size: int = 64
    bar_count_range: tuple = (1, 3)
    width_range: tuple = (1.0, 8.0)
    seed: int = 0
    output_dir: str = "bars"
    noise_density: float = 0.0
    length_range: tuple = None

    def __post_init__(self):
        if self.length_range is None:
            object.__setattr__(self, "length_range", (self.size / 4.0, 3.0 * self.size / 4.0))
        lo, hi = self.length_range
        if not 0 < lo <= hi:
            raise ValidationError(f"length_range must satisfy 0 < min <= max, got {self.length_range}")
        if self.count < 1:
            raise ValidationError("count must be >= 1")
        if self.size < 32:
            raise ValidationError("size must be >= 32")
        lo, hi = self.bar_count_range
        if not 1 <= lo <= hi:
            raise ValidationError(f"bar_count_range must satisfy 1 <= min <= max, got {self.bar_count_range}")
        lo, hi = self.width_range
        if not 0 < lo <= hi:
            raise ValidationError(f"width_range must satisfy 0 < min <= max, got {self.width_range}")
        if not 0.0 <= self.noise_density <= 1.0:
            raise ValidationError("noise_density must lie in [0, 1]")

    def to_dict(self):
        d = asdict(self)
        d["bar_count_range"] = list(self.bar_count_range)
        d["width_range"] = list(self.width_range)
        d["length_range"] = list(self.length_range)
        return d


@dataclass(frozen=True)
class Label:
    em: float
    symmetric: bool


@dataclass
class EvalReport:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    skipped: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)
    params_used: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self):
        if self.tp + self.fp == 0:
            return None
        return self.tp / (self.tp + self.fp)

    def summary_line(self):
        p = "null" if self.precision is None else f"{self.precision:.4f}"
        return f"precision={p} tp={self.tp} fp={self.fp} tn={self.tn} fn={self.fn}"

    def to_dict(self):
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "precision": self.precision,
            "total": self.total,
            "skipped": list(self.skipped),
            "disagreements": list(self.disagreements),
            "params_used": dict(self.params_used),
        }


def thread_limit():
    """Worker cap from ``SSRTKIT_THREADS`` (default: one worker)."""
    raw = os.environ.get("SSRTKIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"SSRTKIT_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


# -- generation ----------------------------------------------------------------

def _draw_bars(cfg, index):
    rng = np.random.default_rng([cfg.seed, index])
    n = int(rng.integers(cfg.bar_count_range[0], cfg.bar_count_range[1] + 1))
    half = (cfg.size - 1) / 2.0
    lattice = np.arange(-half, half + 0.25, 0.5)
    lo_l, hi_l = cfg.length_range
    bars = []
    for _ in range(n):
        bars.append({
            "center": [float(rng.choice(lattice)), float(rng.choice(lattice))],
            "angle": float(rng.uniform(0.0, math.pi)),
            "length": float(rng.uniform(lo_l, hi_l)),
            "width": float(rng.uniform(*cfg.width_range)),
        })
    return bars


def render_bars(size, bars):
    img = np.zeros((size, size))
    for b in bars:
        img = np.maximum(img, rectangle((size, size), b["length"], b["width"], b["angle"],
                                        tuple(b["center"])))
    return img


def generate_bars(cfg):
    """Write ``cfg.count`` bar images plus ``manifest.jsonl`` to ``cfg.output_dir``.

    Each image depends only on ``(seed, index)``.  Draws that rasterize to an
    empty frame are redrawn from the next substream so every image is
    nonempty.  Returns the manifest records.
    """
    from .imagecore import add_impulse_noise

    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    # the manifest sits in output_dir, so the path itself is not recorded
    generator = {k: v for k, v in cfg.to_dict().items() if k != "output_dir"}
    records = []
    for i in range(cfg.count):
        attempt = 0
        while True:
            bars = _draw_bars(cfg, i + attempt * cfg.count)
            img = render_bars(cfg.size, bars)
            if img.any():
                break
            attempt += 1
        if cfg.noise_density > 0:
            img = add_impulse_noise(img, cfg.noise_density, [cfg.seed, i, 1]).pixels
        name = f"bars_{i:05d}.png"
        save_image(img, out / name)
        records.append({
            "id": f"bars_{i:05d}",
            "path": name,
            "n_bars": len(bars),
            "params": {"bars": bars, "generator": generator},
        })
    write_manifest(out / "manifest.jsonl", records)
    return records


def write_manifest(path, records):
    lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    atomic_write_text(path, lines)


def load_manifest(path):
    """Read a JSON-lines manifest; image paths resolve against its folder."""
    path = Path(path)
    records = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records, path.parent


def load_dataset(manifest_path):
    records, root = load_manifest(manifest_path)
    ids = [r["id"] for r in records]
    images = [load_image(root / r["path"]).pixels for r in records]
    return ids, images, records


# -- ground truth and evaluation ---------------------------------------------

def ground_truth_label(img, t=0.1):
    img = as_gray(img)
    if not img.pixels.any():
        return None
    m = compute_moments(img)
    rotated = rotate_pi_about_centroid(img, m.centroid)
    em, sym = em_measure(img, rotated, t)
    return Label(em, sym)


def label_ground_truth(images, t=0.1, ids=None):
    """Rotation-oracle labels: ``E_m < t`` after a half-turn about the centroid.

    Empty images yield ``None`` and a logged warning.
    """
    labels = []
    for k, img in enumerate(images):
        lab = ground_truth_label(img, t)
        if lab is None:
            logger.warning("skipping empty image %s", ids[k] if ids else k)
        labels.append(lab)
    return labels


def _classify_one(args):
    img, params, kwargs = args
    try:
        rep = check_central_symmetry(img, params, short_circuit=False, **kwargs)
    except (ValueError, ArithmeticError) as exc:  # recorded, not fatal
        return None, None, f"{type(exc).__name__}: {exc}"
    return rep.sym, rep.d_values, None


def evaluate(images, labels, params=None, ids=None, t=None, workers=None, **kwargs):
    """Classify every image and tally it against the oracle labels.

    The method's verdict is the predicted class; positive means centrally
    symmetric.  All three D values are computed for every image so that
    disagreements can be inspected.  Images whose label is ``None`` are
    skipped.  A per-image failure counts as a negative prediction and is
    listed as a disagreement with its error note.
    """
    params = params or SymmetryParams()
    if len(images) != len(labels):
        raise ValidationError("images and labels differ in length")
    ids = list(ids) if ids is not None else [str(k) for k in range(len(images))]
    work = [(k, images[k]) for k in range(len(images)) if labels[k] is not None]
    report = EvalReport(params_used={**params.to_dict(), "t": t, **kwargs})
    report.skipped = [ids[k] for k in range(len(images)) if labels[k] is None]

    jobs = [(as_gray(img).pixels, params, kwargs) for _, img in work]
    workers = workers or thread_limit()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_classify_one, jobs, chunksize=8))
    else:
        results = [_classify_one(j) for j in jobs]

    for (k, _), (pred, d_values, error) in zip(work, results):
        truth = labels[k].symmetric
        pred = bool(pred)
        if pred and truth:
            report.tp += 1
        elif pred:
            report.fp += 1
        elif truth:
            report.fn += 1
        else:
            report.tn += 1
        if pred != truth or error:
            entry = {"id": ids[k], "truth": truth, "predicted": pred,
                     "em": labels[k].em, "d_values": d_values}
            if error:
                entry["error"] = error
            report.disagreements.append(entry)
    return report
