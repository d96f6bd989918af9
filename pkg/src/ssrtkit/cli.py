"""Command-line entry point: ``ssrtkit <subcommand> [flags]``.

Exit status is 0 on success, 2 when a flag or the input violates a
precondition (the message names the flag) and 1 on any other failure.
The ``symmetry`` verdict is reported in the JSON ``sym`` field, never
through the exit status.
"""

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from . import __version__
from .dataset import GenConfig, evaluate, generate_bars, label_ground_truth, load_dataset
from .imagecore import binarize, load_image
from .inertia import axis_from_maximum, compare_axes, moments_axis, select_sigma, ssrt_argmax
from .moments import compute_moments, orientation_phi
from .serialization import (
    atomic_write_bytes,
    atomic_write_text,
    dumps_json,
    projections_csv,
    sinogram_to_bytes,
    sinogram_to_csv,
    write_json,
)
from .symmetry import NOISY_SIGMA_SYM, SHIFT_MODES, SymmetryParams, check_central_symmetry
from .transforms import DEFAULT_RHO_STEP, DEFAULT_THETA_STEP, SinogramGrid, radon, ssrt
from .validation import ValidationError

logger = logging.getLogger("ssrtkit")

NOISE_DENSITY = 0.1


class FlagError(Exception):
    """A validation failure attributed to one command-line flag."""

    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


# -- argument types -------------------------------------------------------------

def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return v


def _theta_step(text):
    v = _positive_float(text)
    n = 180.0 / v
    if abs(n - round(n)) > 1e-9:
        raise argparse.ArgumentTypeError(f"must divide 180, got {text!r}")
    return v


def _fraction(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text!r}")
    return v


def _percent(text):
    v = _positive_float(text)
    if v > 100:
        raise argparse.ArgumentTypeError(f"must lie in (0, 100], got {text!r}")
    return v


def _finite_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return v


def _count(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text!r}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text!r}")
    return v


# -- parser ---------------------------------------------------------------------

def _add_grid(p):
    p.add_argument("--theta-step-deg", type=_theta_step, default=math.degrees(DEFAULT_THETA_STEP),
                   help="angular sampling in degrees; must divide 180 (default: 1)")
    p.add_argument("--rho-step", type=_positive_float, default=DEFAULT_RHO_STEP,
                   help="offset sampling in pixels (default: 1)")


def _add_input(p):
    p.add_argument("--input", required=True, help="PNG or PGM image")


def _add_symmetry(p):
    p.add_argument("--epsilon", type=_positive_float, default=0.03,
                   help="largest accepted D value (default: 0.03)")
    p.add_argument("--delta-theta-deg", type=_finite_float, default=5.0,
                   help="offset of the first projection from the axis (default: 5)")
    p.add_argument("--sigma-sym", type=_positive_float, default=None,
                   help="projection smoothing scale (default: 1, or 10 with --noisy)")
    p.add_argument("--m-percent", type=_percent, default=10.0,
                   help="share of largest differences averaged into D (default: 10)")
    p.add_argument("--noisy", action="store_true",
                   help=f"settings for impulse-noise input (sigma-sym {NOISY_SIGMA_SYM:g})")
    p.add_argument("--exact-angles", action="store_true",
                   help="evaluate projections at exact angles instead of grid columns")
    p.add_argument("--shift-mode", choices=SHIFT_MODES, default="exact",
                   help="how projections are recentred on the centroid (default: exact)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ssrtkit",
        description="Scale Space Radon Transform: sinograms, inertia axes, central symmetry.",
    )
    parser.add_argument(
        "--version", action="version",
        version=(f"ssrtkit {__version__} (theta_step_deg={math.degrees(DEFAULT_THETA_STEP):g}, "
                 f"rho_step={DEFAULT_RHO_STEP:g})"),
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more log output on stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    for name, text in (("radon", "Radon sinogram"), ("ssrt", "SSRT sinogram")):
        p = sub.add_parser(name, help=f"compute the {text} of an image")
        _add_input(p)
        _add_grid(p)
        if name == "ssrt":
            p.add_argument("--sigma", type=_positive_float, default=None,
                           help="scale in pixels (default: object diameter for binary "
                                "input, image diagonal otherwise)")
        p.add_argument("--csv", help="write the sinogram as CSV")
        p.add_argument("--bin", help="write the sinogram as a binary dump")
        p.add_argument("--json", help="write a summary JSON (default: stdout)")

    p = sub.add_parser("axis", help="principal inertia axis from the SSRT maximum")
    _add_input(p)
    _add_grid(p)
    p.add_argument("--sigma", type=_positive_float, default=None,
                   help="scale in pixels (default: object diameter / image diagonal)")
    p.add_argument("--json", help="write the report JSON (default: stdout)")
    p.add_argument("--overlay", help="write a PNG with both axes drawn on the image")
    p.add_argument("--overlay-scale", type=_count, default=4,
                   help="integer upscaling of the overlay (default: 4)")

    p = sub.add_parser("symmetry", help="central-symmetry check of a binary object")
    _add_input(p)
    _add_grid(p)
    _add_symmetry(p)
    p.add_argument("--threshold", type=_fraction, default=None,
                   help="binarize grayscale input at this level first")
    p.add_argument("--json", help="write the report JSON (default: stdout)")
    p.add_argument("--projections-csv", metavar="PREFIX",
                   help="write PREFIX_<k>.csv with rho, proj, reflected per projection")

    p = sub.add_parser("gen", help="generate a random-bar dataset")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--count", type=_count, default=500)
    p.add_argument("--size", type=_count, default=64)
    p.add_argument("--bars", type=_count, nargs=2, metavar=("MIN", "MAX"), default=[1, 3])
    p.add_argument("--width", type=_positive_float, nargs=2, metavar=("MIN", "MAX"),
                   default=[1.0, 8.0])
    p.add_argument("--length", type=_positive_float, nargs=2, metavar=("MIN", "MAX"),
                   default=None, help="bar length range (default: size/4 to 3*size/4)")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--noise-density", type=_fraction, default=None,
                   help="impulse-noise density (default: 0, or 0.1 with --noisy)")
    p.add_argument("--noisy", action="store_true", help=f"add impulse noise at {NOISE_DENSITY}")

    p = sub.add_parser("eval", help="classify a dataset and report precision")
    p.add_argument("--manifest", required=True, help="manifest.jsonl written by gen")
    p.add_argument("--t", type=_positive_float, default=0.1,
                   help="ground-truth threshold on E_m (default: 0.1)")
    _add_grid(p)
    _add_symmetry(p)
    p.add_argument("--report", help="write the full report JSON")
    return parser


# -- helpers ------------------------------------------------------------------------

def _load_input(path, threshold=None):
    try:
        img = load_image(path)
    except (OSError, ValueError) as exc:
        raise FlagError("--input", str(exc)) from exc
    if threshold is not None:
        img = binarize(img, threshold)
    return img


def _grid(args, shape, margin=0.0):
    return SinogramGrid.for_shape(shape, math.radians(args.theta_step_deg), args.rho_step,
                                  margin=margin)


def _auto_sigma(img):
    return select_sigma(img, "binary_object" if img.is_binary() else "grayscale")


def _emit_json(path, obj):
    if path:
        write_json(path, obj)
    else:
        sys.stdout.write(dumps_json(obj))


def _symmetry_params(args):
    sigma_sym = args.sigma_sym
    if sigma_sym is None:
        sigma_sym = NOISY_SIGMA_SYM if args.noisy else 1.0
    return SymmetryParams(epsilon=args.epsilon, delta_theta=math.radians(args.delta_theta_deg),
                          sigma_sym=sigma_sym, m_percent=args.m_percent)


def sinogram_summary(sino):
    v = sino.values
    i, j = np.unravel_index(int(np.argmax(v)), v.shape)
    return {
        "kind": sino.kind,
        "sigma": sino.sigma,
        "n_rho": sino.grid.n_rho,
        "n_theta": sino.grid.n_theta,
        "theta_step_deg": math.degrees(sino.grid.theta_step),
        "rho_step": sino.grid.rho_step,
        "rho_max": sino.grid.rho_max,
        "max_value": float(v[i, j]),
        "argmax_theta_deg": math.degrees(float(sino.grid.theta_values[j])),
        "argmax_rho": float(sino.grid.rho_values[i]),
    }


def _line_endpoints(theta, rho, shape, scale):
    """Endpoints of ``x cos(theta) + y sin(theta) = rho`` in overlay pixels."""
    h, w = shape
    px, py = rho * math.cos(theta), rho * math.sin(theta)
    dx, dy = -math.sin(theta), math.cos(theta)
    reach = math.hypot(w, h)
    pts = []
    for s in (-reach, reach):
        col = px + s * dx + (w - 1) / 2.0
        row = py + s * dy + (h - 1) / 2.0
        pts.append(((col + 0.5) * scale, (row + 0.5) * scale))
    return pts


def _dashed_line(draw, p0, p1, fill, width, dash):
    length = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
    n = max(1, int(length // dash))
    for k in range(0, n, 2):
        a, b = k / n, min(1.0, (k + 1) / n)
        draw.line([(p0[0] + a * (p1[0] - p0[0]), p0[1] + a * (p1[1] - p0[1])),
                   (p0[0] + b * (p1[0] - p0[0]), p0[1] + b * (p1[1] - p0[1]))],
                  fill=fill, width=width)


def render_overlay(img, ssrt_axis, moment_axis, scale=4):
    """RGB PNG bytes: the image, the SSRT axis in red, the moments axis
    dashed in green."""
    import io

    gray = np.rint(img.pixels * 255).astype(np.uint8)
    base = Image.fromarray(gray, mode="L").resize(
        (img.width * scale, img.height * scale), Image.NEAREST).convert("RGB")
    draw = ImageDraw.Draw(base)
    width = max(1, scale // 2)
    draw.line(_line_endpoints(ssrt_axis.theta_hat, ssrt_axis.rho_hat, img.shape, scale),
              fill=(255, 0, 0), width=width)
    if moment_axis is not None:
        p0, p1 = _line_endpoints(moment_axis.theta_hat, moment_axis.rho_hat, img.shape, scale)
        _dashed_line(draw, p0, p1, (0, 200, 0), width, dash=3 * scale)
    buf = io.BytesIO()
    base.save(buf, format="PNG")
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------

def cmd_transform(args):
    img = _load_input(args.input)
    grid = _grid(args, img.shape)
    try:
        if args.command == "radon":
            sino = radon(img, grid)
        else:
            sigma = args.sigma if args.sigma is not None else _auto_sigma(img)
            sino = ssrt(img, sigma, grid)
    except ValidationError as exc:
        raise FlagError("--input", str(exc)) from exc
    if args.csv:
        atomic_write_text(args.csv, sinogram_to_csv(sino))
    if args.bin:
        atomic_write_bytes(args.bin, sinogram_to_bytes(sino))
    _emit_json(args.json, sinogram_summary(sino))
    return 0


def axis_report(img, theta_step_deg=1.0, rho_step=1.0, sigma=None):
    """Axis JSON payload plus the two axis estimates (moments axis may be None)."""
    sigma = sigma if sigma is not None else _auto_sigma(img)
    grid = SinogramGrid.for_shape(img.shape, math.radians(theta_step_deg), rho_step)
    axis = axis_from_maximum(*ssrt_argmax(ssrt(img, sigma, grid)))
    m = compute_moments(img)
    orient = orientation_phi(m)
    ref = None if orient.is_isotropic else moments_axis(img)
    diff = None if ref is None else compare_axes(axis, ref, m.centroid)
    payload = {
        "theta_hat_deg": math.degrees(axis.theta_hat),
        "rho_hat": axis.rho_hat,
        "phi_star_deg": math.degrees(axis.phi_star),
        "xc": m.xc,
        "yc": m.yc,
        "angle_diff_deg": None if diff is None else math.degrees(diff.angle_diff),
        "centroid_distance_px": None if diff is None else diff.centroid_distance,
        "sigma": sigma,
        "moments": {**m.to_dict(), "phi_rad": orient.phi, "degenerate": orient.degenerate},
    }
    return payload, axis, ref


def cmd_axis(args):
    img = _load_input(args.input)
    try:
        payload, axis, ref = axis_report(img, args.theta_step_deg, args.rho_step, args.sigma)
    except ValidationError as exc:
        raise FlagError("--input", str(exc)) from exc
    if args.overlay:
        atomic_write_bytes(args.overlay, render_overlay(img, axis, ref, args.overlay_scale))
    _emit_json(args.json, payload)
    return 0


def cmd_symmetry(args):
    img = _load_input(args.input, args.threshold)
    if not img.is_binary():
        raise FlagError("--input", "image is not binary; pass --threshold to binarize it")
    params = _symmetry_params(args)
    try:
        report = check_central_symmetry(
            img, params, theta_step=math.radians(args.theta_step_deg), rho_step=args.rho_step,
            exact_angles=args.exact_angles, shift_mode=args.shift_mode,
        )
    except ValidationError as exc:
        raise FlagError("--input", str(exc)) from exc
    if args.projections_csv:
        for k, measure in enumerate(report.measures):
            atomic_write_text(f"{args.projections_csv}_{k}.csv", projections_csv(measure))
    _emit_json(args.json, report.to_dict())
    return 0


def cmd_gen(args):
    density = args.noise_density
    if density is None:
        density = NOISE_DENSITY if args.noisy else 0.0
    try:
        cfg = GenConfig(count=args.count, size=args.size, bar_count_range=tuple(args.bars),
                        width_range=tuple(args.width), seed=args.seed,
                        output_dir=args.output_dir, noise_density=density,
                        length_range=None if args.length is None else tuple(args.length))
    except ValidationError as exc:
        flag = {"count": "--count", "size": "--size", "bar_count_range": "--bars",
                "width_range": "--width", "length_range": "--length"}.get(str(exc).split()[0], "--noise-density")
        raise FlagError(flag, str(exc)) from exc
    records = generate_bars(cfg)
    print(f"wrote {len(records)} images to {Path(args.output_dir) / 'manifest.jsonl'}")
    return 0


def cmd_eval(args):
    params = _symmetry_params(args)
    try:
        ids, images, _ = load_dataset(args.manifest)
    except (OSError, ValueError, KeyError) as exc:
        raise FlagError("--manifest", str(exc)) from exc
    try:
        labels = label_ground_truth(images, args.t, ids)
    except ValidationError as exc:
        raise FlagError("--manifest", str(exc)) from exc
    report = evaluate(images, labels, params, ids=ids, t=args.t,
                      theta_step=math.radians(args.theta_step_deg), rho_step=args.rho_step,
                      exact_angles=args.exact_angles, shift_mode=args.shift_mode)
    if args.report:
        write_json(args.report, report.to_dict())
    print(report.summary_line())
    return 0


COMMANDS = {
    "radon": cmd_transform,
    "ssrt": cmd_transform,
    "axis": cmd_axis,
    "symmetry": cmd_symmetry,
    "gen": cmd_gen,
    "eval": cmd_eval,
}


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help/--version, 2 for bad flags
        return int(exc.code or 0)
    logging.basicConfig(level=max(logging.WARNING - 10 * args.verbose, logging.DEBUG),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except FlagError as exc:
        print(f"ssrtkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure: report, do not dump a traceback
        logger.debug("failure", exc_info=True)
        print(f"ssrtkit {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
