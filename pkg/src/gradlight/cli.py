"""Command-line front end.

    gradlight enhance IN -o OUT [options]
    gradlight verify IN OUT [--report R.jsonl | --beta ... ] [--luminance Y.npy]

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from .baseline import gain_map_enhance, histogram_equalize
from .color import YccImage, rgb_to_ycc, ycc_to_rgb
from .gradient import GAIN_MODES, EnhancementParams
from .image import ImageError, IntensityRange, load_image, save_image
from .integrator import SolverConfig, kkt_report
from .pipeline import enhance_gray, enhanced_field

log = logging.getLogger("gradlight")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3
METHODS = ("gradient", "histeq", "gainmap")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for I/O errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _range_arg(text):
    try:
        return IntensityRange.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_param_flags(p, defaults=True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--beta", type=float, default=d(15.0), help="gradient gain at intensity 0 (default 15)")
    p.add_argument("--tau", type=float, default=d(50.0), help="intensity where the gain reaches 1 (default 50)")
    p.add_argument("--mode", choices=GAIN_MODES, default=d("continuous"), help="gain formula variant")
    p.add_argument("--range", dest="range", type=_range_arg, default=d(IntensityRange()),
                   metavar="MIN:MAX", help="output intensity range (default 0:255)")


def _add_enhance_args(p):
    p.add_argument("input", help="input PNG/PPM/PGM image")
    p.add_argument("-o", "--output", required=True, help="output image path")
    _add_param_flags(p)
    p.add_argument("--method", choices=METHODS, default="gradient")
    p.add_argument("--tol", type=float, default=1e-3, help="max projected residual (default 1e-3)")
    p.add_argument("--max-sweeps", type=_positive_int, default=10000)
    p.add_argument("--omega", type=float, default=None, help="SOR factor in (0,2); default: optimal for image size")
    p.add_argument("--anchor-mean", type=float, default=None, help="target mean (default: input luminance mean)")
    p.add_argument("--report", help="append a JSON-lines record to this file")
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="N>1 uses the parallel red-black solver (results vary within tol)")
    p.add_argument("--save-luminance", metavar="PATH.npy",
                   help="also store the unquantized output luminance for exact verification")
    p.add_argument("-q", "--quiet", action="store_true", help="do not echo the report to stdout")


def _add_verify_args(p):
    p.add_argument("input", help="original input image")
    p.add_argument("output", help="enhanced image produced by 'enhance'")
    p.add_argument("--report", help="JSON-lines report to take beta/tau/mode/range from")
    _add_param_flags(p, defaults=False)
    p.add_argument("--luminance", metavar="PATH.npy", help="unquantized luminance saved by --save-luminance")
    p.add_argument("--tol", type=float, default=None,
                   help="violation tolerance (default: solver tol, plus 4 quantization steps for 8-bit outputs)")
    p.add_argument("--solver-tol", type=float, default=None, help="tol the output was solved with (default 1e-3)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gradlight", description="Gradient-domain low-light image enhancement")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_enhance_args(sub.add_parser("enhance", help="enhance an image"))
    _add_verify_args(sub.add_parser("verify", help="check optimality of an enhanced image"))
    return parser


def _luminance(img: np.ndarray) -> np.ndarray:
    return img if img.ndim == 2 else rgb_to_ycc(img).y


def _apply_to_luminance(img, fn):
    if img.ndim == 2:
        return fn(img)
    ycc = rgb_to_ycc(img)
    return ycc_to_rgb(YccImage(fn(ycc.y), ycc.cb, ycc.cr))


def run_enhance(args) -> int:
    try:
        params = EnhancementParams(args.beta, args.tau, args.mode)
        cfg = SolverConfig(
            tol=args.tol,
            max_sweeps=args.max_sweeps,
            omega=args.omega,
            anchor_mean=args.anchor_mean,
            ordering="red-black" if args.threads > 1 else "lexicographic",
            threads=args.threads,
        )
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    rng = args.range

    try:
        img = load_image(args.input)
    except ImageError as exc:
        log.error("%s", exc)
        return EXIT_IO

    t0 = time.perf_counter()
    report = None
    luminance = None
    if args.method == "gradient":
        if img.ndim == 2:
            out, report = enhance_gray(img, params, rng, cfg)
            luminance = out
        else:
            # same steps as enhance_color, keeping the solver's luminance bit-exact
            ycc = rgb_to_ycc(img)
            luminance, report = enhance_gray(ycc.y, params, rng, cfg)
            out = ycc_to_rgb(YccImage(luminance, ycc.cb, ycc.cr))
        if not report.converged:
            log.warning("solver did not converge in %d sweeps (residual %.3g); writing best iterate",
                        report.sweeps_used, report.final_residual)
    elif args.method == "histeq":
        log.info("histeq: textbook 256-bin CDF remap of the luminance")
        out = _apply_to_luminance(img, histogram_equalize)
    else:
        out = _apply_to_luminance(img, lambda y: gain_map_enhance(y, params, rng))
    wall_ms = (time.perf_counter() - t0) * 1000.0

    try:
        save_image(out, args.output, rng)
        if args.save_luminance:
            np.save(args.save_luminance, luminance if luminance is not None else _luminance(out))
    except (ImageError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_IO

    record = {
        "input": args.input,
        "output": args.output,
        "method": args.method,
        "beta": params.beta,
        "tau": params.tau,
        "mode": params.mode,
        "range": list(rng.as_tuple()),
        "sweeps_used": None,
        "final_residual": None,
        "objective": None,
        "converged": None,
        "wall_ms": round(wall_ms, 3),
    }
    if report is not None:
        record.update(report.as_dict())
        record["tol"] = cfg.tol
    if args.method == "histeq":
        record["note"] = "standard CDF-remap histogram equalization"
    line = json.dumps(record)
    if not args.quiet:
        print(line)
    if args.report:
        try:
            with open(args.report, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        except OSError as exc:
            log.error("cannot write report: %s", exc)
            return EXIT_IO
    return EXIT_OK


def _record_for(report_path: str, output: str) -> dict:
    with open(report_path, encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if not records:
        raise UsageError(f"{report_path} holds no records")
    target = os.path.abspath(output)
    for rec in reversed(records):
        if os.path.abspath(rec.get("output", "")) == target:
            return rec
    return records[-1]


def run_verify(args) -> int:
    rec = {}
    try:
        if args.report:
            rec = _record_for(args.report, args.output)
    except (OSError, ValueError) as exc:
        log.error("cannot read report: %s", exc)
        return EXIT_IO
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return rec.get(key, default) if rec.get(key) is not None else default

    try:
        params = EnhancementParams(pick(args.beta, "beta", 15.0), pick(args.tau, "tau", 50.0),
                                   pick(args.mode, "mode", "continuous"))
        rng = args.range or (IntensityRange(*rec["range"]) if "range" in rec else IntensityRange())
    except (ValueError, TypeError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    solver_tol = pick(args.solver_tol, "tol", 1e-3)

    try:
        f = _luminance(load_image(args.input))
        if args.luminance:
            u = np.load(args.luminance)
            slack = 0.0
        else:
            out = load_image(args.output)
            if out.ndim == 3:
                log.info("colour output: clamped out-of-gamut pixels can fail this check; "
                         "pass --luminance for an exact test")
            # bytes back to range units
            step = (rng.r_max - rng.r_min) / 255.0
            u = rng.r_min + _luminance(out) * step
            slack = 4.0 * step
    except (ImageError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    if u.shape != f.shape:
        log.error("dimension mismatch: input %s vs output %s", f.shape, u.shape)
        return EXIT_USAGE

    tol = args.tol if args.tol is not None else solver_tol + slack
    kkt = kkt_report(u, enhanced_field(f, params), rng, tol=tol)
    summary = kkt.summary()
    summary.update({"beta": params.beta, "tau": params.tau, "mode": params.mode, "range": list(rng.as_tuple())})
    print(json.dumps(summary))
    return EXIT_OK if kkt.n_violations == 0 else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    if args.command == "enhance":
        return run_enhance(args)
    return run_verify(args)


def enhance_main(argv=None) -> int:
    """Entry point for the stand-alone ``enhance`` command."""
    parser = _Parser(prog="enhance", description="Gradient-domain low-light image enhancement")
    parser.add_argument("-v", "--verbose", action="store_true")
    _add_enhance_args(parser)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    return run_enhance(args)


if __name__ == "__main__":
    sys.exit(main())
