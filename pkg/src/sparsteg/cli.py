"""Command-line interface: ``sparsteg {embed,extract,metrics,experiment,keygen,suite}``.

Exit status is 0 on success, 1 on a validation or I/O failure (with a
diagnostic on stderr) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import config, experiment, metrics, pipeline, suite
from .image_io import ImageFormatError, load_image, quantize, resize_square, save_float_raster, save_image
from .lasso_admm import AVAILABLE_BACKENDS, SolverConfig


class UsageError(Exception):
    pass


def _gray8(path) -> np.ndarray:
    img = load_image(path)
    return img if img.dtype == np.uint8 else quantize(img)


def _ingest(path, side, what):
    img = _gray8(path)
    if img.shape != (side, side):
        print(f"note: resizing {what} {path} from {img.shape[1]}x{img.shape[0]} to {side}x{side}", file=sys.stderr)
        img = resize_square(img, side)
    return img


def parse_secret(spec: str) -> tuple[str, int | None]:
    """``PATH`` or ``PATH@SLOT``."""
    path, sep, slot = spec.rpartition("@")
    if sep and slot.isdigit():
        return path, int(slot)
    return spec, None


def assign_slots(specs: list[tuple[str, int | None]]) -> dict[int, str]:
    """Explicit slots first, then the lowest free slot for each unslotted secret."""
    if not 1 <= len(specs) <= pipeline.N_SLOTS:
        raise UsageError(f"need 1 to {pipeline.N_SLOTS} --secret options, got {len(specs)}")
    taken: dict[int, str] = {}
    for path, slot in specs:
        if slot is None:
            continue
        if not 1 <= slot <= pipeline.N_SLOTS:
            raise UsageError(f"slot {slot} for {path} is outside 1..{pipeline.N_SLOTS}")
        if slot in taken:
            raise UsageError(f"slot {slot} given twice")
        taken[slot] = path
    free = [s for s in range(1, pipeline.N_SLOTS + 1) if s not in taken]
    for path, slot in specs:
        if slot is None:
            taken[free.pop(0)] = path
    return dict(sorted(taken.items()))


def parse_slots(text: str) -> list[int]:
    try:
        slots = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--slots must be a comma-separated list of integers, got {text!r}") from None
    if not slots:
        raise UsageError("--slots is empty")
    if len(set(slots)) != len(slots) or any(not 1 <= s <= pipeline.N_SLOTS for s in slots):
        raise UsageError(f"--slots must be distinct values in 1..{pipeline.N_SLOTS}, got {text!r}")
    return slots


def _solver(args) -> SolverConfig:
    return SolverConfig(max_iters=args.max_iters, rho=args.rho, warm_start=args.warm_start)


def cmd_embed(args) -> int:
    slots = assign_slots([parse_secret(s) for s in args.secret])
    cfg = config.validate(config.load_key(args.key), _solver(args))
    cover = _ingest(args.cover, cfg.key.r, "cover")
    secrets = {slot: _ingest(path, cfg.key.m, "secret") for slot, path in slots.items()}
    stego_f, _ = pipeline.embed_real(cover, secrets, cfg, passthrough_empty=args.passthrough_empty, backend=args.backend)
    if args.float_stego:
        save_float_raster(stego_f, args.out)
        stego = stego_f
    else:
        stego = quantize(stego_f)
        save_image(stego, args.out)
    bpp = pipeline.capacity(cfg, len(secrets))
    psnr = metrics.psnr(cover, stego)
    print(f"bpp,{bpp:.3f},psnr,{psnr:.4f}")
    return 0


def cmd_extract(args) -> int:
    slots = parse_slots(args.slots)
    cfg = config.validate(config.load_key(args.key))
    stego = load_image(args.stego)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for slot, img in zip(slots, pipeline.extract(stego, slots, cfg)):
        path = out_dir / f"secret{slot}.{args.format}"
        save_image(img, path)
        print(path)
    return 0


METRIC_COLUMNS = ("psnr", "mssim", "ncc", "entropy_a", "entropy_b", "nae")


def cmd_metrics(args) -> int:
    a, b = _gray8(args.a), _gray8(args.b)
    if a.shape != b.shape:
        raise ValueError(f"image sizes differ: {a.shape[1]}x{a.shape[0]} vs {b.shape[1]}x{b.shape[0]}")
    q = metrics.quality_row(a, b)
    values = [q["psnr"], q["mssim"], q["ncc"], q["entropy_cover"], q["entropy_stego"], q["nae"]]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    w.writerow([experiment._fmt(v) for v in values])
    return 0


def cmd_experiment(args) -> int:
    key = config.load_key(args.key)
    _, rows = experiment.run_experiment(
        args.manifest, key, out_dir=args.out_dir, solver=_solver(args),
        jobs=args.jobs, emit_data=not args.no_data, backend=args.backend,
    )
    print(f"{len(rows)} runs written to {Path(args.out_dir) / 'results.csv'}")
    return 0


GEOMETRY = ("r", "b", "m", "l", "p1", "p2", "p3", "p4", "c")


def cmd_keygen(args) -> int:
    overrides = {name: getattr(args, name) for name in GEOMETRY + ("alpha", "beta", "gamma") if getattr(args, name) is not None}
    key = config.default_key(args.seed, **overrides)
    config.validate(key)
    config.save_key(key, args.out)
    return 0


def cmd_suite(args) -> int:
    manifest = suite.write_suite(args.out_dir, r=args.r, m=args.m, all_subsets=args.all_subsets)
    print(manifest)
    return 0


def _add_solver_args(p):
    p.add_argument("--max-iters", type=int, default=SolverConfig.max_iters)
    p.add_argument("--rho", type=float, default=SolverConfig.rho)
    p.add_argument("--warm-start", action="store_true", help="seed ADMM with the cover's tail coefficients")
    p.add_argument("--backend", choices=AVAILABLE_BACKENDS, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsteg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide 1-4 secret images in a cover")
    p.add_argument("--cover", required=True)
    p.add_argument("--secret", action="append", required=True, metavar="PATH[@SLOT]")
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--float-stego", action="store_true", help="write the unrounded stego image as a float raster")
    p.add_argument("--passthrough-empty", action="store_true", help="leave sub-images without a secret untouched")
    _add_solver_args(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover secrets from a stego image (no cover needed)")
    p.add_argument("--stego", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--slots", required=True, help="comma-separated, e.g. 1,3")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("metrics", help="compare two images")
    p.add_argument("--a", required=True, help="reference image")
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("experiment", help="run a manifest of embeddings and write a CSV report")
    p.add_argument("--manifest", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-data", action="store_true", help="skip histogram and edge-map files")
    _add_solver_args(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("keygen", help="write a key with default settings")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="default: fresh random 64-bit seed")
    for name in GEOMETRY:
        p.add_argument(f"--{name}", type=int, default=None)
    for name in ("alpha", "beta", "gamma"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("suite", help="write the bundled stand-in test images and a manifest")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--r", type=int, default=1024)
    p.add_argument("--m", type=int, default=512)
    p.add_argument("--all-subsets", action="store_true", help="one run per non-empty subset of the secrets")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except config.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, ImageFormatError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
