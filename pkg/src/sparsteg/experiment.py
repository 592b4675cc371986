"""Batch evaluation: stego quality, payload fidelity and wrong-key extraction.

A manifest is a JSON list of runs::

    [{"cover": "covers/boat.pgm", "secrets": ["s/a.pgm", "s/b.pgm"], "slots": [1, 2]}, ...]

Relative paths resolve against the manifest's directory.  Each run embeds
the secrets, measures the stego image against the cover, extracts with the
correct key and with two wrong keys (all gains and ``c`` guessed as 1; a
different seed), and records one CSV row.  Rows are written in manifest
order whatever the job count, and every number is a deterministic function
of the inputs and key, so identical runs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import metrics, pipeline
from .config import SecretKey, StegoConfig, validate
from .image_io import load_image, quantize, resize_square, save_pgm

CSV_VERSION = "sparsteg-experiment v1"
WRONG_SEED_XOR = 0x9E3779B97F4A7C15

COLUMNS = [
    "run", "cover", "secrets", "slots", "n_secrets", "bpp",
    "psnr", "mse", "mssim", "ncc", "entropy_cover", "entropy_stego", "nae",
    "admm_iters_median", "admm_iters_max", "admm_converged_frac",
    "coef_rel_err_median", "coef_rel_err_max",
    "secret_nae_correct", "secret_nae_wrong_constants", "secret_nae_wrong_seed",
    "secret_hist_dist",
]


class ManifestError(ValueError):
    pass


def wrong_constants_key(key: SecretKey) -> SecretKey:
    return replace(key, alpha=1.0, beta=1.0, gamma=1.0, c=1)


def wrong_seed_key(key: SecretKey) -> SecretKey:
    return replace(key, seed=key.seed ^ WRONG_SEED_XOR)


def load_manifest(path) -> list[dict]:
    path = Path(path)
    try:
        runs = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(runs, list):
        raise ManifestError(f"{path}: manifest must be a JSON list")
    base = path.parent
    out = []
    for i, run in enumerate(runs):
        if not isinstance(run, dict) or not {"cover", "secrets"} <= run.keys():
            raise ManifestError(f"{path}: run {i} needs 'cover' and 'secrets'")
        secrets = list(run["secrets"])
        slots = [int(s) for s in run.get("slots", range(1, len(secrets) + 1))]
        if len(slots) != len(secrets):
            raise ManifestError(f"{path}: run {i} has {len(secrets)} secrets but {len(slots)} slots")
        out.append({
            "cover": base / run["cover"],
            "secrets": [base / s for s in secrets],
            "slots": slots,
        })
    missing = sorted({str(p) for run in out for p in [run["cover"], *run["secrets"]] if not p.is_file()})
    if missing:
        raise FileNotFoundError("missing images:\n  " + "\n  ".join(missing))
    return out


def _ingest(path, side):
    img = load_image(path)
    if img.dtype != np.uint8:
        img = quantize(img)
    return resize_square(img, side)


def coefficient_errors(t_true: np.ndarray, t_got: np.ndarray) -> np.ndarray:
    """Relative l2 error per block, skipping blocks whose true payload is zero."""
    norm = np.linalg.norm(t_true, axis=1)
    keep = norm > 0
    return np.linalg.norm(t_got - t_true, axis=1)[keep] / norm[keep]


def evaluate_run(cover, secrets: dict[int, np.ndarray], cfg: StegoConfig, backend=None) -> tuple[dict, dict]:
    """Embed, measure and extract for one cover.

    Returns the numeric row and a dict of images/arrays for data export.
    """
    stego_f, report = pipeline.embed_real(cover, secrets, cfg, backend=backend)
    stego = quantize(stego_f)
    row = metrics.quality_row(cover, stego)
    iters = report.all_iterations()
    conv = np.concatenate([report.converged[s] for s in sorted(report.converged)])
    row.update(
        n_secrets=len(secrets),
        bpp=pipeline.capacity(cfg, len(secrets)),
        admm_iters_median=float(np.median(iters)),
        admm_iters_max=int(iters.max()),
        admm_converged_frac=float(conv.mean()),
    )

    slots = sorted(secrets)
    wrong_c = validate(wrong_constants_key(cfg.key), cfg.solver)
    wrong_s = validate(wrong_seed_key(cfg.key), cfg.solver)
    rel_errs, nae_ok, nae_wc, nae_ws, hist = [], [], [], [], []
    extracted = {}
    for slot in slots:
        t_true = pipeline.secret_coefficients(secrets[slot], cfg)
        rel_errs.append(coefficient_errors(t_true, pipeline.extract_coefficients(stego_f, slot, cfg)))
        (got,) = pipeline.extract(stego, [slot], cfg)
        (got_wc,) = pipeline.extract(stego, [slot], wrong_c)
        (got_ws,) = pipeline.extract(stego, [slot], wrong_s)
        extracted[slot] = got
        nae_ok.append(metrics.nae(secrets[slot], got))
        nae_wc.append(metrics.nae(secrets[slot], got_wc))
        nae_ws.append(metrics.nae(secrets[slot], got_ws))
        hist.append(metrics.histogram_distance(secrets[slot], got))
    rel = np.concatenate(rel_errs)
    row.update(
        coef_rel_err_median=float(np.median(rel)),
        coef_rel_err_max=float(rel.max()),
        secret_nae_correct=float(np.mean(nae_ok)),
        secret_nae_wrong_constants=float(np.mean(nae_wc)),
        secret_nae_wrong_seed=float(np.mean(nae_ws)),
        secret_hist_dist=float(np.mean(hist)),
    )
    pairs = [
        {"slot": slot, "nae_correct": a, "nae_wrong_constants": b, "nae_wrong_seed": c, "hist_dist": h, "coef_rel_err": e}
        for slot, a, b, c, h, e in zip(slots, nae_ok, nae_wc, nae_ws, hist, rel_errs)
    ]
    detail = {
        "stego": stego, "extracted": extracted,
        "nae_correct": nae_ok, "nae_wrong_constants": nae_wc, "nae_wrong_seed": nae_ws,
        "hist_dist": hist, "coef_rel_err": rel, "pairs": pairs,
    }
    return row, detail


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".6f")


def _write_data(data_dir: Path, run_id: str, cover, secrets, detail) -> None:
    data_dir.mkdir(parents=True, exist_ok=True)
    hists = {"cover": metrics.histogram(cover), "stego": metrics.histogram(detail["stego"])}
    for slot, secret in secrets.items():
        hists[f"secret{slot}"] = metrics.histogram(secret)
        hists[f"extracted{slot}"] = metrics.histogram(detail["extracted"][slot])
    with open(data_dir / f"{run_id}_hist.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        names = list(hists)
        w.writerow(["level", *names])
        for level in range(256):
            w.writerow([level, *(int(hists[n][level]) for n in names)])
    images = {"cover": cover, "stego": detail["stego"]}
    for slot, secret in secrets.items():
        images[f"secret{slot}"] = secret
        images[f"extracted{slot}"] = detail["extracted"][slot]
    for name, img in images.items():
        save_pgm(metrics.edge_map(img) * 255, data_dir / f"{run_id}_{name}_edges.pgm")


def run_experiment(
    manifest,
    key: SecretKey,
    out_dir=None,
    solver=None,
    jobs: int = 1,
    emit_data: bool = True,
    backend: str | None = None,
) -> tuple[str, list[dict]]:
    """Run every manifest entry; return the CSV text and the per-run rows.

    Each row also carries ``pairs``, the per-secret fidelity and wrong-key
    results behind the averaged CSV columns.  With ``out_dir`` set, ``results.csv`` is written there and, if
    ``emit_data``, per-run histograms and edge maps under ``data/``.
    """
    cfg = validate(key, solver)
    runs = load_manifest(manifest) if not isinstance(manifest, list) else manifest

    def one(item):
        i, run = item
        cover = _ingest(run["cover"], cfg.key.r)
        secrets = {slot: _ingest(p, cfg.key.m) for slot, p in zip(run["slots"], run["secrets"])}
        row, detail = evaluate_run(cover, secrets, cfg, backend=backend)
        run_id = f"run{i:03d}"
        row.update(
            run=run_id,
            cover=Path(run["cover"]).name,
            secrets=";".join(Path(p).name for p in run["secrets"]),
            slots=";".join(str(s) for s in run["slots"]),
            pairs=detail["pairs"],
        )
        if out_dir is not None and emit_data:
            _write_data(Path(out_dir) / "data", run_id, cover, secrets, detail)
        return row

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(one, enumerate(runs)))
    else:
        rows = [one(item) for item in enumerate(runs)]

    buf = io.StringIO(newline="")
    buf.write(f"# {CSV_VERSION}\r\n")
    writer = csv.writer(buf)
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in COLUMNS])
    text = buf.getvalue()
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "results.csv", "w", newline="") as fh:
            fh.write(text)
    return text, rows
