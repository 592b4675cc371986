"""Compare the compiled ADMM kernel with the NumPy fallback.

Solves the 4096 block problems of one 512x512 sub-image at the default
settings (1600x32 matrix) with each available backend and reports wall
time, iteration statistics and the largest disagreement between solutions.

    python3 benchmarks/bench_admm.py [--repeat 3] [--blocks 4096]
"""
import argparse
import time

import numpy as np

from sparsteg import pipeline, suite
from sparsteg.config import default_key, validate
from sparsteg.image_io import to_real
from sparsteg.lasso_admm import AVAILABLE_BACKENDS, SolverConfig, prefactor, solve_lasso_batch
from sparsteg.sampling import subsample


def measurements(n_blocks):
    cfg = validate(default_key(seed=1))
    cover = suite.cover_image("camera", cfg.key.r)
    secret = suite.secret_image("coffee", cfg.key.m)
    y, _ = pipeline.sub_image_measurements(subsample(to_real(cover))[0], secret, cfg)
    return cfg, y[:n_blocks, cfg.key.p1:]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--blocks", type=int, default=4096)
    args = parser.parse_args()

    cfg, y = measurements(args.blocks)
    handle = prefactor(pipeline.measurement_matrix(cfg), cfg.solver.rho)
    results = {}
    print(f"{y.shape[0]} blocks, p3={y.shape[1]}, p2={handle.phi.shape[1]}, best of {args.repeat}")
    print(f"{'backend':8} {'polish':6} {'seconds':>8} {'us/block':>9} {'median it':>9} {'max it':>6}")
    for polish in (False, True):
        solver = SolverConfig(polish=polish)
        for backend in AVAILABLE_BACKENDS:
            best = np.inf
            for _ in range(args.repeat):
                start = time.perf_counter()
                res = solve_lasso_batch(y, handle, solver, backend=backend)
                best = min(best, time.perf_counter() - start)
            results[backend, polish] = res
            print(f"{backend:8} {str(polish):6} {best:8.3f} {1e6 * best / len(res):9.1f} "
                  f"{np.median(res.iterations):9g} {res.iterations.max():6d}")
    if len(AVAILABLE_BACKENDS) == 2:
        for polish in (False, True):
            a, b = results["cython", polish].solution, results["numpy", polish].solution
            print(f"max |cython - numpy| (polish={polish}): {np.abs(a - b).max():.2e}")


if __name__ == "__main__":
    main()
