"""Per-block LASSO reconstruction of the coefficient tail by ADMM.

Each block solves::

    minimize  0.5 * ||Phi s - y||^2 + lam * ||s||_1

with the scaled-form ADMM splitting ``s = z``: an x-update through the
cached Cholesky factor of ``Phi^T Phi + rho I``, a soft-threshold z-update
at ``lam / rho`` and a running dual.  Iteration stops on the usual combined
absolute/relative primal and dual residual test, or at ``max_iters``.

Everything after ``q = Phi^T y`` lives in ``p2`` dimensions, so one
factorisation serves every block.  The loop runs in a compiled kernel when
``sparsteg._admm_kernel`` is importable and in vectorised NumPy otherwise;
set ``SPARSTEG_BACKEND=numpy`` to force the fallback.

After ADMM stops, an optional polish step takes the support and signs of
``z``, solves the LASSO stationarity equations on that support exactly and
keeps the result only if it passes the full KKT test (signs agree, every
off-support gradient entry within ``lam``).  When accepted, it is the exact
minimiser.  Blocks whose pattern fails the test resume ADMM from their
current iterate with tolerances tightened a hundredfold (at most
``REFINE_ROUNDS`` times, never past ``max_iters`` in total) and are polished
again; a block that still fails keeps its ADMM iterate.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import _admm_numpy

try:
    from . import _admm_kernel
except ImportError:  # pragma: no cover - depends on the build
    _admm_kernel = None

REFINE_ROUNDS = 3

AVAILABLE_BACKENDS = ("cython", "numpy") if _admm_kernel is not None else ("numpy",)
BACKEND = os.environ.get("SPARSTEG_BACKEND", AVAILABLE_BACKENDS[0])
if BACKEND not in AVAILABLE_BACKENDS:
    raise ImportError(f"SPARSTEG_BACKEND={BACKEND!r} is not available; have {AVAILABLE_BACKENDS}")


@dataclass(frozen=True)
class SolverConfig:
    """ADMM settings.

    ``lam=None`` selects the per-block weight ``lam_scale * ||Phi^T y||_inf``.
    ``warm_start`` is consumed by the pipeline, which then seeds ``z`` with the
    cover's own tail coefficients.
    """

    max_iters: int = 500
    abs_tol: float = 1e-4
    rel_tol: float = 1e-2
    rho: float = 1.0
    lam: float | None = None
    lam_scale: float = 1e-3
    polish: bool = True
    warm_start: bool = False

    def violations(self) -> list[str]:
        out = []
        if self.max_iters < 1:
            out.append(f"max_iters must be >= 1, got {self.max_iters}")
        for name in ("abs_tol", "rel_tol", "rho", "lam_scale"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be positive, got {getattr(self, name)}")
        if self.lam is not None and not self.lam > 0:
            out.append(f"lam must be positive, got {self.lam}")
        return out


@dataclass(frozen=True)
class FactorHandle:
    phi: np.ndarray
    gram: np.ndarray
    chol: np.ndarray  # lower factor of gram + rho I
    gram_factor: tuple
    rho: float


def prefactor(phi: np.ndarray, rho: float = 1.0) -> FactorHandle:
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    phi = np.asarray(phi, dtype=np.float64)
    gram = phi.T @ phi
    n = gram.shape[0]
    chol = np.linalg.cholesky(gram + rho * np.eye(n))
    for a in (gram, chol):
        a.setflags(write=False)
    return FactorHandle(
        phi=phi, gram=gram, chol=np.ascontiguousarray(chol),
        gram_factor=cho_factor(gram, lower=True), rho=float(rho),
    )


@dataclass
class SolveResult:
    solution: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    polished: bool = False


@dataclass
class BatchSolveResult:
    """Row ``i`` of every array belongs to block ``i``."""

    solution: np.ndarray
    iterations: np.ndarray
    primal_residual: np.ndarray
    dual_residual: np.ndarray
    converged: np.ndarray
    polished: np.ndarray
    lam: np.ndarray

    def __len__(self):
        return self.solution.shape[0]

    def __getitem__(self, i) -> SolveResult:
        return SolveResult(
            self.solution[i], int(self.iterations[i]), float(self.primal_residual[i]),
            float(self.dual_residual[i]), bool(self.converged[i]), bool(self.polished[i]),
        )


def block_lambdas(q: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    if cfg.lam is not None:
        return np.full(q.shape[0], float(cfg.lam))
    return cfg.lam_scale * np.abs(q).max(axis=1, initial=0.0)


def _polish(z, q, lam, handle):
    """Exact LASSO solutions from the support/sign pattern of ``z`` where verifiable."""
    gram = handle.gram
    sol = z.copy()
    ok = np.zeros(len(z), dtype=bool)
    sign = np.sign(z)
    full = np.all(sign != 0, axis=1)
    if full.any():
        cand = cho_solve(handle.gram_factor, (q[full] - lam[full, None] * sign[full]).T).T
        good = np.all(np.sign(cand) == sign[full], axis=1)
        idx = np.flatnonzero(full)[good]
        sol[idx] = cand[good]
        ok[idx] = True
    for b in np.flatnonzero(~full):
        on = sign[b] != 0
        cand = np.zeros_like(z[b])
        if on.any():
            try:
                cand[on] = np.linalg.solve(gram[np.ix_(on, on)], q[b, on] - lam[b] * sign[b, on])
            except np.linalg.LinAlgError:
                continue
            if np.any(np.sign(cand[on]) != sign[b, on]):
                continue
        grad = gram @ cand - q[b]
        if np.all(np.abs(grad[~on]) <= lam[b]):
            sol[b] = cand
            ok[b] = True
    return sol, ok


def solve_lasso_batch(
    y: np.ndarray,
    handle: FactorHandle,
    cfg: SolverConfig = SolverConfig(),
    z0: np.ndarray | None = None,
    backend: str | None = None,
) -> BatchSolveResult:
    """Solve one LASSO per row of ``y`` (shape ``(n_blocks, p3)``)."""
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if y.shape[1] != handle.phi.shape[0]:
        raise ValueError(f"measurement length {y.shape[1]} does not match matrix rows {handle.phi.shape[0]}")
    backend = backend or BACKEND
    if backend not in AVAILABLE_BACKENDS:
        raise ValueError(f"backend {backend!r} not available; have {AVAILABLE_BACKENDS}")
    q = np.ascontiguousarray(y @ handle.phi)
    lam = block_lambdas(q, cfg)
    nblk, n = q.shape
    z = np.zeros((nblk, n)) if z0 is None else np.array(z0, dtype=np.float64, order="C", copy=True)
    u = np.zeros((nblk, n))
    iters = np.zeros(nblk, dtype=np.intp)
    r_norm = np.zeros(nblk)
    s_norm = np.zeros(nblk)
    converged = np.zeros(nblk, dtype=np.uint8)
    impl = _admm_kernel if backend == "cython" else _admm_numpy
    impl.admm_lasso_batch(
        handle.chol, q, lam, handle.rho, cfg.abs_tol, cfg.rel_tol, cfg.max_iters,
        z, u, iters, r_norm, s_norm, converged,
    )
    polished = np.zeros(nblk, dtype=bool)
    if not cfg.polish:
        return BatchSolveResult(z, iters, r_norm, s_norm, converged.astype(bool), polished, lam)

    solution, polished = _polish(z, q, lam, handle)
    tol_scale = 1.0
    for _ in range(REFINE_ROUNDS):
        todo = np.flatnonzero(~polished & (iters < cfg.max_iters))
        if todo.size == 0:
            break
        tol_scale *= 1e-2
        zs, us = z[todo], u[todo]
        extra = np.zeros(todo.size, dtype=np.intp)
        rs, ss, cs = np.zeros(todo.size), np.zeros(todo.size), np.zeros(todo.size, dtype=np.uint8)
        budget = int(cfg.max_iters - iters[todo].max())
        impl.admm_lasso_batch(
            handle.chol, np.ascontiguousarray(q[todo]), np.ascontiguousarray(lam[todo]), handle.rho,
            cfg.abs_tol * tol_scale, cfg.rel_tol * tol_scale, max(budget, 1),
            zs, us, extra, rs, ss, cs,
        )
        z[todo], u[todo] = zs, us
        iters[todo] += extra
        r_norm[todo], s_norm[todo] = rs, ss
        sol_t, ok_t = _polish(zs, q[todo], lam[todo], handle)
        solution[todo] = sol_t
        polished[todo] = ok_t
    return BatchSolveResult(solution, iters, r_norm, s_norm, converged.astype(bool), polished, lam)


def solve_lasso(y, handle, cfg=SolverConfig(), z0=None, backend=None) -> SolveResult:
    z0 = None if z0 is None else np.asarray(z0)[None, :]
    return solve_lasso_batch(np.asarray(y)[None, :], handle, cfg, z0=z0, backend=backend)[0]


def lasso_objective(phi, y, s, lam) -> float:
    r = phi @ s - y
    return 0.5 * float(r @ r) + lam * float(np.abs(s).sum())


def kkt_violation_batch(phi, y, s, lam) -> np.ndarray:
    """:func:`kkt_violation` for every row of ``y`` and ``s``."""
    y = np.atleast_2d(y)
    s = np.atleast_2d(s)
    lam = np.broadcast_to(np.asarray(lam, dtype=np.float64), (s.shape[0],))
    q = y @ phi
    g = s @ (phi.T @ phi) - q
    scale = np.where(lam > 0, lam, np.maximum(1.0, np.abs(q).max(axis=1)))[:, None]
    on = s != 0
    off_part = np.where(on, -np.inf, np.abs(g) / scale - (lam > 0)[:, None])
    on_part = np.where(on, np.abs(g + lam[:, None] * np.sign(s)) / scale, -np.inf)
    return np.maximum(np.maximum(off_part.max(axis=1), on_part.max(axis=1)), 0.0)


def kkt_violation(phi, y, s, lam) -> float:
    """Largest KKT breach relative to ``lam``; a small value means near-optimal.

    Checks ``|g_i| <= lam`` everywhere and ``g_i = -lam * sign(s_i)`` on the
    support, where ``g = Phi^T (Phi s - y)``.  With ``lam == 0`` the breach is
    measured relative to ``max(1, ||Phi^T y||_inf)`` instead.
    """
    g = phi.T @ (phi @ s - y)
    scale = lam if lam > 0 else max(1.0, float(np.abs(phi.T @ y).max()))
    on = s != 0
    worst = 0.0
    if (~on).any():
        worst = max(worst, float(np.max(np.abs(g[~on]))) / scale - (1.0 if lam > 0 else 0.0))
    if on.any():
        worst = max(worst, float(np.max(np.abs(g[on] + lam * np.sign(s[on])))) / scale)
    return worst
