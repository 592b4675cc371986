"""Vectorised NumPy ADMM for a stack of independent LASSO problems.

This is the fallback used when the compiled kernel is unavailable.  All
blocks iterate in lock-step; a block leaves the active set as soon as its
own stopping test passes, so per-block iteration counts match the compiled
loop.
"""
import numpy as np
from scipy.linalg import solve_triangular


def soft_threshold(v, kappa):
    return np.maximum(0.0, v - kappa) - np.maximum(0.0, -v - kappa)


def admm_lasso_batch(chol, q, lam, rho, abs_tol, rel_tol, max_iters,
                     z, u, iters, r_norm, s_norm, converged):
    """Run ADMM in place on ``z``/``u``; fill the per-block diagnostics.

    ``chol`` is the lower Cholesky factor of ``G + rho I`` and ``q`` holds
    one right-hand side ``Phi^T y`` per row.
    """
    n = q.shape[1]
    sqrt_n = np.sqrt(n)
    kappa = np.asarray(lam) / rho
    converged[:] = 0
    iters[:] = 0
    active = np.arange(q.shape[0])
    for it in range(1, max_iters + 1):
        if active.size == 0:
            break
        za, ua = z[active], u[active]
        rhs = (q[active] + rho * (za - ua)).T
        w = solve_triangular(chol, rhs, lower=True, check_finite=False)
        x = solve_triangular(chol, w, lower=True, trans="T", check_finite=False).T
        znew = soft_threshold(x + ua, kappa[active, None])
        unew = ua + (x - znew)
        r = np.sqrt(np.sum((x - znew) ** 2, axis=1))
        s = rho * np.sqrt(np.sum((znew - za) ** 2, axis=1))
        eps_pri = sqrt_n * abs_tol + rel_tol * np.maximum(
            np.sqrt(np.sum(x * x, axis=1)), np.sqrt(np.sum(znew * znew, axis=1))
        )
        eps_dual = sqrt_n * abs_tol + rel_tol * rho * np.sqrt(np.sum(unew * unew, axis=1))
        z[active] = znew
        u[active] = unew
        iters[active] = it
        r_norm[active] = r
        s_norm[active] = s
        done = (r < eps_pri) & (s < eps_dual)
        converged[active[done]] = 1
        active = active[~done]
