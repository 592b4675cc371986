# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-block ADMM loop for the LASSO.

Same contract as :func:`sparsteg._admm_numpy.admm_lasso_batch`.
"""
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free


cdef inline double _soft(double v, double kappa) nogil:
    if v > kappa:
        return v - kappa
    if v < -kappa:
        return v + kappa
    return 0.0


def admm_lasso_batch(const double[:, ::1] chol, const double[:, ::1] q, const double[::1] lam,
                     double rho, double abs_tol, double rel_tol, Py_ssize_t max_iters,
                     double[:, ::1] z, double[:, ::1] u,
                     Py_ssize_t[::1] iters, double[::1] r_norm, double[::1] s_norm,
                     unsigned char[::1] converged):
    cdef Py_ssize_t nblk = q.shape[0]
    cdef Py_ssize_t n = q.shape[1]
    cdef Py_ssize_t b, i, j, it
    cdef double acc, kappa, r2, s2, x2, z2, u2, d, znew, eps_pri, eps_dual
    cdef double sqrt_n = sqrt(<double>n)
    cdef double *x = <double *> malloc(2 * n * sizeof(double))
    cdef double *w = x + n
    if x == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(nblk):
                kappa = lam[b] / rho
                converged[b] = 0
                iters[b] = 0
                for it in range(1, max_iters + 1):
                    # x-update: (G + rho I) x = q + rho (z - u), with L L^T = G + rho I
                    for i in range(n):
                        acc = q[b, i] + rho * (z[b, i] - u[b, i])
                        for j in range(i):
                            acc -= chol[i, j] * w[j]
                        w[i] = acc / chol[i, i]
                    for i in range(n - 1, -1, -1):
                        acc = w[i]
                        for j in range(i + 1, n):
                            acc -= chol[j, i] * x[j]
                        x[i] = acc / chol[i, i]
                    r2 = 0.0
                    s2 = 0.0
                    x2 = 0.0
                    z2 = 0.0
                    u2 = 0.0
                    for i in range(n):
                        znew = _soft(x[i] + u[b, i], kappa)
                        d = znew - z[b, i]
                        s2 += d * d
                        z[b, i] = znew
                        u[b, i] = u[b, i] + (x[i] - znew)
                        d = x[i] - znew
                        r2 += d * d
                        x2 += x[i] * x[i]
                        z2 += znew * znew
                        u2 += u[b, i] * u[b, i]
                    iters[b] = it
                    r_norm[b] = sqrt(r2)
                    s_norm[b] = rho * sqrt(s2)
                    eps_pri = sqrt_n * abs_tol + rel_tol * (sqrt(x2) if x2 > z2 else sqrt(z2))
                    eps_dual = sqrt_n * abs_tol + rel_tol * rho * sqrt(u2)
                    if r_norm[b] < eps_pri and s_norm[b] < eps_dual:
                        converged[b] = 1
                        break
    finally:
        free(x)
