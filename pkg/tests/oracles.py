"""Slow, independent reference implementations used only by the tests."""
import numpy as np


def lasso_prox_grad(phi, y, lam, tol=1e-8, max_iters=200_000):
    """Accelerated proximal gradient (FISTA) with fixed step 1/L, run until
    successive iterates differ by less than ``tol`` in l-infinity."""
    step = 1.0 / np.linalg.norm(phi, 2) ** 2
    s = np.zeros(phi.shape[1])
    v = s.copy()
    theta = 1.0
    for _ in range(max_iters):
        g = v - step * (phi.T @ (phi @ v - y))
        s_new = np.sign(g) * np.maximum(np.abs(g) - step * lam, 0.0)
        theta_new = (1 + np.sqrt(1 + 4 * theta**2)) / 2
        v = s_new + (theta - 1) / theta_new * (s_new - s)
        done = np.max(np.abs(s_new - s)) < tol * 1e-2
        s, theta = s_new, theta_new
        if done:
            break
    return s


def lasso_coordinate_descent(phi, y, lam, sweeps=20_000, tol=1e-13):
    s = np.zeros(phi.shape[1])
    norms = (phi**2).sum(axis=0)
    r = y.copy()
    for _ in range(sweeps):
        biggest = 0.0
        for j in range(phi.shape[1]):
            old = s[j]
            rho = phi[:, j] @ r + norms[j] * old
            s[j] = np.sign(rho) * max(abs(rho) - lam, 0.0) / norms[j]
            if s[j] != old:
                r -= phi[:, j] * (s[j] - old)
                biggest = max(biggest, abs(s[j] - old))
        if biggest < tol:
            break
    return s


def mse_loops(a, b):
    total = 0.0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            d = float(a[i, j]) - float(b[i, j])
            total += d * d
    return total / (a.shape[0] * a.shape[1])
