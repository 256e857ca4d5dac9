"""Independent reference computations used to cross-check the library."""

from __future__ import annotations

import numpy as np


def sfrf_termwise(net, kin, x) -> np.ndarray:
    """f(x) summed reaction by reaction from the raw tuples."""
    x = [float(v) for v in x]
    f = [0.0] * net.m
    for q, (a, b) in enumerate(net.reactions):
        rate = kin.k[q]
        for s in range(net.m):
            rate *= x[s] ** float(kin.F[q][s])
        for s in range(net.m):
            f[s] += rate * float(net.complexes[b][s] - net.complexes[a][s])
    return np.array(f)


def birch_projected_gradient(p, x_star, V_basis: np.ndarray, iters: int = 20000, tol: float = 1e-13) -> np.ndarray:
    """Minimise sum x (log(x / x*) - 1) over p + V by projected gradient with Barzilai-Borwein steps.

    ``V_basis`` holds generators of V as rows. The iterate stays in p + V
    because every step is projected onto V.
    """
    p = np.asarray(p, float)
    lxs = np.log(np.asarray(x_star, float))
    Q, _ = np.linalg.qr(V_basis.T)
    P = Q @ Q.T

    def grad(x):
        return P @ (np.log(x) - lxs)

    x = p.copy()
    g = grad(x)
    step = 0.1 * float(np.min(x))
    for _ in range(iters):
        if np.linalg.norm(g) <= tol:
            break
        t = step
        # keep positivity
        while np.any(x - t * g <= 0):
            t *= 0.5
        x_new = x - t * g
        g_new = grad(x_new)
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 0 else step
        x, g = x_new, g_new
    return x


def horn_jackson_fA(a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """A-component of the mass-action rate for the four-reaction cycle, written out by hand."""
    return -2 * eps * a**3 - a * b**2 + 2 * eps * b**3 + a**2 * b


def grid_root_count(values: np.ndarray) -> int:
    """Roots of a sampled function: exact zeros plus strict sign changes between nonzero samples."""
    signs = np.sign(values)
    zeros = int(np.sum(signs == 0))
    nz = signs[signs != 0]
    return zeros + int(np.sum(nz[1:] != nz[:-1]))
