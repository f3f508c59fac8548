"""Independent reference computations used by the tests.

None of these go through ``numpy.linalg.eigh`` or the package's spectral
summation, so agreement is a genuine cross-check.
"""

import numpy as np
import scipy.linalg


def inertia_count(h, x):
    """Number of eigenvalues of symmetric ``h`` below ``x`` (Sylvester inertia of an LDL^T factor)."""
    _, d, _ = scipy.linalg.ldl(h - x * np.eye(len(h)), lower=True)
    count, k, n = 0, 0, len(d)
    while k < n:
        if k + 1 < n and d[k + 1, k] != 0.0:
            block = d[k:k + 2, k:k + 2]
            det, tr = np.linalg.det(block), np.trace(block)
            count += 1 if det < 0 else (2 if tr < 0 else 0)
            k += 2
        else:
            count += int(d[k, k] < 0)
            k += 1
    return count


def bisection_spectrum(h, tol=1e-11):
    """All eigenvalues of ``h`` by bisection on the inertia count."""
    n = len(h)
    bound = np.abs(h).sum(axis=1).max() + 1.0
    out = np.empty(n)
    for k in range(n):
        lo, hi = -bound, bound
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if inertia_count(h, mid) > k:
                hi = mid
            else:
                lo = mid
        out[k] = 0.5 * (lo + hi)
    return out


def rk4(rhs, y0, t_end, step):
    """Classical fourth-order Runge-Kutta with a fixed step (last step trimmed)."""
    y, t = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float), 0.0
    while t < t_end - 1e-15:
        h = min(step, t_end - t)
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def schrodinger_rk4(h, psi0, t_end, step=1e-3):
    return rk4(lambda y: -1j * (h @ y), np.asarray(psi0, dtype=complex), t_end, step)


def master_rk4(gen, p0, t_end, step=1e-3):
    return rk4(lambda y: -(gen @ y), np.asarray(p0, dtype=float), t_end, step)


def master_euler(gen, p0, t_end, step=1e-5):
    p = np.asarray(p0, dtype=float).copy()
    for _ in range(int(round(t_end / step))):
        p -= step * (gen @ p)
    return p


def brute_carpet_vertices(generation):
    """Grid vertices touching a retained unit cell, by explicit ternary digit test."""
    n = 3 ** (generation - 1)

    def kept(cx, cy):
        while cx or cy:
            if cx % 3 == 1 and cy % 3 == 1:
                return False
            cx, cy = cx // 3, cy // 3
        return True

    verts = set()
    for cx in range(n):
        for cy in range(n):
            if kept(cx, cy):
                verts.update({(cx, cy), (cx + 1, cy), (cx, cy + 1), (cx + 1, cy + 1)})
    return verts
