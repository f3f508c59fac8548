"""Classical continuous-time random walk: heat-kernel propagation under the
degree-diagonal generator, reusing its spectral decomposition."""

from __future__ import annotations

import numpy as np

from .dynamics import ObservableSeries, squared_distances
from .errors import DomainError, NumericalError

NEGATIVE_EIGENVALUE_TOL = 1e-8
CLIP_TOL = 1e-10


def ctrw_propagate(decomp, start, times):
    """``p_j(t) = <j| exp(-H t) |start>`` for every time; shape ``(T, N)``.

    Roundoff negatives down to ``-1e-10`` are clipped to zero, anything more
    negative raises :class:`NumericalError`.
    """
    w = decomp.eigenvalues
    if w.min() < -NEGATIVE_EIGENVALUE_TOL:
        raise DomainError(f"generator has negative eigenvalue {w.min():.3e}")
    if not 0 <= start < decomp.dim:
        raise DomainError(f"start site {start} outside [0, {decomp.dim})")
    v = decomp.eigenvectors
    times = np.atleast_1d(np.asarray(times, dtype=float))
    # clip roundoff-negative zero modes
    decay = np.exp(-np.outer(times, np.clip(w, 0.0, None)))
    p = (decay * v[start]) @ v.T
    if p.min() < -CLIP_TOL:
        raise NumericalError(f"negative probability {p.min():.3e}")
    np.clip(p, 0.0, None, out=p)
    return p


def classical_msd(dist, lattice, r_ref):
    """Mean square distance of one distribution or a batch."""
    return np.asarray(dist) @ squared_distances(lattice, r_ref)


def classical_msd_series(lattice, decomp, start, times):
    r_ref = tuple(lattice.coords[start])
    p = ctrw_propagate(decomp, start, times)
    return ObservableSeries(np.asarray(times, dtype=float), classical_msd(p, lattice, r_ref),
                            "classical_msd", r_ref)


def classical_return_series(lattice, decomp, start, times):
    p = ctrw_propagate(decomp, start, times)
    return ObservableSeries(np.asarray(times, dtype=float), p[:, start], "classical_return",
                            tuple(lattice.coords[start]))
