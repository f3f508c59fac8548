"""Quantum time evolution by spectral summation and the derived observables.

States are complex vectors of length ``N`` (site basis).  Batches of states at
several times are 2-D arrays with one row per time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .lattice import corner_neighbor, corner_site

NORM_TOL = 1e-9
# overlaps below this fraction of the largest one are dropped from the spectral sum
OVERLAP_CUTOFF = 1e-15
# upper bound on N * (times per chunk) for the dense update
CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class SingleSite:
    site: int


@dataclass(frozen=True)
class Superposition:
    """``(|a> + sign |b>) / sqrt(2)``."""

    a: int
    b: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")
        if self.a == self.b:
            raise DomainError("superposition sites coincide")


@dataclass(frozen=True)
class ObservableSeries:
    """An observable sampled on a time grid.

    ``std`` is set for ensemble averages; ``r_ref`` is the reference point of
    distance-type observables.
    """

    times: np.ndarray
    values: np.ndarray
    tag: str
    r_ref: tuple | None = None
    std: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise DomainError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("times must be strictly increasing")


def log_time_grid(start, stop, points=400):
    if not 0 < start < stop:
        raise DomainError(f"invalid time range ({start}, {stop})")
    return np.logspace(np.log10(start), np.log10(stop), int(points))


def prepare(spec, lattice):
    """Initial state for a :class:`SingleSite` or :class:`Superposition` spec."""
    n = lattice.n_sites
    psi = np.zeros(n, dtype=complex)
    if isinstance(spec, SingleSite):
        _check_site(spec.site, n)
        psi[spec.site] = 1.0
    elif isinstance(spec, Superposition):
        _check_site(spec.a, n)
        _check_site(spec.b, n)
        psi[spec.a] = 1.0 / np.sqrt(2.0)
        psi[spec.b] = spec.sign / np.sqrt(2.0)
    else:
        raise DomainError(f"unknown initial state {spec!r}")
    return psi


def corner_superposition(lattice, sign, corner="lower-left"):
    return Superposition(corner_site(lattice, corner), corner_neighbor(lattice, corner), sign)


def reference_point(spec, lattice):
    """Initial site for single-site states, centre of mass for superpositions."""
    if isinstance(spec, SingleSite):
        return tuple(lattice.coords[spec.site])
    return tuple(0.5 * (lattice.coords[spec.a] + lattice.coords[spec.b]))


def _check_site(site, n):
    if not 0 <= site < n:
        raise DomainError(f"site {site} outside [0, {n})")


def _chunks(n_sites, n_times):
    step = max(1, CHUNK_ELEMENTS // max(n_sites, 1))
    for start in range(0, n_times, step):
        yield slice(start, min(start + step, n_times))


def _evolve_chunks(decomp, psi0, times):
    """Yield ``(slice, states)`` with states of shape ``(len(slice), N)``."""
    v = decomp.eigenvectors
    psi0 = np.asarray(psi0)
    if psi0.shape != (decomp.dim,):
        raise DomainError(f"state of shape {psi0.shape} does not match dimension {decomp.dim}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    c = v.T @ psi0
    mag = np.abs(c)
    keep = mag > OVERLAP_CUTOFF * mag.max() if mag.max() > 0 else mag > 0
    vk, wk = v[:, keep], decomp.eigenvalues[keep]
    cr, ci = c.real[keep], c.imag[keep]
    for sl in _chunks(decomp.dim, len(times)):
        phase = np.outer(times[sl], wk)
        cos, sin = np.cos(phase), np.sin(phase)
        # c * exp(-i w t) split into real GEMMs
        re = (cos * cr + sin * ci) @ vk.T
        im = (cos * ci - sin * cr) @ vk.T
        yield sl, re + 1j * im


def evolve(decomp, psi0, times):
    """States ``sum_a <a|psi0> exp(-i w_a t) |a>`` at each time; shape ``(T, N)``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty((len(times), decomp.dim), dtype=complex)
    for sl, states in _evolve_chunks(decomp, psi0, times):
        out[sl] = states
    return out


def evolve_probabilities(decomp, psi0, times):
    """``|<j|psi(t)>|**2`` for every time, without storing amplitudes."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty((len(times), decomp.dim))
    for sl, states in _evolve_chunks(decomp, psi0, times):
        out[sl] = states.real**2 + states.imag**2
    return out


def site_probabilities(state):
    state = np.asarray(state)
    return state.real**2 + state.imag**2


def squared_distances(lattice, r_ref):
    return np.sum((lattice.coords - np.asarray(r_ref, dtype=float)) ** 2, axis=1)


def msd(state, lattice, r_ref):
    """Mean square distance from ``r_ref``; ``state`` may be one state or a batch."""
    return site_probabilities(state) @ squared_distances(lattice, r_ref)


def region_weight(state, region):
    """Total probability on the sites in ``region``."""
    idx = np.fromiter(sorted(region), dtype=np.int64, count=len(region))
    p = site_probabilities(state)
    return p[..., idx].sum(axis=-1)


def energy(state, op):
    """``<psi|H|psi>`` for one state or a batch."""
    h = op.to_sparse()
    state = np.atleast_2d(state)
    e = np.einsum("tj,tj->t", state.conj(), (h @ state.T).T).real
    return e if len(e) > 1 else e[0]


def msd_series(lattice, decomp, spec, times):
    r_ref = reference_point(spec, lattice)
    probs = evolve_probabilities(decomp, prepare(spec, lattice), times)
    return ObservableSeries(np.asarray(times, dtype=float), probs @ squared_distances(lattice, r_ref),
                            "msd", r_ref)


def return_probability_series(lattice, decomp, site, times):
    probs = evolve_probabilities(decomp, prepare(SingleSite(site), lattice), times)
    return ObservableSeries(np.asarray(times, dtype=float), probs[:, site], "return_probability",
                            tuple(lattice.coords[site]))


def region_weight_series(lattice, decomp, spec, regions, times):
    """One series per entry of ``regions`` (a mapping label -> site set)."""
    probs = evolve_probabilities(decomp, prepare(spec, lattice), times)
    times = np.asarray(times, dtype=float)
    out = {}
    for label, sites in regions.items():
        idx = np.fromiter(sorted(sites), dtype=np.int64, count=len(sites))
        out[label] = ObservableSeries(times, probs[:, idx].sum(axis=1), "region_weight",
                                      reference_point(spec, lattice), metadata={"region": label})
    return out
