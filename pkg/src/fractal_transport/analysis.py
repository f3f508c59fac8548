"""Scaling-exponent fits of MSD(t) ~ t**alpha, regime windows, initial-site
ensembles, the coupling-ratio sweep and the alpha-beta relation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ObservableSeries, SingleSite, log_time_grid, msd_series
from .errors import DomainError
from .hamiltonian import CouplingConfig, assemble_quantum
from .lattice import LatticeKind, build_interpolating, corner_site
from .spectral import eigendecompose

MIN_FIT_POINTS = 10
SHORT_WINDOW = (0.1, 1.0)
LONG_WINDOW_END = 1e6


@dataclass(frozen=True)
class Dimensions:
    fractal: float
    spectral: float


# the carpet's spectral dimension has no closed form; 1.805 is a numerical estimate
REFERENCE_DIMENSIONS = {
    LatticeKind.GASKET: Dimensions(math.log(3) / math.log(2), 2 * math.log(3) / math.log(5)),
    LatticeKind.INTERPOLATING: Dimensions(math.log(3) / math.log(2), 2 * math.log(3) / math.log(5)),
    LatticeKind.CARPET: Dimensions(math.log(8) / math.log(3), 1.805),
    LatticeKind.TRIANGULAR: Dimensions(2.0, 2.0),
    LatticeKind.SQUARE: Dimensions(2.0, 2.0),
}


def reference_dimensions(kind):
    return REFERENCE_DIMENSIONS[LatticeKind(kind)]


@dataclass(frozen=True)
class ExponentFit:
    """Log-log least-squares slope of a series inside ``window``.

    ``residual`` is the RMS misfit of ``ln(value)``; ``stderr`` is the standard
    error of the slope.
    """

    alpha: float
    window: tuple
    residual: float
    n_points: int
    stderr: float
    prefactor: float


@dataclass(frozen=True)
class RegimeWindows:
    short: tuple
    intermediate: tuple
    long: tuple

    def __post_init__(self):
        ta, tb = self.short
        tb2, T = self.intermediate
        T2, tmax = self.long
        if not (ta < tb == tb2 < T == T2 < tmax):
            raise DomainError(f"inconsistent regime windows {self}")

    def as_dict(self):
        return {"short": self.short, "intermediate": self.intermediate, "long": self.long}


def fit_alpha(series, window):
    """Slope of ``ln MSD`` against ``ln t`` over the samples inside ``window``."""
    t = np.asarray(series.times, dtype=float)
    y = np.asarray(series.values, dtype=float)
    lo, hi = window
    mask = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    n = int(mask.sum())
    if n < MIN_FIT_POINTS:
        raise DomainError(f"only {n} samples inside window {window}, need {MIN_FIT_POINTS}")
    if np.any(y[mask] <= 0):
        raise DomainError("non-positive values inside the fit window")
    x, z = np.log(t[mask]), np.log(y[mask])
    (slope, icept), cov = np.polyfit(x, z, 1, cov="unscaled")
    r = z - (slope * x + icept)
    resid = float(np.sqrt(np.mean(r**2)))
    dof = max(n - 2, 1)
    stderr = float(np.sqrt(cov[0, 0] * np.sum(r**2) / dof))
    return ExponentFit(float(slope), (float(lo), float(hi)), resid, n, stderr, float(np.exp(icept)))


def crossover_time(lattice, J=1.0):
    """``T = (L/a)**d_f / (4 J)``, the end of the intermediate regime."""
    d_f = reference_dimensions(lattice.kind).fractal
    return lattice.side_length**d_f / (4.0 * J)


def default_windows(lattice, J=1.0, t_max=LONG_WINDOW_END):
    T = crossover_time(lattice, J)
    ta, tb = SHORT_WINDOW[0] / J, SHORT_WINDOW[1] / J
    if not tb < T < t_max:
        raise DomainError(f"crossover time {T:.3g} leaves no intermediate regime")
    return RegimeWindows((ta, tb), (tb, T), (T, t_max))


def spreading_window(series, fraction=0.5, t_start=1.0, late_decades=1.0):
    """``(t_start, t_sat)`` where ``t_sat`` is the first time the series reaches
    ``fraction`` of its mean over the last ``late_decades`` of the grid.

    Used for lattices whose spreading is cut off by the boundary rather than
    by the fractal crossover time.
    """
    t = np.asarray(series.times)
    y = np.asarray(series.values)
    late = y[t >= t[-1] / 10.0**late_decades].mean()
    after = (t > t_start) & (y >= fraction * late)
    if not after.any():
        raise DomainError("series never reaches the saturation level")
    return (float(t_start), float(t[np.argmax(after)]))


def thermal_msd(side_length):
    """Squared corner-to-centre distance ``L**2/3`` of a triangle."""
    return side_length**2 / 3.0


def ensemble_msd(lattice, decomp, initial_sites, times):
    """Mean and population standard deviation of MSD(t) over initial sites.

    Each member's MSD is measured from its own initial site.
    """
    sites = list(initial_sites)
    if not sites:
        raise DomainError("empty initial-site ensemble")
    times = np.asarray(times, dtype=float)
    curves = np.array([msd_series(lattice, decomp, SingleSite(s), times).values for s in sites])
    mean, std = curves.mean(axis=0), curves.std(axis=0)
    meta = {"initial_sites": [int(s) for s in sites]}
    return (
        ObservableSeries(times, mean, "ensemble_msd", None, std, meta),
        ObservableSeries(times, std, "ensemble_msd_std", None, None, meta),
    )


@dataclass(frozen=True)
class GammaPoint:
    gamma: float
    fit: ExponentFit
    series: ObservableSeries = field(repr=False)


@dataclass(frozen=True)
class GammaSweepResult:
    generation: int
    points: list

    @property
    def gammas(self):
        return [p.gamma for p in self.points]

    @property
    def alphas(self):
        return [p.fit.alpha for p in self.points]

    def __getitem__(self, gamma):
        for p in self.points:
            if p.gamma == gamma:
                return p
        raise KeyError(gamma)


def gamma_sweep(generation, gammas, window=None, times=None, J=1.0):
    """Corner-start MSD exponent on the interpolating lattice for each ``gamma``.

    ``window`` is a fixed ``(t_lo, t_hi)`` or a callable mapping the MSD
    series to one; by default each curve is fitted over its
    :func:`spreading_window`.
    """
    gammas = [float(g) for g in gammas]
    if any(not 0.0 <= g <= 1.0 for g in gammas):
        raise DomainError("gamma values must lie in [0, 1]")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise DomainError("gamma values must be strictly increasing")
    lattice = build_interpolating(generation)
    times = log_time_grid(1e-2, 1e4) if times is None else np.asarray(times, dtype=float)
    if window is None:
        window = spreading_window
    corner = corner_site(lattice)
    points = []
    for g in gammas:
        decomp = eigendecompose(assemble_quantum(lattice, CouplingConfig(J, g)))
        series = msd_series(lattice, decomp, SingleSite(corner), times)
        del decomp
        w = window(series) if callable(window) else window
        points.append(GammaPoint(g, fit_alpha(series, w), series))
    return GammaSweepResult(generation, points)


@dataclass(frozen=True)
class AlphaBetaReport:
    predicted: float
    predicted_err: float
    measured: float
    measured_err: float
    difference: float
    tolerance: float

    @property
    def consistent(self):
        return self.difference <= self.tolerance


def predicted_alpha(beta, d_f):
    return 2.0 * (beta - 1.0) / d_f


def alpha_beta_check(alpha_fit, beta, d_f, beta_err=0.05):
    """Compare a measured exponent with ``2 (beta - 1) / d_f``.

    The tolerance adds the propagated ``beta`` uncertainty and the slope's
    standard error in quadrature.
    """
    pred = predicted_alpha(beta, d_f)
    pred_err = 2.0 * beta_err / d_f
    meas = alpha_fit.alpha if isinstance(alpha_fit, ExponentFit) else float(alpha_fit)
    meas_err = alpha_fit.stderr if isinstance(alpha_fit, ExponentFit) else 0.0
    return AlphaBetaReport(pred, pred_err, meas, meas_err, abs(meas - pred),
                           math.hypot(pred_err, meas_err))
