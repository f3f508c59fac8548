"""Dense symmetric eigendecomposition and level-spacing statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError

RESIDUAL_TOL = 1e-8
SIGN_TOL = 1e-10
DEGENERACY_REL_TOL = 1e-12

# level-spacing window selection, all lengths in decades of s
STAIRCASE_POINTS_PER_DECADE = 20
SLOPE_HALF_WIDTH = 0.5
MAX_SLOPE_VARIATION = 0.15
MIN_WINDOW_DECADES = 2.0
MIN_DECAY_SLOPE = 0.2
MIN_WINDOW_STEPS = 10
POWER_LAW_MAX_RESIDUAL = 0.06


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def dim(self):
        return len(self.eigenvalues)

    def residuals(self, op):
        """``||H v_a - w_a v_a||_2`` for every eigenpair."""
        hv = op.to_sparse() @ self.eigenvectors
        return np.linalg.norm(hv - self.eigenvectors * self.eigenvalues, axis=0)

    def orthonormality_error(self):
        v = self.eigenvectors
        return float(np.max(np.abs(v.T @ v - np.eye(self.dim))))

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def _fix_signs(vectors):
    """Make the first component with magnitude above SIGN_TOL positive, per column."""
    lead = np.argmax(np.abs(vectors) > SIGN_TOL, axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors *= signs


def eigendecompose(op, check=True):
    """Full eigendecomposition of a :class:`SymmetricOperator`.

    Uses LAPACK's symmetric divide-and-conquer driver (Householder
    tridiagonalization).  With ``check`` the residual of every eigenpair is
    compared against ``1e-8 * ||H||`` and :class:`ConvergenceError` raised on
    failure.
    """
    if op.dim < 1:
        raise DomainError("operator has dimension 0")
    w, v = np.linalg.eigh(op.to_dense())
    _fix_signs(v)
    decomp = SpectralDecomposition(w, v)
    if check:
        norm = max(float(np.max(np.abs(w))), 1.0)
        res = decomp.residuals(op)
        worst = float(res.max())
        if not np.isfinite(worst) or worst > RESIDUAL_TOL * norm:
            raise ConvergenceError(f"eigen-residual {worst:.3e} exceeds {RESIDUAL_TOL * norm:.3e}",
                                   worst)
    return decomp


def eigenvalues(op):
    """Ascending eigenvalues only (cheaper than :func:`eigendecompose`)."""
    if op.dim < 1:
        raise DomainError("operator has dimension 0")
    return np.linalg.eigvalsh(op.to_dense())


# --------------------------------------------------------------------------
# level spacings


def default_degeneracy_tol(eigvals):
    width = float(np.max(eigvals) - np.min(eigvals))
    return DEGENERACY_REL_TOL * (width if width > 0 else 1.0)


def level_spacings(eigvals, degeneracy_tol=None):
    """Consecutive differences of an ascending spectrum.

    Differences below ``degeneracy_tol`` (default ``1e-12`` times the spectral
    width) are set to exactly zero.
    """
    eigvals = np.asarray(eigvals, dtype=float)
    if eigvals.ndim != 1 or len(eigvals) < 2:
        raise DomainError("need at least two eigenvalues")
    if np.any(np.diff(eigvals) < 0):
        raise DomainError("eigenvalues must be sorted ascending")
    if degeneracy_tol is None:
        degeneracy_tol = default_degeneracy_tol(eigvals)
    gaps = np.diff(eigvals)
    gaps[gaps < degeneracy_tol] = 0.0
    return gaps


@dataclass(frozen=True)
class Staircase:
    """Integrated level-spacing distribution sampled on a log grid.

    ``p[k]`` is the fraction of positive gaps strictly larger than ``s[k]``.
    ``gaps`` holds the sorted positive gaps when the staircase was built from a
    spectrum, so it can also be evaluated exactly between grid points.
    """

    s: np.ndarray
    p: np.ndarray
    gaps: np.ndarray | None = None
    n_zero: int = 0

    def __call__(self, s):
        if self.gaps is None:
            raise DomainError("staircase has no gap sample to evaluate")
        s = np.asarray(s, dtype=float)
        return (len(self.gaps) - np.searchsorted(self.gaps, s, side="right")) / len(self.gaps)

    @property
    def n_positive(self):
        return 0 if self.gaps is None else len(self.gaps)


def integrated_distribution(gaps, points_per_decade=STAIRCASE_POINTS_PER_DECADE):
    """``p_int(s)`` on a log grid spanning ``[min positive gap, max gap]``.

    Normalized by the number of positive gaps; zero (degenerate) gaps are only
    counted in ``n_zero``.
    """
    gaps = np.asarray(gaps, dtype=float)
    pos = np.sort(gaps[gaps > 0])
    if len(pos) == 0:
        raise DomainError("no positive gaps")
    lo, hi = np.log10(pos[0]), np.log10(pos[-1])
    npts = max(int(np.ceil((hi - lo) * points_per_decade)) + 1, 1)
    s = np.logspace(lo, hi, npts) if npts > 1 else pos[:1].copy()
    s[0], s[-1] = pos[0], pos[-1]
    p = (len(pos) - np.searchsorted(pos, s, side="right")) / len(pos)
    return Staircase(s, p, pos, int(np.sum(gaps == 0)))


def _window_mask(staircase, window):
    lo, hi = window
    tol = 1e-12
    return (staircase.s >= lo * (1 - tol)) & (staircase.s <= hi * (1 + tol)) & (staircase.p > 0)


def _count_steps(staircase, window, mask):
    if staircase.gaps is not None:
        g = staircase.gaps
        return int(np.count_nonzero((g > window[0]) & (g <= window[1])))
    return max(len(np.unique(staircase.p[mask])) - 1, 0)


def fit_beta(staircase, window):
    """Least-squares power law ``p_int ~ s**(1 - beta)`` inside ``window``.

    Returns ``(beta, residual)`` where ``residual`` is the RMS misfit of
    ``log10 p_int``.
    """
    mask = _window_mask(staircase, window)
    if _count_steps(staircase, window, mask) < MIN_WINDOW_STEPS or mask.sum() < 3:
        raise DomainError(f"window {window} holds fewer than {MIN_WINDOW_STEPS} staircase steps")
    x = np.log10(staircase.s[mask])
    y = np.log10(staircase.p[mask])
    slope, icept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icept)) ** 2)))
    return 1.0 - slope, resid


def local_slopes(staircase, half_width=SLOPE_HALF_WIDTH):
    """Sliding-window log-log slopes of ``p_int``.

    Returns ``(centers, slopes)`` in decades, one entry per grid point whose
    full window of ``+-half_width`` decades lies within the sampled range.
    """
    keep = staircase.p > 0
    x = np.log10(staircase.s[keep])
    y = np.log10(staircase.p[keep])
    centers, slopes = [], []
    eps = 1e-9
    for c in x:
        if c - half_width < x[0] - eps or c + half_width > x[-1] + eps:
            continue
        m = (x >= c - half_width - eps) & (x <= c + half_width + eps)
        if m.sum() < 3:
            continue
        centers.append(c)
        slopes.append(np.polyfit(x[m], y[m], 1)[0])
    return np.array(centers), np.array(slopes)


def auto_window(staircase, half_width=SLOPE_HALF_WIDTH, max_variation=MAX_SLOPE_VARIATION,
                min_decades=MIN_WINDOW_DECADES, min_decay=MIN_DECAY_SLOPE):
    """Select the power-law window of a staircase, or ``None`` if there is none.

    A candidate window is the union of consecutive sliding windows whose local
    slopes stay within ``max_variation`` of each other while decaying at least
    as fast as ``s**-min_decay``; it must span ``min_decades`` decades and hold
    ``MIN_WINDOW_STEPS`` steps.  Plateaus of the staircase therefore never
    qualify.  Among candidates the one with the most steps wins, then the
    longer one, then the one at smaller ``s``.
    """
    centers, slopes = local_slopes(staircase, half_width)
    best = None
    for a in range(len(centers)):
        if slopes[a] > -min_decay:
            continue
        lo = hi = slopes[a]
        for b in range(a, len(centers)):
            if slopes[b] > -min_decay:
                break
            lo, hi = min(lo, slopes[b]), max(hi, slopes[b])
            if hi - lo >= max_variation:
                break
            x_lo, x_hi = centers[a] - half_width, centers[b] + half_width
            if x_hi - x_lo < min_decades - 1e-9:
                continue
            window = (10.0**x_lo, 10.0**x_hi)
            steps = _count_steps(staircase, window, _window_mask(staircase, window))
            if steps < MIN_WINDOW_STEPS:
                continue
            key = (steps, round(x_hi - x_lo, 9), -x_lo)
            if best is None or key > best[0]:
                best = (key, window)
    return None if best is None else best[1]


@dataclass(frozen=True)
class LevelSpacingResult:
    """Gap statistics of a spectrum and its inverse-power-law fit.

    ``window`` is ``None`` when no power-law regime was found; ``beta`` and
    ``residual`` then come from a fit across the whole staircase and
    ``power_law`` is False.
    """

    gaps: np.ndarray
    staircase: Staircase
    window: tuple | None
    beta: float
    residual: float
    power_law: bool


def analyze_level_spacing(eigvals, degeneracy_tol=None, window=None):
    """Gaps, staircase, window selection (unless given) and the beta fit."""
    gaps = level_spacings(eigvals, degeneracy_tol)
    stair = integrated_distribution(gaps)
    chosen = window if window is not None else auto_window(stair)
    if chosen is None:
        full = (stair.s[0], stair.s[stair.p > 0][-1])
        beta, resid = fit_beta(stair, full)
        return LevelSpacingResult(gaps, stair, None, beta, resid, False)
    beta, resid = fit_beta(stair, chosen)
    return LevelSpacingResult(gaps, stair, tuple(chosen), beta, resid,
                              resid <= POWER_LAW_MAX_RESIDUAL)
