import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractal_transport import spectral
from fractal_transport.errors import ConvergenceError, DomainError
from fractal_transport.hamiltonian import SymmetricOperator, assemble_quantum
from fractal_transport.lattice import build_carpet, build_gasket, build_triangular
from fractal_transport.spectral import (
    Staircase,
    analyze_level_spacing,
    auto_window,
    eigendecompose,
    eigenvalues,
    fit_beta,
    integrated_distribution,
    level_spacings,
    local_slopes,
)

from oracles import bisection_spectrum


def _dense_op(m):
    m = np.asarray(m, dtype=float)
    r, c = np.triu_indices(len(m))
    return SymmetricOperator.from_triplets(len(m), r, c, m[r, c])


def test_small_spectra(chain2):
    np.testing.assert_allclose(eigendecompose(assemble_quantum(chain2)).eigenvalues, [-1, 1], atol=1e-14)
    tri = assemble_quantum(build_triangular(2))
    np.testing.assert_allclose(eigenvalues(tri), [-2, 1, 1], atol=1e-14)


def test_g3_spectrum_matches_inertia_bisection(g3_quantum):
    op, decomp = g3_quantum
    ref = bisection_spectrum(op.to_dense())
    np.testing.assert_allclose(decomp.eigenvalues, ref, atol=1e-8)


@pytest.mark.parametrize("lat", [build_gasket(4), build_carpet(3), build_triangular(9)],
                         ids=lambda l: l.kind.value)
def test_residual_orthonormality_trace(lat):
    op = assemble_quantum(lat)
    d = eigendecompose(op)
    assert d.residuals(op).max() < 1e-10
    assert d.orthonormality_error() < 1e-12
    assert abs(d.eigenvalues.sum() - op.trace()) < 1e-8 * op.dim
    assert np.all(np.diff(d.eigenvalues) >= 0)
    x = np.random.default_rng(0).standard_normal(op.dim)
    np.testing.assert_allclose(d.reconstruct() @ x, op.matvec(x), atol=1e-6)


def test_sign_convention(g3_quantum):
    v = g3_quantum[1].eigenvectors
    for k in range(v.shape[1]):
        first = v[np.argmax(np.abs(v[:, k]) > spectral.SIGN_TOL), k]
        assert first > 0


def test_decomposition_deterministic(g3):
    a = eigendecompose(assemble_quantum(g3))
    b = eigendecompose(assemble_quantum(g3))
    assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()


def test_convergence_error_on_bad_eigenpairs(monkeypatch, g3):
    real = np.linalg.eigh

    def broken(m):
        w, v = real(m)
        return w + 1e-3, v

    monkeypatch.setattr(spectral.np.linalg, "eigh", broken)
    with pytest.raises(ConvergenceError) as err:
        eigendecompose(assemble_quantum(g3))
    assert err.value.worst_residual > 1e-4
    eigendecompose(assemble_quantum(g3), check=False)


def test_level_spacings():
    np.testing.assert_array_equal(level_spacings([-1.0, 1.0]), [2.0])
    gaps = level_spacings([0.0, 0.0, 1.0], degeneracy_tol=1e-12)
    np.testing.assert_array_equal(gaps, [0.0, 1.0])
    st_ = integrated_distribution(gaps)
    assert st_.n_zero == 1 and st_.n_positive == 1
    with pytest.raises(DomainError):
        level_spacings([1.0, 0.0])
    with pytest.raises(DomainError):
        level_spacings([1.0])


def test_near_degenerate_gaps_are_zeroed():
    gaps = level_spacings([0.0, 1e-14, 1.0, 2.0])
    assert gaps[0] == 0.0


def test_gasket_has_macroscopic_degeneracy(g4):
    gaps = level_spacings(eigenvalues(assemble_quantum(g4)))
    assert np.mean(gaps == 0) > 0.3


def test_staircase_counts():
    one = integrated_distribution([2.0])
    assert one(1.999) == 1.0 and one(2.0) == 0.0 and one(3.0) == 0.0
    three = integrated_distribution([1.0, 2.0, 4.0])
    assert three(1.5) == pytest.approx(2 / 3)
    assert three.p[0] == pytest.approx(2 / 3) and three.p[-1] == 0.0
    with pytest.raises(DomainError):
        integrated_distribution([0.0, 0.0])


def test_geometric_gaps_closed_form():
    gaps = 1e-6 * 2.0 ** np.arange(41)
    stair = integrated_distribution(gaps)
    s = stair.s[:-1]
    expected = (40 - np.floor(np.log2(s / 1e-6) + 1e-9)) / 41
    np.testing.assert_allclose(stair.p[:-1], expected, atol=1e-15)
    np.testing.assert_allclose(stair(stair.s), stair.p)
    # between consecutive gaps the count is exact
    mids = np.sqrt(gaps[:-1] * gaps[1:])
    np.testing.assert_allclose(stair(mids), (40 - np.arange(40)) / 41)


def _power_staircase(slope, lo=-4.0, hi=1.0, ppd=20):
    s = np.logspace(lo, hi, int((hi - lo) * ppd) + 1)
    return Staircase(s, 0.5 * s**slope)


def test_fit_beta_exact_power_law():
    beta, resid = fit_beta(_power_staircase(-0.6), (1e-3, 1.0))
    assert beta == pytest.approx(1.6, abs=1e-12)
    assert resid < 1e-12


@settings(max_examples=40, deadline=None)
@given(slope=st.floats(-1.5, -0.1), a=st.floats(-4.0, -2.0), width=st.floats(2.2, 3.0),
       stride=st.integers(1, 4))
def test_fit_beta_recovers_exponent_under_subsampling(slope, a, width, stride):
    full = _power_staircase(slope)
    sub = Staircase(full.s[::stride], full.p[::stride])
    beta, _ = fit_beta(sub, (10**a, 10 ** min(a + width, 1.0)))
    assert abs(beta - (1 - slope)) < 1e-3


def test_fit_beta_needs_steps():
    with pytest.raises(DomainError):
        fit_beta(integrated_distribution([1.0, 2.0, 4.0]), (0.5, 5.0))


def _spectrum_staircases(w, shift=0.0, scale=1.0):
    base = integrated_distribution(level_spacings(w))
    other = integrated_distribution(level_spacings(scale * (np.asarray(w) + shift)))
    g = np.unique(base.gaps)
    probe = np.sqrt(g[:-1] * g[1:])
    return base, other, probe


@settings(max_examples=30, deadline=None)
@given(shift=st.floats(-5.0, 5.0), scale=st.floats(0.25, 4.0), seed=st.integers(0, 100))
def test_staircase_shift_and_scale(shift, scale, seed):
    w = np.sort(np.random.default_rng(seed).uniform(-1, 1, 60))
    base, shifted, probe = _spectrum_staircases(w, shift=shift)
    np.testing.assert_array_equal(base(probe), shifted(probe))
    base, scaled, probe = _spectrum_staircases(w, scale=scale)
    np.testing.assert_array_equal(scaled(scale * probe), base(probe))


def test_local_slopes_of_power_law():
    centers, slopes = local_slopes(_power_staircase(-0.7), 0.5)
    assert len(centers) > 0
    np.testing.assert_allclose(slopes, -0.7, atol=1e-10)


def test_auto_window_rejects_plateaus():
    s = np.logspace(-3, 1, 81)
    assert auto_window(Staircase(s, np.full_like(s, 0.5))) is None


def test_auto_window_finds_power_law():
    stair = _power_staircase(-0.6, -5, 1)
    w = auto_window(stair)
    assert w is not None
    assert np.log10(w[1] / w[0]) >= 2.0 - 1e-9


def test_analyze_g6_gasket_power_law():
    res = analyze_level_spacing(eigenvalues(assemble_quantum(build_gasket(6))))
    assert res.power_law
    assert res.residual <= spectral.POWER_LAW_MAX_RESIDUAL
    assert 1.5 < res.beta < 1.75


def test_analyze_regular_has_no_power_law():
    res = analyze_level_spacing(eigenvalues(assemble_quantum(build_triangular(40))))
    assert not res.power_law
