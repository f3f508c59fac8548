import numpy as np
import pytest

from fractal_transport import io as fio
from fractal_transport.analysis import fit_alpha, gamma_sweep
from fractal_transport.dynamics import ObservableSeries, log_time_grid
from fractal_transport.hamiltonian import assemble_quantum
from fractal_transport.lattice import build_carpet, build_interpolating
from fractal_transport.spectral import integrated_distribution


def test_lattice_roundtrip(tmp_path):
    for lat in (build_interpolating(3), build_carpet(3)):
        path = fio.write_lattice(lat, tmp_path / f"{lat.kind.value}.txt", {"seed": 3})
        back = fio.read_lattice(path)
        assert back == lat
        meta = fio.read_header(path)
        assert meta["N"] == str(lat.n_sites) and meta["seed"] == "3"


def test_operator_matrix_market(tmp_path):
    import scipy.io

    lat = build_interpolating(2)
    op = assemble_quantum(lat)
    path = fio.write_operator(op, tmp_path / "h.mtx")
    m = scipy.io.mmread(str(path))
    np.testing.assert_array_equal(m.toarray(), op.to_dense())
    body = [line.split() for line in path.read_text().splitlines()[2:]]
    rows = [(int(r), int(c)) for r, c, _ in body]
    assert rows == sorted(rows) and all(r >= c for r, c in rows)


def test_tables(tmp_path):
    t = log_time_grid(1e-2, 1e2, 30)
    s = ObservableSeries(t, t**2, "msd", (0.0, 0.0), std=0.1 * t, metadata={"region": 2})
    path = fio.write_series(s, tmp_path / "s.dat", {"seed": 1})
    data = fio.read_table(path)
    assert data.shape == (30, 3)
    np.testing.assert_array_equal(data[:, 0], t)
    np.testing.assert_array_equal(data[:, 1], t**2)
    meta = fio.read_header(path)
    assert meta["observable"] == "msd" and meta["columns"] == "t value std"

    stair = integrated_distribution([1.0, 2.0, 4.0, 8.0])
    data = fio.read_table(fio.write_staircase(stair, tmp_path / "p.dat"))
    np.testing.assert_array_equal(data[:, 1], stair.p)
    data = fio.read_table(fio.write_spectrum(np.array([-1.0, 0.5]), tmp_path / "w.dat"))
    np.testing.assert_array_equal(data, [[0, -1.0], [1, 0.5]])


def test_fit_report_roundtrip(tmp_path):
    t = log_time_grid(1e-2, 1e2)
    fit = fit_alpha(ObservableSeries(t, 2 * t**1.5, "msd"), (0.1, 10.0))
    path = fio.write_fit_report([fio.fit_record("a", fit), fio.fit_record("b", fit)], tmp_path / "f.txt")
    recs = fio.read_fit_report(path)
    assert [r["name"] for r in recs] == ["a", "b"]
    assert float(recs[0]["alpha"]) == fit.alpha


def test_sweep_table(tmp_path):
    res = gamma_sweep(2, [0.0, 1.0], window=(0.1, 1.0))
    data = fio.read_table(fio.write_sweep(res, tmp_path / "g.dat"))
    np.testing.assert_array_equal(data[:, 0], [0.0, 1.0])
    np.testing.assert_array_equal(data[:, 1], res.alphas)


def test_header_rejects_unserializable():
    with pytest.raises(TypeError):
        fio.header_lines({"x": [object()]})
