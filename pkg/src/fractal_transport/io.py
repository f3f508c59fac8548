"""Plain-text exports: lattices, operators, spectra, staircases, series and fit
reports.  Tables are whitespace-delimited with ``#``-prefixed header lines."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DomainError
from .lattice import CouplingClass, LatticeGraph, LatticeKind

_FLOAT = "{:.17g}"


def _fmt(x):
    return _FLOAT.format(float(x))


def header_lines(meta):
    """``# key: value`` lines; non-scalar values are dumped as compact JSON."""
    lines = []
    for key, value in meta.items():
        if isinstance(value, (dict, list, tuple)):
            value = json.dumps(value, sort_keys=True, separators=(",", ":"), default=_json_default)
        lines.append(f"# {key}: {value}")
    return lines


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _write(path, lines):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_header(path):
    meta = {}
    for line in Path(path).read_text().splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition(": ")
        meta[key] = value
    return meta


# --------------------------------------------------------------------------
# lattice


def format_lattice(lattice, meta=None):
    lines = header_lines({
        "kind": lattice.kind.value,
        "generation": lattice.generation,
        "N": lattice.n_sites,
        "L": _fmt(lattice.side_length),
        **(meta or {}),
    })
    lines.append("sites:")
    lines += [f"{k} {_fmt(x)} {_fmt(y)}" for k, (x, y) in enumerate(lattice.coords)]
    lines.append("edges:")
    names = {CouplingClass.FRACTAL: "fractal", CouplingClass.COMPLEMENT: "complement"}
    lines += [f"{i} {j} {names[CouplingClass(c)]}" for (i, j), c in zip(lattice.edges, lattice.edge_classes)]
    return lines


def write_lattice(lattice, path, meta=None):
    return _write(path, format_lattice(lattice, meta))


def read_lattice(path):
    meta, sites, edges, classes = {}, [], [], []
    section = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        elif line in ("sites:", "edges:"):
            section = line[:-1]
        elif section == "sites":
            _, x, y = line.split()
            sites.append((float(x), float(y)))
        elif section == "edges":
            i, j, c = line.split()
            edges.append((int(i), int(j)))
            classes.append(CouplingClass.FRACTAL if c == "fractal" else CouplingClass.COMPLEMENT)
    if len(sites) != int(meta["N"]):
        raise DomainError(f"{path}: header N={meta['N']} but {len(sites)} sites")
    return LatticeGraph(
        LatticeKind(meta["kind"]), int(meta["generation"]), float(meta["L"]),
        np.array(sites, dtype=float).reshape(-1, 2),
        np.array(edges, dtype=np.int64).reshape(-1, 2),
        np.array(classes, dtype=np.int8),
    )


# --------------------------------------------------------------------------
# operators and spectra


def write_operator(op, path):
    """Matrix-market coordinate file, 1-based, sorted by ``(row, col)``.

    Symmetric matrix-market storage holds the lower triangle, i.e. the
    transpose of the stored upper triangle.
    """
    lines = ["%%MatrixMarket matrix coordinate real symmetric",
             f"{op.dim} {op.dim} {op.nnz_stored}"]
    order = np.lexsort((op.rows, op.cols))
    lines += [f"{op.cols[k] + 1} {op.rows[k] + 1} {_fmt(op.values[k])}" for k in order]
    return _write(path, lines)


def write_spectrum(eigvals, path, meta=None):
    lines = header_lines(meta or {}) + ["# columns: alpha_index omega"]
    lines += [f"{k} {_fmt(w)}" for k, w in enumerate(eigvals)]
    return _write(path, lines)


def write_staircase(staircase, path, meta=None):
    lines = header_lines(meta or {}) + ["# columns: s p_int"]
    lines += [f"{_fmt(s)} {_fmt(p)}" for s, p in zip(staircase.s, staircase.p)]
    return _write(path, lines)


# --------------------------------------------------------------------------
# series and fits


def write_series(series, path, meta=None):
    head = {"observable": series.tag}
    if series.r_ref is not None:
        head["r_ref"] = [float(x) for x in series.r_ref]
    head.update(series.metadata)
    head.update(meta or {})
    cols = "t value std" if series.std is not None else "t value"
    lines = header_lines(head) + [f"# columns: {cols}"]
    if series.std is None:
        lines += [f"{_fmt(t)} {_fmt(v)}" for t, v in zip(series.times, series.values)]
    else:
        lines += [f"{_fmt(t)} {_fmt(v)} {_fmt(s)}"
                  for t, v, s in zip(series.times, series.values, series.std)]
    return _write(path, lines)


def read_table(path):
    return np.loadtxt(path, comments="#", ndmin=2)


def fit_record(name, fit):
    return {
        "name": name,
        "window": [float(fit.window[0]), float(fit.window[1])],
        "alpha": float(fit.alpha),
        "residual": float(fit.residual),
        "stderr": float(fit.stderr),
        "points": int(fit.n_points),
    }


def write_fit_report(records, path, meta=None):
    """One block of ``key: value`` lines per fit record, blank-line separated."""
    lines = header_lines(meta or {})
    for rec in records:
        lines.append("")
        for key, value in rec.items():
            if isinstance(value, (list, tuple)):
                value = " ".join(_fmt(v) for v in value)
            elif isinstance(value, float):
                value = _fmt(value)
            lines.append(f"{key}: {value}")
    return _write(path, lines)


def read_fit_report(path):
    records, cur = [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            continue
        if not line.strip():
            cur = None
            continue
        if cur is None:
            cur = {}
            records.append(cur)
        key, _, value = line.partition(": ")
        cur[key] = value
    return records


def write_sweep(result, path, meta=None):
    lines = header_lines(meta or {}) + ["# columns: gamma alpha residual"]
    lines += [f"{_fmt(p.gamma)} {_fmt(p.fit.alpha)} {_fmt(p.fit.residual)}" for p in result.points]
    return _write(path, lines)
