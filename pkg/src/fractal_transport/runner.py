"""Execute experiment configs and write their data files plus a manifest."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from .analysis import (
    default_windows,
    ensemble_msd,
    fit_alpha,
    gamma_sweep,
    spreading_window,
)
from .ctrw import classical_msd_series, classical_return_series
from .dynamics import (
    SingleSite,
    Superposition,
    log_time_grid,
    msd_series,
    region_weight_series,
    return_probability_series,
)
from .errors import BoundsError, ConfigError, DomainError, ResourceGuardError
from .hamiltonian import CouplingConfig, assemble_ctrw_generator, assemble_quantum
from .lattice import (
    RegionSpec,
    build_lattice,
    corner_neighbor,
    corner_site,
    predicted_site_count,
    region_sites,
)
from .spectral import analyze_level_spacing, eigendecompose, eigenvalues

log = logging.getLogger(__name__)

MAX_SITES = 10_000
MANIFEST_NAME = "manifest.json"
_QUANTUM_OBS = {"msd", "return_probability", "region_weight"}
_CLASSICAL_OBS = {"classical_msd", "classical_return"}


@dataclass(frozen=True)
class RunResult:
    output_dir: Path
    files: list
    manifest: Path


def check_resources(spec):
    n = predicted_site_count(spec.kind, spec.generation, spec.side)
    if n > MAX_SITES:
        raise ResourceGuardError(
            f"{spec.kind} lattice with {n} sites exceeds the {MAX_SITES}-site guard for dense "
            "diagonalization; choose a smaller generation or side"
        )
    return n


def _describe_lattice(spec):
    if spec.generation is not None:
        return f"{spec.kind} generation {spec.generation}"
    return f"{spec.kind} side {spec.side}"


def _initial_states(cfg, lattice, rng):
    """List of initial-state specs; one entry unless the config is an ensemble."""
    ini = cfg.initial
    try:
        if ini.type == "site":
            site = corner_site(lattice, ini.corner) if ini.site == "corner" else ini.site
            if site >= lattice.n_sites:
                raise ConfigError("initial.site", f"site {site} outside [0, {lattice.n_sites})")
            return [SingleSite(int(site))]
        if ini.type == "superposition":
            a = corner_site(lattice, ini.corner) if ini.site == "corner" else ini.site
            b = corner_neighbor(lattice, ini.corner) if ini.site == "corner" else int(lattice.neighbors(a)[0])
            return [Superposition(int(a), int(b), 1 if ini.sign == "+" else -1)]
        if ini.region is not None:
            sites = sorted(region_sites(lattice, RegionSpec(ini.region, ini.corner)))
        else:
            if ini.sample > lattice.n_sites:
                raise ConfigError("initial.sample", "more samples than sites")
            sites = sorted(rng.choice(lattice.n_sites, size=ini.sample, replace=False).tolist())
        return [SingleSite(int(s)) for s in sites]
    except (DomainError, BoundsError) as exc:
        raise ConfigError("initial", str(exc)) from exc


def _resolve_windows(cfg, lattice, series):
    out = []
    for w in cfg.analysis.windows:
        if isinstance(w, tuple):
            out.append((f"{w[0]:g}-{w[1]:g}", w))
        elif w == "spreading":
            out.append((w, spreading_window(series, cfg.analysis.fraction)))
        else:
            try:
                regimes = default_windows(lattice, cfg.lattice.J)
            except DomainError as exc:
                raise ConfigError("analysis.windows", str(exc)) from exc
            out.append((w, getattr(regimes, w)))
    return out


def _fit_records(cfg, lattice, series, label):
    records = []
    for wname, window in _resolve_windows(cfg, lattice, series):
        try:
            fit = fit_alpha(series, window)
        except DomainError as exc:
            raise ConfigError("analysis.windows", f"{wname} window {window}: {exc}") from exc
        rec = fio.fit_record(wname, fit)
        rec = {"series": label, **rec}
        records.append(rec)
    return records


def _experiment_outputs(cfg):
    """Compute every output of one config as ``{relative_name: lines}``."""
    check_resources(cfg.lattice)
    spec = cfg.lattice
    rng = np.random.default_rng(cfg.seed)
    lattice = build_lattice(spec.kind, spec.generation, spec.side)
    times = log_time_grid(cfg.times.start, cfg.times.stop, cfg.times.points)
    obs = set(cfg.observables)
    states = _initial_states(cfg, lattice, rng)
    meta = {
        "config": cfg.to_dict(),
        "lattice_spec": _describe_lattice(spec),
        "seed": cfg.seed,
        "initial_state": [repr(s) for s in states] if len(states) <= 8 else
                         {"ensemble_size": len(states), "sites": [s.site for s in states]},
    }
    files = {}
    fits = []
    name = cfg.name

    def table(suffix, series):
        files[f"{name}_{suffix}.dat"] = _series_lines(series, meta)

    if "lattice" in obs:
        files[f"{name}_lattice.txt"] = fio.format_lattice(lattice, {"config": cfg.to_dict(), "seed": cfg.seed})

    coupling = CouplingConfig(spec.J, spec.gamma)
    if "operator" in obs:
        op = assemble_quantum(lattice, coupling)
        files[f"{name}_operator.mtx"] = _operator_lines(op, meta)

    if cfg.sweep_gamma:
        log.info("%s: gamma sweep over %s", name, cfg.sweep_gamma)
        first = (cfg.analysis.windows or ("spreading",))[0]
        if first == "spreading":
            window = lambda s: spreading_window(s, cfg.analysis.fraction)  # noqa: E731
        elif isinstance(first, tuple):
            window = first
        else:
            window = getattr(default_windows(lattice, spec.J), first)
        result = gamma_sweep(spec.generation, cfg.sweep_gamma, window, times, spec.J)
        for p in result.points:
            table(f"gamma{p.gamma:.2f}_msd", p.series)
            fits.append({"series": f"gamma={p.gamma:g}", **fio.fit_record("sweep", p.fit)})
        files[f"{name}_sweep.dat"] = fio.header_lines(meta) + ["# columns: gamma alpha residual"] + [
            f"{fio._fmt(p.gamma)} {fio._fmt(p.fit.alpha)} {fio._fmt(p.fit.residual)}" for p in result.points]
        obs -= _QUANTUM_OBS

    decomp = None
    if obs & (_QUANTUM_OBS | {"spectrum", "staircase"}):
        op = assemble_quantum(lattice, coupling)
        if obs & _QUANTUM_OBS:
            log.info("%s: diagonalizing %d sites", name, lattice.n_sites)
            decomp = eigendecompose(op)
            spectrum = decomp.eigenvalues
        else:
            spectrum = eigenvalues(op)
        if "spectrum" in obs:
            files[f"{name}_spectrum.dat"] = fio.header_lines(meta) + ["# columns: alpha_index omega"] + [
                f"{k} {fio._fmt(w)}" for k, w in enumerate(spectrum)]
        if "staircase" in obs:
            ls = analyze_level_spacing(spectrum)
            smeta = {**meta, "positive_gaps": ls.staircase.n_positive, "zero_gaps": ls.staircase.n_zero,
                     "power_law": ls.power_law, "residual": fio._fmt(ls.residual)}
            files[f"{name}_staircase.dat"] = fio.header_lines(smeta) + ["# columns: s p_int"] + [
                f"{fio._fmt(s)} {fio._fmt(p)}" for s, p in zip(ls.staircase.s, ls.staircase.p)]
            if ls.power_law:
                rec = {"name": "beta", "window": list(ls.window), "beta": float(ls.beta),
                       "residual": float(ls.residual)}
                files[f"{name}_levelspacing.txt"] = _report_lines([rec], meta)

    if "msd" in obs and not cfg.sweep_gamma:
        if len(states) > 1:
            mean, _ = ensemble_msd(lattice, decomp, [s.site for s in states], times)
            table("msd", mean)
            fits += _fit_records(cfg, lattice, mean, "ensemble_msd")
        else:
            series = msd_series(lattice, decomp, states[0], times)
            table("msd", series)
            fits += _fit_records(cfg, lattice, series, "msd")

    if "return_probability" in obs:
        for s in _single_sites(states, "return_probability"):
            table("return" if len(states) == 1 else f"return_site{s}",
                  return_probability_series(lattice, decomp, s, times))

    if "region_weight" in obs:
        try:
            regions = {i: region_sites(lattice, RegionSpec(i, cfg.initial.corner))
                       for i in cfg.analysis.regions}
        except (DomainError, BoundsError) as exc:
            raise ConfigError("analysis.regions", str(exc)) from exc
        if len(states) > 1:
            raise ConfigError("initial.type", "region_weight needs a single initial state")
        for i, series in region_weight_series(lattice, decomp, states[0], regions, times).items():
            series = _with_region_meta(series, i, len(regions[i]), lattice.n_sites)
            table(f"region{i}", series)

    if obs & _CLASSICAL_OBS:
        cdec = eigendecompose(assemble_ctrw_generator(lattice, spec.J))
        for s in _single_sites(states, "classical observables"):
            suffix = "" if len(states) == 1 else f"_site{s}"
            if "classical_msd" in obs:
                series = classical_msd_series(lattice, cdec, s, times)
                table(f"classical_msd{suffix}", series)
                fits += _fit_records(cfg, lattice, series, f"classical_msd{suffix}")
            if "classical_return" in obs:
                table(f"classical_return{suffix}", classical_return_series(lattice, cdec, s, times))

    if fits:
        files[f"{name}_fits.txt"] = _report_lines(fits, meta)
    return files


def _single_sites(states, what):
    if any(not isinstance(s, SingleSite) for s in states):
        raise ConfigError("initial.type", f"{what} need single-site initial states")
    return [s.site for s in states]


def _with_region_meta(series, i, count, n):
    series.metadata.update({"region_generation": i, "region_sites": count,
                            "site_ratio": fio._fmt(count / n)})
    return series


def _series_lines(series, meta):
    head = {"observable": series.tag}
    if series.r_ref is not None:
        head["r_ref"] = [float(x) for x in series.r_ref]
    head.update({k: v for k, v in series.metadata.items() if k != "initial_sites"})
    head.update(meta)
    cols = "t value std" if series.std is not None else "t value"
    lines = fio.header_lines(head) + [f"# columns: {cols}"]
    f = fio._fmt
    if series.std is None:
        lines += [f"{f(t)} {f(v)}" for t, v in zip(series.times, series.values)]
    else:
        lines += [f"{f(t)} {f(v)} {f(s)}" for t, v, s in zip(series.times, series.values, series.std)]
    return lines


def _report_lines(records, meta):
    lines = fio.header_lines(meta)
    for rec in records:
        lines.append("")
        for key, value in rec.items():
            if isinstance(value, (list, tuple)):
                value = " ".join(fio._fmt(v) for v in value)
            elif isinstance(value, float):
                value = fio._fmt(value)
            lines.append(f"{key}: {value}")
    return lines


def _operator_lines(op, meta):
    order = np.lexsort((op.rows, op.cols))
    lines = ["%%MatrixMarket matrix coordinate real symmetric"]
    lines += ["%" + line[1:] for line in fio.header_lines(meta)]
    lines.append(f"{op.dim} {op.dim} {op.nnz_stored}")
    lines += [f"{op.cols[k] + 1} {op.rows[k] + 1} {fio._fmt(op.values[k])}" for k in order]
    return lines


def run_experiments(configs, output_dir=None, label=None):
    """Run ``configs`` in order, then write all files and ``manifest.json``.

    ``output_dir`` defaults to the first config's ``output.dir``.  Data files
    are identical across reruns; the timestamp appears only in the manifest.
    """
    configs = list(configs)
    if not configs:
        raise ConfigError("configs", "nothing to run")
    out = Path(output_dir if output_dir is not None else configs[0].output_dir)
    for cfg in configs:
        check_resources(cfg.lattice)
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError("name", "experiment names within one run must be unique")

    outputs = {}
    for cfg in configs:
        log.info("running %s", cfg.name)
        outputs.update(_experiment_outputs(cfg))

    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for rel in sorted(outputs):
        data = ("\n".join(outputs[rel]) + "\n").encode()
        (out / rel).write_bytes(data)
        entries.append({"path": rel, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
    input_hash = hashlib.sha256("".join(c.digest() for c in configs).encode()).hexdigest()
    manifest = {
        "label": label or configs[0].name,
        "version": __version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "input_hash": input_hash,
        "experiments": [{"name": c.name, "config_hash": c.digest(), "seed": c.seed} for c in configs],
        "files": entries,
    }
    mpath = out / MANIFEST_NAME
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return RunResult(out, [out / e["path"] for e in entries], mpath)


def run_experiment(config, output_dir=None):
    return run_experiments([config], output_dir)
