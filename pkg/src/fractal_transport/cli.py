"""Command-line entry point.

Every config key can be overridden with a flag of the same dotted name, e.g.
``fractal-transport evolve --lattice.generation 5 --times.stop 1e5``.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys

from .config import load_config_file, parse_value, resolve
from .errors import BoundsError, ConfigError, DomainError, NumericalError, ResourceGuardError
from .presets import PRESETS, list_presets, preset_configs
from .runner import run_experiments

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4
THREADS_ENV = "FRACTAL_TRANSPORT_THREADS"

# observables implied by each single-purpose subcommand
_COMMAND_OBSERVABLES = {
    "generate": ["lattice", "operator"],
    "spectrum": ["spectrum"],
    "evolve": ["msd"],
    "ctrw": ["classical_msd", "classical_return"],
    "levelspacing": ["spectrum", "staircase"],
    "sweep-gamma": ["msd"],
}
_DEFAULT_SWEEP = {"lattice": {"kind": "interpolating", "generation": 7},
                  "sweep": {"gamma": [round(0.1 * k, 1) for k in range(11)]},
                  "analysis": {"windows": ["spreading"]}}

log = logging.getLogger("fractal_transport")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fractal-transport",
        description="Quantum and classical transport on fractal and regular lattices.",
        allow_abbrev=False,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p):
        p.add_argument("--config", metavar="FILE", help="YAML experiment config")
        p.add_argument("--output", metavar="DIR", help="output directory (overrides output.dir)")

    helps = {
        "generate": "export a lattice and its Hamiltonian",
        "spectrum": "export the Hamiltonian spectrum",
        "evolve": "quantum evolution and MSD fits",
        "ctrw": "classical continuous-time random walk",
        "levelspacing": "level-spacing staircase and beta fit",
        "sweep-gamma": "MSD exponent versus coupling ratio on the interpolating lattice",
    }
    for name, text in helps.items():
        common(sub.add_parser(name, help=text, allow_abbrev=False))
    run = sub.add_parser("run", help="run a preset or a config file", allow_abbrev=False)
    run.add_argument("target", help="preset name (see list-presets) or path to a YAML config")
    run.add_argument("--output", metavar="DIR", help="output directory (overrides output.dir)")
    sub.add_parser("list-presets", help="list the built-in presets", allow_abbrev=False)
    return parser


def parse_overrides(tokens):
    """``['--a.b', '1', '--c=x']`` to ``[('a.b', 1), ('c', 'x')]``."""
    pairs = []
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--") or len(tok) == 2:
            raise ConfigError(tok, "unexpected argument")
        key, eq, value = tok[2:].partition("=")
        if not eq:
            try:
                value = next(it)
            except StopIteration:
                raise ConfigError(key, "missing value") from None
        pairs.append((key, parse_value(value)))
    return pairs


def _configs(args, overrides):
    if args.command == "run":
        if args.target in PRESETS:
            return preset_configs(args.target, overrides)
        if not os.path.exists(args.target):
            raise ConfigError("target", f"{args.target!r} is neither a preset nor a config file")
        return [resolve(load_config_file(args.target), overrides)]
    data = load_config_file(args.config) if args.config else {}
    if args.command == "sweep-gamma":
        base = dict(_DEFAULT_SWEEP)
        base.update(data)
        data = base
    data = {**data, "observables": _COMMAND_OBSERVABLES[args.command]}
    if args.command == "ctrw" and "analysis" not in data:
        data["analysis"] = {"windows": []}
    return [resolve(data, overrides)]


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return contextlib.nullcontext()
    try:
        n = int(raw)
        if n < 1:
            raise ValueError
    except ValueError:
        raise ConfigError(THREADS_ENV, f"expected a positive integer, got {raw!r}") from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv=None):
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "list-presets":
            if rest:
                raise ConfigError(rest[0], "list-presets takes no options")
            for name, desc in list_presets():
                print(f"{name:8s} {desc}")
            return EXIT_OK
        configs = _configs(args, parse_overrides(rest))
        with _thread_limit():
            result = run_experiments(configs, args.output, label=getattr(args, "target", args.command))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, BoundsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in result.files:
        print(path)
    print(result.manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
