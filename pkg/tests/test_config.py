import pytest

from fractal_transport.config import (
    apply_override,
    deep_merge,
    load_config_file,
    parse_value,
    resolve,
)
from fractal_transport.errors import ConfigError


def test_defaults():
    cfg = resolve()
    assert cfg.lattice.kind == "gasket" and cfg.lattice.generation == 4
    assert cfg.times.points == 400 and cfg.seed == 0
    assert cfg.observables == ("msd",)


def test_overrides_and_digest():
    a = resolve({}, [("lattice.generation", 5), ("initial.sign", "-")])
    assert a.lattice.generation == 5 and a.initial.sign == "-"
    b = resolve({"lattice": {"generation": 5}, "initial": {"sign": -1}})
    assert a.digest() == b.digest()
    c = resolve({"lattice": {"generation": 5}, "initial": {"sign": -1}, "output": {"dir": "elsewhere"}})
    assert c.digest() == a.digest()
    assert resolve({"seed": 1}).digest() != resolve().digest()


def test_parse_value():
    assert parse_value("5") == 5
    assert parse_value("1e4") == 1e4
    assert parse_value("[0, 0.5]") == [0, 0.5]
    assert parse_value("-") == "-"
    assert parse_value("corner") == "corner"


@pytest.mark.parametrize("data,path", [
    ({"lattice": {"kind": "hexagon"}}, "lattice.kind"),
    ({"lattice": {"generation": 12}}, "lattice.generation"),
    ({"lattice": {"kind": "square", "side": 1}}, "lattice.side"),
    ({"lattice": {"gamma": 2.0}}, "lattice.gamma"),
    ({"lattice": {"J": 0}}, "lattice.J"),
    ({"initial": {"type": "ensemble"}}, "initial"),
    ({"initial": {"sign": "x"}}, "initial.sign"),
    ({"times": {"start": 10, "stop": 1}}, "times.stop"),
    ({"observables": ["msd", "entropy"]}, "observables[1]"),
    ({"analysis": {"windows": ["medium"]}}, "analysis.windows[0]"),
    ({"analysis": {"windows": [[5, 1]]}}, "analysis.windows[0]"),
    ({"observables": ["region_weight"]}, "analysis.regions"),
    ({"sweep": {"gamma": [0.5]}}, "sweep.gamma"),
    ({"lattice": {"kind": "interpolating"}, "sweep": {"gamma": [0.5, 0.1]}}, "sweep.gamma"),
    ({"name": "a/b"}, "name"),
    ({"bogus": 1}, "bogus"),
    ({"lattice": {"bogus": 1}}, "lattice.bogus"),
])
def test_validation_reports_field_path(data, path):
    with pytest.raises(ConfigError) as err:
        resolve(data)
    assert err.value.path == path


def test_unknown_override():
    with pytest.raises(ConfigError) as err:
        resolve({}, [("times.nope", 1)])
    assert err.value.path == "times.nope"
    with pytest.raises(ConfigError):
        apply_override({"a": 1}, "a.b", 2)


def test_load_config_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("lattice:\n  kind: carpet\n  generation: 3\nobservables: [spectrum]\n")
    cfg = resolve(load_config_file(p))
    assert cfg.lattice.kind == "carpet" and cfg.observables == ("spectrum",)
    (tmp_path / "bad.yaml").write_text("- a list\n")
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "bad.yaml")
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "missing.yaml")


def test_deep_merge_does_not_alias():
    base = {"a": {"b": [1]}}
    out = deep_merge(base, {"a": {"c": 2}})
    out["a"]["b"].append(3)
    assert base == {"a": {"b": [1]}}
