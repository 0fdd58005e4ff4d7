import numpy as np
import pytest

from heavytail_ineq.config import (
    GridConfig,
    MonteCarloConfig,
    OutputConfig,
    RunConfig,
    VerifyConfig,
    load_config,
    parse_config_text,
    parse_phi,
)
from heavytail_ineq.errors import ConfigError
from heavytail_ineq.measures import Family


def test_parse_config_text_with_comments():
    values, lines = parse_config_text(
        "# profile run\ncommand = profile\n\nmeasure.alpha = 2   # tail index\ngrid.t.values = 0.1, 0.2\n"
    )
    assert values == {"command": "profile", "measure.alpha": "2", "grid.t.values": "0.1, 0.2"}
    assert lines["measure.alpha"] == 4


@pytest.mark.parametrize(
    "text, line",
    [
        ("command = profile\nmeasure.alpha 2\n", 2),
        ("command = profile\nplot.style = dark\n", 2),
        ("command = profile\nmeasure.alpha = 1\nmeasure.alpha = 2\n", 3),
    ],
    ids=["missing-equals", "unknown-section", "duplicate-key"],
)
def test_parse_errors_carry_the_line(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_load_full_config(write_config, tmp_path):
    path = write_config({
        "command": "weak",
        "measure.family": "sub-exponential",
        "measure.p": 0.5,
        "grid.s.values": "0.01, 0.1",
        "grid.n.values": "1, 3",
        "mc.seed": 9,
        "mc.samples": "1e5",
        "output.dir": tmp_path / "out",
        "output.prefix": "run1_",
    })
    cfg = load_config(path)
    assert cfg.command == "weak"
    assert cfg.measure.family == Family.SUBEXPONENTIAL.value
    assert cfg.grid.s == (0.01, 0.1)
    assert cfg.grid.n == (1, 3)
    assert (cfg.mc.seed, cfg.mc.samples) == (9, 100_000)
    assert cfg.output.path("x.csv") == tmp_path / "out" / "run1_x.csv"
    assert cfg.build_measure().p == 0.5


def test_geometric_grid_from_bounds():
    cfg = GridConfig.from_mapping({"grid.t.min": "1e-3", "grid.t.max": "0.4", "grid.t.points": "5"})
    np.testing.assert_allclose(cfg.t, np.geomspace(1e-3, 0.4, 5))
    assert cfg.s == GridConfig().s


@pytest.mark.parametrize(
    "entries, field",
    [
        ({"grid.t.values": ""}, "grid.t.values"),
        ({"grid.t.values": "0.3, 0.1"}, "grid.t.values"),
        ({"grid.t.values": "0.1, 1.0"}, "grid.t.values"),
        ({"grid.s.values": "0.1, 0.5"}, "grid.s.values"),
        ({"grid.t.min": "0", "grid.t.points": "3"}, "grid.t.min"),
        ({"grid.x.min": "5", "grid.x.max": "1"}, "grid.x.max"),
        ({"grid.n.values": "0"}, "grid.n.values"),
    ],
)
def test_grid_errors(entries, field):
    with pytest.raises(ConfigError) as info:
        GridConfig.from_mapping(entries)
    assert info.value.field == field


@pytest.mark.parametrize(
    "entries, field",
    [
        ({"command": "plot"}, "command"),
        ({"command": "profile", "measure.family": "gaussian"}, "measure.family"),
        ({"command": "profile"}, "measure.alpha"),
        ({"command": "profile", "measure.family": "vq"}, "measure.q"),
        ({"command": "verify", "measure.alpha": "2", "verify.kind": "log-sobolev"}, "verify.kind"),
        ({"command": "verify", "measure.alpha": "2", "verify.engine": "gpu"}, "verify.engine"),
        ({"command": "verify", "measure.alpha": "2", "verify.scale": "0"}, "verify.scale"),
        ({"command": "lyapunov", "measure.alpha": "2", "lyapunov.family": "gaussian"}, "lyapunov.family"),
        ({"command": "profile", "measure.alpha": "two"}, "measure.alpha"),
    ],
)
def test_run_config_errors(entries, field):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_mapping(entries)
    assert info.value.field == field


def test_invalid_parameter_becomes_config_error():
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"command": "profile", "measure.alpha": "-1"})
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"command": "profile", "measure.family": "phi-measure", "measure.phi": "cubic:1"})


@pytest.mark.parametrize("entries", [{"mc.blocks": "1"}, {"mc.samples": "5", "mc.blocks": "10"}, {"mc.seed": "-1"}])
def test_monte_carlo_validation(entries):
    with pytest.raises(ConfigError):
        MonteCarloConfig.from_mapping(entries)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_parse_phi():
    assert parse_phi("power:0.5")(4.0) == pytest.approx(2.0)
    assert parse_phi("linear")(3.0) == pytest.approx(3.0)
    assert parse_phi(" power_log : 0.5 : 0.25 ").label
    with pytest.raises(ValueError):
        parse_phi("cubic:1")
    with pytest.raises(ValueError):
        parse_phi("power")
    with pytest.raises(ValueError):
        parse_phi("power:abc")


def test_output_dir_environment_fallback(monkeypatch, tmp_path):
    monkeypatch.setenv("HTI_OUTPUT_DIR", str(tmp_path))
    assert OutputConfig.from_mapping({}).directory == tmp_path
    assert OutputConfig.from_mapping({"output.dir": "elsewhere"}).directory.name == "elsewhere"
    monkeypatch.delenv("HTI_OUTPUT_DIR")
    assert str(OutputConfig.from_mapping({}).directory) == "."


def test_verify_engine_defaults_to_automatic():
    assert VerifyConfig.from_mapping({}).engine is None
    assert VerifyConfig.from_mapping({"verify.engine": "mc"}).engine == "mc"
