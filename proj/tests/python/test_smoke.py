import math

import pytest

import otecasimir as ote

CONFIG = """{
  "geometry": {"period": 1e-6, "distance": 4e-6,
               "body1": {"depth": 0.5e-6, "thickness": 2e-6, "ridge": "silicon-model"},
               "body2": {"depth": 0.5e-6, "ridge": "silicon-model"}},
  "quadrature": {"tolerance": 1e-3},
  "truncation": {"mode": "fixed", "M": 1, "mbar": 1}
}"""


def test_version_and_materials():
    assert ote.__version__ == "0.1.0"
    assert "silica-model" in ote.builtin_materials()
    assert ote.permittivity("vacuum", 1e14) == 1
    eps = ote.permittivity("silica-model", 1e14)
    assert eps.imag > 0
    assert ote.permittivity_imag("silica-model", 1e12) > ote.permittivity_imag("silica-model", 1e16) >= 1


def test_half_spaces_attract():
    p = ote.half_space_pressure("silica-model", "silicon-model", 1e-6)
    assert p["total"] < 0
    assert p["delta_part"] == 0


def test_run_pressure_table():
    rows = ote.run_table("pressure", CONFIG)
    assert len(rows) == 1
    assert rows[0]["total"] < 0
    assert rows[0]["delta_part"] == 0
    assert rows[0]["M"] == 1


def test_echo_round_trip():
    echo = ote.echo_config(CONFIG)
    assert ote.echo_config(echo) == echo


def test_errors():
    with pytest.raises(ValueError, match="distance"):
        ote.echo_config(CONFIG.replace('"distance": 4e-6', '"distance": -1'))
    with pytest.raises(ValueError):
        ote.run("nonsense", CONFIG)
    with pytest.raises(ote.ValidationError):
        ote.permittivity("unobtainium", 1e14)
    assert issubclass(ote.ValidationError, ValueError)
