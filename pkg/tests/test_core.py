import math

import pytest

from jjdirac.core import (
    CONSTANTS, ConfigError, DrivePulse, MomentumSpec, config_hash, config_to_dict, default_config,
    hierarchy_warnings, inductive_energy_ghz, josephson_inductance_ph, load_config,
    serialize_config, validate_hierarchy,
)


def test_flux_quantum_value():
    assert CONSTANTS.flux_quantum == pytest.approx(2.067833848e-15, rel=1e-9)


def test_josephson_inductance_inverse_of_energy():
    # E_J = (Phi0/2pi)^2 / L_J, and the loop-energy helper uses the same form
    for ej in (300.0, 8000.0):
        assert inductive_energy_ghz(josephson_inductance_ph(ej)) == pytest.approx(ej, rel=1e-12)


def test_josephson_inductance_rejects_nonpositive():
    with pytest.raises(ValueError):
        josephson_inductance_ph(0.0)


@pytest.mark.parametrize("dim,n_flux,phase,shared", [
    (1, 1, "x", "X"), (2, 2, "xy", "XYO"), (3, 2, "xyz", "XYZO"),
])
def test_inventory(dim, n_flux, phase, shared):
    cfg = default_config(dim)
    assert len(cfg.flux) == n_flux
    assert "".join(cfg.phase) == phase
    assert "".join(cfg.shared) == shared


def test_defaults_and_flags(cfg3):
    q1 = cfg3.flux_qubit(1)
    assert q1.ej_ghz == 300.0 and q1.ec_ghz == pytest.approx(10.0)
    assert q1.alpha == 0.6 and q1.beta == 6.0
    assert any("E_Jp/E_Cp" in f for f in cfg3.flags)
    p = cfg3.phase["x"]
    assert p.ejp_ghz / p.ecp_ghz == pytest.approx(1e6)


def test_roundtrip_and_hash(cfg3):
    again = load_config(serialize_config(cfg3))
    assert config_to_dict(again) == config_to_dict(cfg3)
    assert config_hash(again) == config_hash(cfg3)
    assert len(config_hash(cfg3)) == 64


def test_hash_changes_with_parameters(cfg1):
    doc = config_to_dict(cfg1)
    doc["flux1"]["f1"] = 0.332
    assert config_hash(load_config(doc)) != config_hash(cfg1)


@pytest.mark.parametrize("doc,msg", [
    ({"dimension": 4}, "dimension"),
    ({"bogus": {}}, "unknown section"),
    ({"dimension": 1, "flux2": {}}, "flux2"),
    ({"flux1": {"alpha": 1.5}}, "alpha"),
    ({"flux1": {"f3": 0.5}}, "f3"),
    ({"shared_X": {"ej_ghz": 1000.0}}, "hierarchy"),
    ({"wavepacket": {"width_mhz": -1}}, "width"),
])
def test_invalid_configs(doc, msg):
    with pytest.raises(ConfigError, match=msg):
        load_config(doc)


def test_yaml_parse_error():
    with pytest.raises(ConfigError, match="parse error"):
        load_config("dimension: [1,\n")


def test_drive_pulse_checks():
    assert DrivePulse(0.01, 5.0, 0.0, 3).name == "d13"
    with pytest.raises(ConfigError):
        DrivePulse(0.2, 5.0, 0.0, 1)
    with pytest.raises(ConfigError):
        DrivePulse(0.01, 5.0, 0.0, 4)


def test_momentum_spec_defaults(cfg3):
    wp = cfg3.wavepacket
    assert wp.kind == "gaussian" and wp.samples == 41
    assert wp.width == pytest.approx(math.sqrt(3) * 0.1 / 5)
    with pytest.raises(ConfigError):
        MomentumSpec(kind="lorentzian")


def test_hierarchy_warnings():
    assert hierarchy_warnings({"O": 900, "X": 160, "Y": 164, "q": 30}) == []
    w = hierarchy_warnings({"O": 300, "X": 160, "Y": 160.5, "q": 60})
    assert len(w) == 4  # O/X, O/Y, X~Y, bus/qubit


def test_default_hierarchy_clean(cfg3):
    assert validate_hierarchy(cfg3, {"2X0": 21.5, "2Z0": 31.0}) == []
