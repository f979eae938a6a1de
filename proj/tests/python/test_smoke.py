import math

import pytest

import hypmac


def test_constants_of_the_quartic():
    c = hypmac.constants({"model": "hyp-mac", "tau": 0.1, "damping": {"relaxation": 0.1}})
    assert c["c_F"] == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-9)
    assert c["A_plus"] == pytest.approx(math.sqrt(2), abs=1e-9)
    assert c["K_minus"] == pytest.approx(4.0, abs=1e-7)
    assert c["gamma"] == pytest.approx(0.96, abs=1e-9)


def test_config_defaults_and_errors():
    c = hypmac.normalize_config({"model": "mac", "epsilon": 0.06, "layers": [0.35, 0.6], "t_end": 50})
    assert c["n"] == 512
    assert c["tol"] == 1e-9
    with pytest.raises(hypmac.ConfigError, match="tau"):
        hypmac.normalize_config({"model": "hyp-mac", "tau": 0})
    with pytest.raises(hypmac.ConfigError, match="bogus"):
        hypmac.normalize_config({"model": "mac", "bogus": 1})


def test_profile_zeros():
    p = hypmac.profile({"model": "mac", "epsilon": 0.02, "layers": [0.25, 0.5, 0.75], "n": 1024})
    assert len(p["u"]) == 1025
    for z, h in zip(p["tracked_layers"], [0.25, 0.5, 0.75]):
        assert abs(z - h) <= 1 / 1024
    assert p["renormalized_energy"] == pytest.approx(3 * 2 * math.sqrt(2) / 3, abs=1e-6)


def test_simulate_conserves_mass():
    r = hypmac.simulate(
        {"model": "hyp-mac", "epsilon": 0.06, "tau": 0.1, "layers": [0.35, 0.6], "gap_factor": 3,
         "n": 256, "t_end": 2, "cadence": 0.5}
    )
    masses = [row["mass"] for row in r["rows"]]
    assert max(masses) - min(masses) < 1e-10
    assert r["max_energy_increase"] <= 1e-10


def test_layers_rigid_mac():
    r = hypmac.layers({"model": "mac", "epsilon": 0.06, "layers": [0.2, 0.7], "t_end": 20})
    for row in r["rows"]:
        assert row["hdot"][0] == row["hdot"][1]


def test_domain_error_is_raised():
    with pytest.raises(hypmac.Error):
        hypmac.sweep_metastability({"model": "ac", "layers": [0.35, 0.6], "epsilons": [0.05, 0.06], "t_end": 10})


def test_tau_sweep_halves():
    r = hypmac.sweep_tau(
        {"model": "mac", "epsilon": 0.05, "layers": [0.15, 0.55], "t_end": 20, "tol": 1e-12,
         "taus": [0.2, 0.1, 0.05]},
        threads=2,
    )
    assert r["halving"]
    assert r["rows"][0]["ratio"] is None
