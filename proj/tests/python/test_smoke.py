import json
import math

import numpy as np
import pytest

import threshold_lab as tl

SYSTEM = {
    "masses": {"m1": 1.0, "m2": 1.0, "m3": 1.0},
    "potentials": {
        "v12": {"family": "gaussian", "depth": "critical", "range": 1.0},
        "v13": {"family": "gaussian", "depth": "critical", "range": 1.0},
        "v23": {"family": "gaussian", "depth": "critical", "range": 1.0},
    },
    "lambda": 0.9,
}


def test_exponential_critical_coupling():
    from scipy.special import jn_zeros

    j01 = jn_zeros(0, 1)[0]
    assert tl.critical_coupling(tl.PotentialFamily.EXPONENTIAL) == pytest.approx(j01**2 / 4, rel=1e-7)


def test_twobody_sequence_decreases():
    seq = tl.twobody_sequence(tl.PotentialFamily.EXPONENTIAL)
    d = seq["theorem1_distance"]
    assert len(d) == 7
    assert np.all(np.diff(d) < 0)
    assert np.allclose(seq["k"], np.sqrt(-seq["E"]))


def test_universal_functions():
    lim = 1 / (8 * math.pi**3)
    assert tl.universal_limit(math.pi / 4) == pytest.approx(lim)
    e3 = abs(tl.d_theta_n(math.pi / 4, 1e-3) - lim)
    e6 = abs(tl.d_theta_n(math.pi / 4, 1e-6) - lim)
    assert 1.6 <= e3 / e6 <= 2.4
    assert tl.radial_integral(0.5, 1e-4) == pytest.approx(tl.t_integral(0.5, 1e-4), rel=1e-10)
    assert tl.pde_check(1)["boundary_ok"]
    assert not tl.pde_check(2)["boundary_ok"]
    with pytest.raises(tl.ConfigError):
        tl.theta_norm(2.0)


def test_system_round_trip_and_admissibility():
    spec = tl.SystemSpec.from_json(json.dumps(SYSTEM))
    again = tl.SystemSpec.from_json(spec.to_json())
    assert again.v12.depth == pytest.approx(spec.v12.depth)
    report = json.loads(tl.admissibility(spec))
    assert report["ok"]
    with pytest.raises(ValueError):
        tl.SystemSpec.from_json("{not json")


def test_oscillator_ground_state():
    psi = tl.oscillator_ground_state(n=48, nu=8)
    assert psi.energy == pytest.approx(6.0, rel=2e-2)
    assert psi.phi.shape == (8, 48, 48)
    assert psi.norm == pytest.approx(1.0)


def test_small_threshold_sequence():
    spec = tl.SystemSpec.from_json(json.dumps(SYSTEM))
    entries, complete, message = tl.threshold_sequence(spec, [-0.1, -0.025], n1=32, n2=32, nu=8)
    assert complete, message
    assert [e["E"] for e in entries] == pytest.approx([-0.1, -0.025], rel=0.05)
    assert entries[1]["lambda"] < entries[0]["lambda"]
    dist = entries[0]["state"].angular_distribution()
    assert dist["D"].shape == (8, 48)
    assert dist["normalization"] == pytest.approx(1.0, abs=5e-2)
    assert entries[1]["state"].spreading(5.0) < entries[0]["state"].spreading(5.0)


def test_run_suite(tmp_path):
    out = tl.run_suite("twobody", output_dir=str(tmp_path))
    assert out["exit_code"] == 0
    header = (tmp_path / "twobody_sequence.csv").read_text().splitlines()[0]
    assert header == "g,E,k,theorem1_distance"
    with pytest.raises(tl.ConfigError):
        tl.run_suite("nope")
