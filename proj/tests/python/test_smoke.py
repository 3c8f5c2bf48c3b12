import math

import numpy as np
import pytest

import cdad


def test_train_gate_tables():
    m = cdad.Model.train_gate()
    assert m.dim == 2
    assert m.validate() == []
    assert m.observability_horizon() == 1
    assert m.deltas() == {1: 8, 2: 8, 3: 0}
    regions = m.regions()
    assert regions["intermediate"] == [[(45.0, 46.0), (0.0, 0.4)], [(75.0, 76.0), (0.0, 0.4)]]
    b = m.bounds()
    assert b[1]["threshold"] == pytest.approx(1.5)
    assert math.isinf(b[3]["d_star"])


def test_model_dict_round_trip_and_errors():
    m = cdad.Model.train_gate()
    d = m.to_dict()
    assert cdad.Model.from_dict(d).to_dict() == d
    d["states"][0]["C"] = []
    with pytest.raises(cdad.ModelError):
        cdad.Model.from_dict(d)


def test_fdia():
    verdict, _ = cdad.Model.train_gate().classify_fdia(state=1, gamma=[0])
    assert verdict == "feasible"


def test_run_is_deterministic_and_shaped():
    sim = cdad.Simulator()
    s1, t1 = sim.run(seed=3, duration=20)
    s2, t2 = sim.run(seed=3, duration=20)
    assert s1 == s2
    assert t1["x"].shape == (200, 2)
    np.testing.assert_array_equal(t1["residual"], t2["residual"])
    assert not any(t1["alarm"])


def test_step_attack_and_sweep():
    sim = cdad.Simulator("train-gate")
    summary, _ = sim.run(seed=0, duration=20, attack="step:axis=0,magnitude=1,start=15")
    assert summary["residual_alarm"] is not None
    runs = sim.sweep(0, 3, workers=2)
    assert [r["seed"] for r in runs] == [0, 1, 2, 3]
    with pytest.raises(cdad.ModelError):
        sim.run(attack="sine:axis=0")
