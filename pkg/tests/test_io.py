import json
import math

import numpy as np
import pytest

from qcb import io
from qcb.channels import depolarizing, erasure
from qcb.energy import EnergySpec, OscillatorSpec
from qcb.ensembles import Ensemble
from qcb.errors import FormatError, InvalidState
from qcb.qmat import DensityMatrix, random_state


def test_round_float_and_clean():
    assert io.round_float(1 / 3) == 0.333333333333
    assert io.round_float(float("inf")) is None and io.round_float(float("nan")) is None
    out = io.clean({"a": np.float64(2.5), "b": [np.int64(3), float("-inf")], "c": np.bool_(True), "z": 1 + 2j})
    assert out == {"a": 2.5, "b": [3, None], "c": True, "z": [1.0, 2.0]}
    assert json.loads(io.dumps({"x": float("nan")})) == {"x": None}


def test_matrix_round_trip(rng):
    m = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    back = io.matrix_from_json(json.loads(io.dumps(io.matrix_to_json(m))))
    assert np.allclose(back, m, atol=1e-11)
    # real entries may be plain numbers
    assert np.allclose(io.matrix_from_json({"rows": 1, "cols": 2, "entries": [1, 0.5]}), [[1, 0.5]])


def test_matrix_rejects_malformed():
    with pytest.raises(FormatError):
        io.matrix_from_json({"rows": 2, "cols": 2, "entries": [[1, 0]]})
    with pytest.raises(FormatError):
        io.matrix_from_json({"rows": 1, "cols": 1, "entries": ["x"]})
    with pytest.raises(FormatError):
        io.matrix_from_json({"entries": []})


def test_state_round_trip(rng):
    rho = random_state(6, rng, dims=(2, 3))
    back = io.state_from_json(json.loads(io.dumps(io.state_to_json(rho))))
    assert back.dims == (2, 3) and np.allclose(back.matrix, rho.matrix, atol=1e-11)


def test_state_rejects_invalid():
    non_hermitian = io.matrix_to_json(np.array([[0.5, 0.3], [0.0, 0.5]]))
    with pytest.raises(InvalidState):
        io.state_from_json(non_hermitian)
    with pytest.raises(InvalidState):
        io.state_from_json(io.matrix_to_json(np.eye(2)))


def test_ensemble_round_trip(rng):
    mu = Ensemble([0.25, 0.75], [random_state(2, rng), random_state(2, rng)])
    back = io.ensemble_from_json(json.loads(io.dumps(io.ensemble_to_json(mu))))
    assert np.allclose(back.probs, mu.probs)
    assert all(np.allclose(a.matrix, b.matrix, atol=1e-11) for a, b in zip(back.states, mu.states))
    with pytest.raises(FormatError):
        io.ensemble_from_json({"items": [{"state": io.state_to_json(random_state(2, rng))}]})


def test_channel_round_trip_and_shorthand(rng):
    ch = erasure(2, 0.3)
    back = io.channel_from_json(json.loads(io.dumps(io.channel_to_json(ch))))
    rho = random_state(2, rng)
    assert back.d_out == 3 and np.allclose(back(rho).matrix, ch(rho).matrix, atol=1e-10)
    short = io.channel_from_json({"family": "depolarizing", "d": 2, "p": 0.4})
    assert np.allclose(short(rho).matrix, depolarizing(2, 0.4)(rho).matrix)
    with pytest.raises(FormatError):
        io.channel_from_json({"family": "depolarizing"})
    with pytest.raises(FormatError):
        io.channel_from_json({"kraus": [io.matrix_to_json(np.eye(2))], "d_in": 3})
    with pytest.raises(InvalidState):
        io.channel_from_json({"kraus": [io.matrix_to_json(0.5 * np.eye(2))]})


def test_energy_round_trip():
    spec = EnergySpec([0.0, 1.0, 2.5], "three")
    back = io.energy_from_json(json.loads(io.dumps(io.energy_to_json(spec))))
    assert np.allclose(back.levels, spec.levels) and back.label == "three"
    osc = io.energy_from_json(io.energy_to_json(OscillatorSpec([1.0, 2.0])))
    assert isinstance(osc, OscillatorSpec) and list(osc.omegas) == [1.0, 2.0]
    with pytest.raises(FormatError):
        io.energy_from_json({})


def test_load(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(io.dumps(io.state_to_json(DensityMatrix.maximally_mixed(2))))
    assert io.load(good)["rows"] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(FormatError):
        io.load(bad)
    with pytest.raises(OSError):
        io.load(tmp_path / "missing.json")
    assert math.isclose(io.round_float(123456789.123456789), 123456789.123)
