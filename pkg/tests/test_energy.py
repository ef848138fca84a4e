import math
import warnings

import numpy as np
import pytest

from qcb.energy import (
    EnergySpec,
    OscillatorSpec,
    adequate_cutoff,
    f_h,
    f_osc,
    f_osc_hat,
    gibbs_probs,
    gibbs_state,
    shifted_f_hat,
    truncated_oscillator,
    water_filling,
)
from qcb.errors import OutOfRange, TruncationWarning
from qcb.qinfo import g

from oracles import f_osc_grid

TWO_LEVEL = EnergySpec([0.0, 1.0])


def test_spec_validation():
    with pytest.raises(ValueError):
        EnergySpec([1.0, 0.0])
    with pytest.raises(ValueError):
        EnergySpec([])
    with pytest.raises(ValueError):
        OscillatorSpec([1.0, -1.0])
    osc = OscillatorSpec([1.0, 4.0])
    assert osc.modes == 2 and osc.ground == 2.5 and osc.e_star == pytest.approx(2.0, abs=1e-12)


@pytest.mark.filterwarnings("ignore::qcb.errors.TruncationWarning")
def test_gibbs_two_level_symmetric_point():
    state, lam = gibbs_state(TWO_LEVEL, 0.5)
    assert lam == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(state.matrix, np.eye(2) / 2)


def test_gibbs_ground_limit():
    probs, lam = gibbs_probs(EnergySpec([0.0, 0.0, 1.0, 2.0]), 0.0)
    assert math.isinf(lam) and np.allclose(probs, [0.5, 0.5, 0, 0])
    probs, _ = gibbs_probs(TWO_LEVEL, 1e-6, warn=False)
    assert probs[0] > 1 - 2e-6


def test_gibbs_thermal_law():
    spec = truncated_oscillator(OscillatorSpec([1.0]), 120)
    probs, _ = gibbs_probs(spec, 1.5)
    n = np.arange(120)
    assert np.allclose(probs, 1.0 / 2.0 ** (n + 1), atol=1e-12)


def test_gibbs_energy_constraint(rng):
    specs = [TWO_LEVEL, EnergySpec(np.sort(rng.uniform(-3, 7, 30))), truncated_oscillator(OscillatorSpec([0.7, 1.3]), 40)]
    for spec in specs:
        lv = spec.levels
        for e in np.linspace(lv[0] + 1e-3, 0.5 * (lv[0] + lv[-1]), 12):
            probs, _ = gibbs_probs(spec, e, warn=False)
            assert abs(probs @ lv - e) <= 1e-8 * max(1.0, abs(e))


def test_gibbs_errors_and_warning():
    with pytest.raises(OutOfRange):
        gibbs_probs(TWO_LEVEL, -0.1)
    with pytest.raises(OutOfRange):
        gibbs_probs(TWO_LEVEL, 1.0)
    spec = truncated_oscillator(OscillatorSpec([1.0]), 5)
    with pytest.warns(TruncationWarning):
        gibbs_probs(spec, 2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gibbs_probs(spec, 2.0, warn=False)


@pytest.mark.filterwarnings("ignore::qcb.errors.TruncationWarning")
def test_f_h_examples():
    assert f_h(TWO_LEVEL, 0.5) == pytest.approx(1.0)
    assert f_h(TWO_LEVEL, 0.0) == 0.0
    spec = truncated_oscillator(OscillatorSpec([1.0]), 120)
    assert f_h(spec, 1.5) == pytest.approx(2.0, abs=1e-10)


def test_f_h_monotone_concave():
    spec = truncated_oscillator(OscillatorSpec([1.0]), 200)
    grid = np.linspace(0.6, 10.0, 50)
    vals = np.array([f_h(spec, e) for e in grid])
    assert np.all(np.diff(vals) >= -1e-10)
    assert np.all(np.diff(vals, 2) <= 1e-10)


@pytest.mark.filterwarnings("ignore::qcb.errors.TruncationWarning")
def test_shifted_f_hat():
    assert shifted_f_hat(TWO_LEVEL, 0.0) == 0.0
    spec = truncated_oscillator(OscillatorSpec([1.0]), 200)
    grid = np.linspace(0.0, 8.0, 50)
    vals = np.array([shifted_f_hat(spec, e) for e in grid])
    assert np.all(vals >= 0) and np.all(np.diff(vals) > 0)
    assert np.all(np.diff(vals, 2) < 1e-10)
    with pytest.raises(OutOfRange):
        shifted_f_hat(spec, -1.0)


def test_f_osc_single_mode():
    osc = OscillatorSpec([1.3])
    for e in (0.65, 1.0, 5.0, 40.0):
        assert f_osc(osc, e) == pytest.approx(g(e / 1.3 - 0.5), abs=1e-12)
    assert f_osc(OscillatorSpec([1.0]), 1.5) == pytest.approx(2.0, abs=1e-10)
    with pytest.raises(OutOfRange):
        f_osc(osc, 0.5)


def test_water_filling_equal_split():
    energies, _ = water_filling(OscillatorSpec([1.0, 1.0, 1.0]), 9.0)
    assert np.allclose(energies, 3.0)


@pytest.mark.parametrize("omegas, e", [([1.0, 2.0], 4.0), ([0.5, 3.0], 2.0), ([1.0, 1.0], 20.0)])
def test_f_osc_matches_grid_oracle(omegas, e):
    assert f_osc(OscillatorSpec(omegas), e) == pytest.approx(f_osc_grid(omegas, e), abs=1e-5)


def test_f_osc_kkt():
    osc = OscillatorSpec([0.5, 1.0, 2.5])
    energies, lam = water_filling(osc, 12.0)
    assert energies.sum() == pytest.approx(12.0, rel=1e-10)
    occ = energies / np.array(osc.omegas) - 0.5
    # marginal entropy gain per unit energy (nats) is the multiplier for every mode
    assert np.allclose(np.log1p(1 / occ) / np.array(osc.omegas), lam, rtol=1e-8)


def test_f_osc_hat_examples():
    assert f_osc_hat(OscillatorSpec([1.0]), 0.5, base="e") == pytest.approx(1.0)
    assert f_osc_hat(OscillatorSpec([1.0]), 0.5) == pytest.approx(1.0 / math.log(2))
    osc = OscillatorSpec([1.0, 1.0])
    assert f_osc_hat(osc, 1000.0) - f_osc(osc, 1000.0) < 0.02
    with pytest.raises(OutOfRange):
        f_osc_hat(osc, -1.0)


@pytest.mark.parametrize("omegas", [[1.0], [1.0, 2.0], [0.3, 0.3]])
def test_f_osc_hat_dominates_and_gap_shrinks(omegas):
    osc = OscillatorSpec(omegas)
    grid = osc.ground * np.geomspace(1.0, 100.0, 40)
    assert all(f_osc_hat(osc, e) - f_osc(osc, e) >= -1e-8 for e in grid)
    gaps = [f_osc_hat(osc, m * osc.ground) - f_osc(osc, m * osc.ground) for m in (10, 100, 1000)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_truncated_oscillator_levels():
    assert np.allclose(truncated_oscillator(OscillatorSpec([1.0]), 3).levels, [0.5, 1.5, 2.5])
    assert np.allclose(truncated_oscillator(OscillatorSpec([1.0, 1.0]), 2).levels, [1, 2, 2, 3])
    with pytest.raises(ValueError):
        truncated_oscillator(OscillatorSpec([1.0]), 1)


def test_adequate_cutoff():
    osc = OscillatorSpec([1.0])
    for e in (5.0, 15.0):
        n = adequate_cutoff(osc, e)
        probs, _ = gibbs_probs(truncated_oscillator(osc, n), e, warn=False)
        assert probs[-1] < 1e-9
        smaller, _ = gibbs_probs(truncated_oscillator(osc, n - 1), e, warn=False)
        assert smaller[-1] >= 1e-9
