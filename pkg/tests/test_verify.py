import math

import numpy as np
import pytest

from qcb.ensembles import Ensemble
from qcb.errors import DimCap, DomainError
from qcb.qinfo import holevo, mutual_information, shannon
from qcb.qmat import DensityMatrix, trace_distance
from qcb.verify import (
    SUITES,
    SuiteConfig,
    SuiteTable,
    energy_cmi_delta,
    energy_cmi_pair,
    energy_holevo_delta,
    entangled_pair,
    entangled_pair_delta,
    fmt,
    n_copy_chain,
    run_suite,
    suite_capacity_tightness,
    suite_cmi_tightness,
    suite_lemma1,
    suite_n_copy,
)

from oracles import entropy_bits


@pytest.mark.parametrize("d", [2, 3, 5])
def test_entangled_pair_structural_matches_dense(d):
    for eps in (0.01, 0.2):
        rho, sigma = entangled_pair(d, eps)
        assert trace_distance(rho, sigma) == pytest.approx(eps, abs=1e-12)
        dense = mutual_information(rho) - mutual_information(sigma)
        assert entangled_pair_delta(d, eps) == pytest.approx(dense, abs=1e-10)
        assert entangled_pair_delta(d, eps) == pytest.approx(entropy_bits(sigma.matrix), abs=1e-10)


def test_cmi_suite_routes_agree():
    table = suite_cmi_tightness(dims=(2, 4), eps_grid=(0.05, 0.1))
    assert set(table.column("method")) == {"dense"}
    for row in table.rows:
        assert row["delta_I"] == pytest.approx(row["delta_I_structural"], abs=1e-10)
        assert row["trace_distance"] == pytest.approx(row["eps"], abs=1e-12)
    big = suite_cmi_tightness(dims=(64,), eps_grid=(0.1,))
    assert big.rows[0]["method"] == "structural"


def test_energy_cmi_delta_matches_dense(rng):
    for _ in range(5):
        lam = rng.dirichlet(np.ones(4))
        for eps in (0.05, 0.3):
            rho, sigma = energy_cmi_pair(lam, eps)
            dense = mutual_information(rho) - mutual_information(sigma)
            assert energy_cmi_delta(lam, eps) == pytest.approx(dense, abs=1e-10)


def test_energy_holevo_delta_matches_dense(rng):
    lam = rng.dirichlet(np.ones(4))
    eps = 0.2
    basis = [np.diag(np.eye(4)[i]) for i in range(4)]
    gamma = np.diag(lam)
    mu = Ensemble(lam, [DensityMatrix.trusted(b) for b in basis])
    nu = Ensemble(lam, [DensityMatrix.trusted((1 - eps) * b + eps * gamma) for b in basis])
    assert energy_holevo_delta(lam, eps) == pytest.approx(holevo(mu) - holevo(nu), abs=1e-10)
    assert holevo(mu) == pytest.approx(shannon(lam))


def test_n_copy_chain():
    for p in (0.1, 0.5):
        chain = n_copy_chain(2, 1, p)
        assert chain[0] == pytest.approx(2 * (1 - p)) and chain[1] == pytest.approx(2.0)
        chain = n_copy_chain(2, 2, p)
        assert chain[0] == pytest.approx(4 * (1 - p)) and chain[-1] == pytest.approx(4.0)
        assert all(b >= a - 1e-10 for a, b in zip(chain, chain[1:]))
    with pytest.raises(DimCap):
        n_copy_chain(2, 3, 0.1)


def test_n_copy_suite_marks_inexact_rows():
    table = suite_n_copy(n_list=(1, 3), p_grid=(0.25,))
    exact, capped = table.rows
    assert exact["exact"] and exact["telescoping_residual"] <= 1e-12
    assert not capped["exact"] and capped["delta"] is None and capped["eps"] == 0.25


def test_capacity_suite_columns():
    table = suite_capacity_tightness(dims=(2, 4), p_grid=(0.1, 0.3))
    assert table.rows and all(math.isfinite(r["bound"]) for r in table.rows if r["bound"] is not None)


def test_lemma1_suite():
    table = suite_lemma1(x_grid=(1e3, 1e5))
    ratios = table.column("ratio")
    assert ratios[0] > ratios[1] > 0
    with pytest.raises(DomainError):
        suite_lemma1(x_grid=(-1.0,))


def test_empty_grid_rejected():
    with pytest.raises(DomainError):
        SuiteConfig("cmi-tightness", eps=())
    with pytest.raises(DomainError):
        SuiteConfig("n-copy", n=())


def test_suites_deterministic():
    cfg = SuiteConfig("holevo-tightness", dims=(2, 3), eps=(0.1,))
    assert run_suite(cfg).to_csv() == run_suite(cfg).to_csv()


def test_csv_and_json_round_trip():
    table = suite_cmi_tightness(dims=(2,), eps_grid=(0.05, 0.1))
    back = SuiteTable.from_json(table.to_json())
    assert back.name == table.name and back.columns == table.columns
    assert back.to_csv() == table.to_csv()
    lines = table.to_csv().splitlines()
    assert lines[0] == "# suite: cmi-tightness"
    header = next(line for line in lines if not line.startswith("#"))
    assert header.split(",") == table.columns
    assert len([line for line in lines if not line.startswith("#")]) == 1 + len(table.rows)


def test_fmt():
    assert fmt(None) == ""
    assert fmt(float("nan")) == "nan" and fmt(float("-inf")) == "-inf"
    assert fmt(True) == "true" and fmt(3) == "3"
    assert float(fmt(1 / 3)) == pytest.approx(1 / 3, rel=1e-11)


def test_every_suite_dispatches():
    small = {
        "cmi-tightness": dict(dims=(2,), eps=(0.1,)),
        "holevo-tightness": dict(dims=(2,), eps=(0.1,)),
        "energy-tightness": dict(energies=(10.0,), eps=(0.1,)),
        "capacity-tightness": dict(dims=(2,), p=(0.1,)),
        "n-copy": dict(n=(1,), p=(0.1,)),
        "lemma1": dict(x=(1e3,)),
    }
    for name in SUITES:
        table = run_suite(SuiteConfig(name, **small[name]))
        assert table.name == name and table.rows
