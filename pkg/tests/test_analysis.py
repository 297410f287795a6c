import math

import numpy as np
import pytest

from krausinterp.analysis import (
    RESOURCE_METHODS,
    ResourceModel,
    adc_time_grid,
    loglog_slope,
    precision_exponent,
    predicted_variance,
    required_shots,
    run_mse_sweep,
    run_sqr_sweep,
    shot_cost,
    simulate_adc,
)
from krausinterp.channels import AdcParams, make_adc
from krausinterp.decompose import decompose_channel
from krausinterp.errors import DomainError
from krausinterp.scu import allocate_shots, build_term_table, estimate_observable, pauli_z

from .conftest import RHO_ADC


def test_model_values():
    assert predicted_variance(ResourceModel("exact-scu", 1, L=1.6)) == pytest.approx(2.56)
    assert predicted_variance(ResourceModel("exact-lcu", 100, L=1e-2)) == pytest.approx(1e-4)
    assert predicted_variance(ResourceModel("approx-lcu", 400, K=1, epsilon=0.1)) == pytest.approx(1.0)
    assert predicted_variance(ResourceModel("approx-scu", 160_000, K=1, epsilon=0.1)) == pytest.approx(1.0)


def test_required_shots_examples():
    assert required_shots("exact-scu", 1e-2, L=1.0) == 10_000
    assert required_shots("approx-lcu", 0.1, K=1) == 4000
    assert ResourceModel("exact-lcu", L=2.0).shot_budget(0.1) == 200
    assert required_shots("approx-scu", 1e-3, K=2) == 64_000_000_000_000
    assert required_shots("exact-scu", 0.3, L=1.0) == 12  # 11.1 rounds up


@pytest.mark.parametrize("method,expected", [("approx-scu", -4), ("approx-lcu", -3),
                                             ("exact-scu", -2), ("exact-lcu", -2)])
def test_exponents(method, expected):
    assert precision_exponent(method) == expected
    eps = np.logspace(-4, -1, 7)
    costs = [shot_cost(method, e, L=1.7, K=3) for e in eps]
    assert loglog_slope(eps, costs) == pytest.approx(expected, abs=1e-9)


def test_model_validation():
    with pytest.raises(DomainError):
        ResourceModel("exact-scu")
    with pytest.raises(DomainError):
        ResourceModel("approx-lcu", K=1, epsilon=0.0)
    with pytest.raises(DomainError):
        ResourceModel("magic", L=1)
    with pytest.raises(DomainError):
        shot_cost("exact-scu", 0.0, L=1.0)


def test_exact_scu_model_matches_engine_at_zero_mean():
    # at gamma t = ln 1.5 the excited population drops from 3/4 to 1/2, so <Z> = 0
    table = build_term_table(decompose_channel(make_adc(AdcParams(1.0, math.log(1.5), 1.0))))
    s = 4096
    est = estimate_observable(table, RHO_ADC, pauli_z(), allocate_shots(table, s, 0))
    model = predicted_variance(ResourceModel("exact-scu", s, L=table.L))
    assert est.involutory_variance == pytest.approx(model, rel=1e-12)
    assert est.predicted_variance == pytest.approx(model, rel=1e-12)


def test_time_grid():
    grid = adc_time_grid(2.0, 7)
    assert grid[0] == 0 and grid[-1] == pytest.approx(1.5) and grid.size == 7


def test_simulate_adc_rows():
    rows = simulate_adc(1.0, 1.0, [0.0, math.log(2)], 2048, seed=3)
    assert rows[0]["p1_exact"] == pytest.approx(0.75)
    assert rows[1]["p1_exact"] == pytest.approx(0.375)
    assert rows[1]["L"] == pytest.approx(1.5)  # 1 + (1/sqrt 2)^2
    for r in rows:
        assert r["p0_est"] + r["p1_est"] == pytest.approx(1.0)
        assert abs(r["p1_est"] - r["p1_exact"]) <= 5 * r["predicted_sigma"]


def test_mse_sweep_shape():
    ch = make_adc(AdcParams(1.0, 0.5, 1.0))
    rows = run_mse_sweep(ch, RHO_ADC, pauli_z(), epsilons=(0.2,), shot_grid=(100, 1000), trials=30, seed=1)
    assert [(r["method"], r["s_tot"]) for r in rows] == [
        ("exact", 100), ("exact", 1000), ("approximate", 100), ("approximate", 1000)]
    assert rows[0]["bias"] == pytest.approx(0.0, abs=1e-12)
    assert rows[2]["bias_sq"] > 0
    with pytest.raises(DomainError):
        run_mse_sweep(ch, RHO_ADC, pauli_z(), trials=5)


def test_sqr_sweep_small():
    rows = run_sqr_sweep([2, 3], 4, seed=2)
    keys = {(r["dim"], r["strategy"], r["R"]) for r in rows}
    assert (2, "multistart", "best") in keys and (3, "random", 1.0) in keys
    assert all(r["sqr_min"] >= 1 - 1e-9 for r in rows)
    with pytest.raises(DomainError):
        run_sqr_sweep([2], 1, strategies=("annealing",))


def test_sqr_sweep_deterministic():
    assert run_sqr_sweep([3], 3, seed=5) == run_sqr_sweep([3], 3, seed=5)


def test_resource_methods_listed():
    assert set(RESOURCE_METHODS) == {"exact-scu", "exact-lcu", "approx-scu", "approx-lcu"}
