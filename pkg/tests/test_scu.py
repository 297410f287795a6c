import math

import numpy as np
import pytest

from krausinterp.channels import AdcParams, apply_channel_exact, make_adc
from krausinterp.decompose import decompose_channel
from krausinterp.errors import DimensionError, DomainError
from krausinterp.scu import (
    Observable,
    allocate_shots,
    build_term_table,
    estimate_observable,
    exact_expectation,
    pauli_z,
    projector,
    reconstruct_density_matrix,
    term_distributions,
    term_outcome_distribution,
)

from .conftest import RHO_ADC, X, Z, random_density

ADC_HALF = make_adc(AdcParams(1.0, math.log(2), 1.0))


def adc_table(channel=ADC_HALF, **kw):
    return build_term_table(decompose_channel(channel, **kw))


def ancilla_circuit_probabilities(entry, rho0, obs):
    """Joint (ancilla X, observable) outcome law from the full two-register state."""
    d = rho0.shape[0]
    plus = np.array([1, np.exp(1j * entry.phase)]) / math.sqrt(2)
    psi_a = np.outer(plus, plus.conj())
    state = np.kron(psi_a, rho0)
    p0 = np.kron(np.diag([1, 0]), np.eye(d))
    p1 = np.kron(np.diag([0, 1]), np.eye(d))
    cu = p0 @ np.kron(np.eye(2), entry.right) + p1 @ np.kron(np.eye(2), entry.left)
    state = cu @ state @ cu.conj().T
    out = []
    for a in (np.array([1, 1]) / math.sqrt(2), np.array([1, -1]) / math.sqrt(2)):
        for m in range(d):
            vec = np.kron(a, obs.eigenvectors[:, m])
            out.append(np.real(vec.conj() @ state @ vec))
    return np.array(out)


def test_table_for_quarter_turn_pair():
    u = [np.eye(2), Z]
    table = build_term_table([[(0.5j, u[0]), (-0.5j, u[1])]])
    assert len(table) == 3
    np.testing.assert_allclose(table.weights, [0.25, 0.5, 0.25])
    assert table.entries[1].phase == pytest.approx(math.pi)
    assert table.L == pytest.approx(1.0)


def test_table_l_is_sum_of_squared_l1():
    decs = decompose_channel(make_adc(AdcParams(1.0, 0.4, 0.7)))
    table = build_term_table(decs)
    assert table.L == pytest.approx(sum(d.l1**2 for d in decs), rel=1e-12)


def test_table_drops_zero_coefficients():
    table = build_term_table([[(1.0, np.eye(2)), (0.0, X)]])
    assert len(table) == 1


def test_table_rejects_empty_and_mixed():
    with pytest.raises(DomainError):
        build_term_table([[]])
    with pytest.raises(DimensionError):
        build_term_table([[(1.0, np.eye(2)), (1.0, np.eye(3))]])


def test_allocation_tracks_probabilities():
    table = adc_table()
    s = 100_000
    plan = allocate_shots(table, s, seed=1)
    assert plan.counts.sum() == s
    p = table.probabilities
    sd = np.sqrt(s * p * (1 - p))
    assert np.all(np.abs(plan.counts - s * p) <= 5 * sd + 1e-9)


def test_allocation_is_deterministic():
    table = adc_table()
    a = allocate_shots(table, 1000, 5).counts
    np.testing.assert_array_equal(a, allocate_shots(table, 1000, 5).counts)
    assert not np.array_equal(a, allocate_shots(table, 1000, 6).counts)


def test_allocation_rejects_zero_shots():
    with pytest.raises(DomainError):
        allocate_shots(adc_table(), 0, 1)


def test_cross_entry_matches_ancilla_circuit(rng):
    decs = decompose_channel(make_adc(AdcParams(1.0, 0.9, 0.4)))
    table = build_term_table(decs)
    rho0 = random_density(rng, 2)
    obs = Observable.from_matrix(np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, -0.7]]))
    crosses = [e for e in table.entries if not e.is_self]
    assert crosses
    for e in crosses:
        dist = term_outcome_distribution(e, rho0, obs)
        np.testing.assert_allclose(dist.probabilities, ancilla_circuit_probabilities(e, rho0, obs), atol=1e-12)


def test_self_entry_distribution():
    table = build_term_table([[(1.0, X)]])
    dist = term_outcome_distribution(table.entries[0], RHO_ADC, pauli_z())
    np.testing.assert_allclose(dist.values, [1, -1])
    np.testing.assert_allclose(dist.probabilities, [0.75, 0.25])


def test_infinite_shot_value_matches_channel(rng):
    for _ in range(5):
        ch = make_adc(AdcParams(1.0, rng.uniform(0, 3), rng.uniform(0, 1)))
        table = adc_table(ch)
        rho0 = random_density(rng, 2)
        want = np.real(np.trace(Z @ apply_channel_exact(ch, rho0)))
        assert exact_expectation(table, rho0, pauli_z()) == pytest.approx(want, abs=1e-12)


def test_reconstructed_state_matches_channel(rng):
    ch = make_adc(AdcParams(1.0, 1.3, 0.35))
    rho0 = random_density(rng, 2)
    np.testing.assert_allclose(reconstruct_density_matrix(adc_table(ch), rho0),
                               apply_channel_exact(ch, rho0), atol=1e-12)


def test_approximate_state_has_small_trace_error():
    ch = make_adc(AdcParams(1.0, 0.5, 1.0))
    out = reconstruct_density_matrix(adc_table(ch, method="approximate", epsilon=0.1), RHO_ADC)
    err = abs(np.trace(out) - 1)
    assert 0 < err < 1e-2


def test_estimate_is_deterministic():
    table = adc_table()
    plan = allocate_shots(table, 2048, 11)
    a = estimate_observable(table, RHO_ADC, pauli_z(), plan)
    b = estimate_observable(table, RHO_ADC, pauli_z(), plan)
    assert a == b


def test_estimate_reports_sampled_circuits():
    table = adc_table()
    for s in (1, 3, 5000):
        res = estimate_observable(table, RHO_ADC, pauli_z(), allocate_shots(table, s, 2))
        assert 1 <= res.circuits_sampled <= min(len(table), s)
        assert res.s_tot == s


def test_estimator_unbiased_and_variance_law():
    table = adc_table()
    obs = pauli_z()
    dists = term_distributions(table, RHO_ADC, obs)
    truth = exact_expectation(table, RHO_ADC, obs)
    s = 512
    est = np.array([
        estimate_observable(table, RHO_ADC, obs, allocate_shots(table, s, seed), dists).mean
        for seed in range(2000)
    ])
    model = (table.L**2 - truth**2) / s
    assert abs(est.mean() - truth) <= 5 * math.sqrt(model / est.size)
    assert est.var(ddof=1) == pytest.approx(model, rel=0.1)


def test_non_involutory_variance_uses_second_moment():
    table = adc_table()
    obs = projector(1, 2)
    assert not obs.involutory
    dists = term_distributions(table, RHO_ADC, obs)
    s = 256
    runs = [estimate_observable(table, RHO_ADC, obs, allocate_shots(table, s, seed), dists) for seed in range(1500)]
    est = np.array([r.mean for r in runs])
    assert runs[0].model_extended
    assert est.var(ddof=1) == pytest.approx(runs[0].predicted_variance, rel=0.12)
    assert runs[0].involutory_variance > runs[0].predicted_variance


def test_estimate_rejects_mismatched_plan():
    table = adc_table()
    other = build_term_table([[(1.0, np.eye(2))]])
    with pytest.raises(DimensionError):
        estimate_observable(table, RHO_ADC, pauli_z(), allocate_shots(other, 10, 0))


def test_observable_must_be_hermitian():
    with pytest.raises(DomainError):
        Observable.from_matrix(np.array([[0, 1], [0, 0]]))
