import math

import numpy as np
import pytest

from krausinterp import rng as krng
from krausinterp.errors import DomainError
from krausinterp.interpolation import InterpolationProblem, analytic_two_point
from krausinterp.optimize import (
    PENALTY,
    OptimizerConfig,
    base_stencil,
    l1_objective,
    l1_objective_grad,
    local_minimize,
    multistart_optimize,
    random_search,
    sqr,
)

UNIT = InterpolationProblem(np.array([1.0, 0.0]))


def test_objective_at_quarter_turn():
    assert l1_objective([math.pi / 2, -math.pi / 2], UNIT) == pytest.approx(1.0)


def test_objective_penalizes_coincident_points():
    assert l1_objective([0.4, 0.4], UNIT) == PENALTY


def test_gradient_matches_finite_differences(rng):
    p = InterpolationProblem(np.array([1.0, 0.3, -0.6, -0.9]))
    for _ in range(5):
        mu = rng.uniform(-3, 3, 4)
        f, g = l1_objective_grad(mu, p)
        assert f == pytest.approx(l1_objective(mu, p))
        h = 1e-6
        fd = [(l1_objective(mu + h * e, p) - l1_objective(mu - h * e, p)) / (2 * h) for e in np.eye(4)]
        np.testing.assert_allclose(g, fd, rtol=1e-4, atol=1e-6)


@pytest.mark.parametrize("method", ["simplex", "sqp"])
def test_local_converges_from_symmetric_start(method):
    cfg = OptimizerConfig(methods=(method,))
    res = local_minimize(UNIT, np.array([1.0, -1.0]), cfg, method=method)
    assert res.l1 == pytest.approx(1.0, abs=1e-6)
    best = [f for _, f in res.trace]
    assert all(b <= a for a, b in zip(best, best[1:]))


def test_local_minimize_is_deterministic():
    cfg = OptimizerConfig()
    a = local_minimize(UNIT, np.array([0.7, -0.2]), cfg, method="simplex")
    b = local_minimize(UNIT, np.array([0.7, -0.2]), cfg, method="simplex")
    np.testing.assert_array_equal(a.mu_opt, b.mu_opt)
    assert a.trace == b.trace


def test_random_search_never_beats_bound(rng):
    res = random_search(UNIT, 200, rng)
    assert res.l1 >= 1.0 - 1e-9


def test_multistart_hits_closed_form_on_pairs(rng):
    for k in range(100):
        lam = np.sort(rng.uniform(-1, 1, 2))[::-1] * rng.uniform(0.1, 10)
        p = InterpolationProblem(lam)
        res = multistart_optimize(p, OptimizerConfig(seed=k))
        assert p.scale - 1e-9 <= res.l1 <= p.scale + 1e-6
        assert res.l1 == pytest.approx(analytic_two_point(*lam).l1, abs=1e-6)


def test_pair_landscape_is_not_convex():
    # two separated minimizers of the same pair; their midpoint is worse
    lam = np.array([1.0, 0.3])
    p = InterpolationProblem(lam)
    mu = analytic_two_point(*lam).mus
    other = -mu
    assert l1_objective(other, p) == pytest.approx(l1_objective(mu, p), abs=1e-12)
    mid = (mu + other) / 2 + np.array([0.5, -0.2])
    assert l1_objective(mid, p) > l1_objective(mu, p) + 1e-3


def test_multistart_beats_random_at_equal_budget():
    gen = krng.stream(3, "spectrum")
    p = InterpolationProblem(np.sort(gen.uniform(0, 1, 8))[::-1])
    res = multistart_optimize(p, OptimizerConfig(seed=3))
    rand = random_search(p, res.n_evals, krng.stream(3, "random"))
    assert res.l1 <= rand.l1
    assert res.sqr >= 1 - 1e-9


def test_multistart_single_eigenvalue():
    res = multistart_optimize(InterpolationProblem(np.array([-2.0])))
    assert res.l1 == pytest.approx(2.0)
    assert res.sqr == pytest.approx(1.0)


def test_multistart_reproducible():
    p = InterpolationProblem(np.array([1.0, 0.5, -0.25, -0.8]))
    a = multistart_optimize(p, OptimizerConfig(seed=9))
    b = multistart_optimize(p, OptimizerConfig(seed=9))
    np.testing.assert_array_equal(a.mu_opt, b.mu_opt)
    assert a.iterations == b.iterations and a.classical_cost == a.iterations * 64


def test_stencil_unit_pair():
    np.testing.assert_allclose(base_stencil(UNIT, 1.0), [-math.pi / 2, math.pi / 2])


def test_sqr_values():
    assert sqr(3.0, [1.0, -1.5]) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        sqr(1.0, [0.0, 0.0])


@pytest.mark.parametrize("kw", [dict(methods=("newton",)), dict(max_iters=0), dict(scale_factors=(-1.0,)),
                                dict(shallow_iters=50, max_iters=10)])
def test_config_validation(kw):
    with pytest.raises(DomainError):
        OptimizerConfig(**kw)
