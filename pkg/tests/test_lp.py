import numpy as np
import pytest

from bernoulli_sets import SecondOrderPrediction, make_probability_vector, solve_bps, solve_fractional_knapsack
from bernoulli_sets.lp import _bounded_simplex

from conftest import random_prediction
from oracles import knapsack_by_hand, lp_vertex_enumeration


def pred(*rows):
    return SecondOrderPrediction.from_vectors(list(rows))


def test_single_vertex_example():
    sol = solve_bps(pred([0.5, 0.2, 0.3]), 0.9)
    np.testing.assert_allclose(sol.b, [1, 0.5, 1], atol=1e-12)
    assert sol.objective == pytest.approx(2.5, abs=1e-12)
    assert sol.active_constraints == (0,)


def test_point_mass():
    sol = solve_bps(pred([1, 0, 0]), 0.9)
    np.testing.assert_allclose(sol.b, [0.9, 0, 0], atol=1e-12)
    assert sol.objective == pytest.approx(0.9)


def test_two_vertex_example_against_grid():
    P = np.array([[0.6, 0.4, 0.0], [0.4, 0.6, 0.0]])
    sol = solve_bps(pred(*P), 0.9)
    np.testing.assert_allclose(sol.b, [0.9, 0.9, 0.0], atol=1e-12)
    assert sol.objective == pytest.approx(1.8, abs=1e-12)
    # the third label has zero mass, so a 2-D grid over the first two suffices
    g = np.linspace(0, 1, 1001)
    b0, b1 = np.meshgrid(g, g, indexing="ij")
    feasible = (0.6 * b0 + 0.4 * b1 >= 0.9 - 1e-12) & (0.4 * b0 + 0.6 * b1 >= 0.9 - 1e-12)
    assert (b0 + b1)[feasible].min() == pytest.approx(1.8, abs=1e-3)
    assert sol.active_constraints == (0, 1)


def test_zero_target_gives_empty_set(rng):
    for _ in range(10):
        sol = solve_bps(random_prediction(rng, 5, 3), 0.0)
        assert np.all(sol.b == 0) and sol.objective == 0


@pytest.mark.parametrize("t", [-0.1, 1.1])
def test_target_range(t):
    with pytest.raises(ValueError):
        solve_bps(pred([0.5, 0.5]), t)
    with pytest.raises(ValueError):
        solve_fractional_knapsack(make_probability_vector([0.5, 0.5]), t)


def test_knapsack_examples():
    np.testing.assert_allclose(solve_fractional_knapsack([0.5, 0.2, 0.3], 0.9).b, [1, 0.5, 1], atol=1e-12)
    sol = solve_fractional_knapsack([0.25] * 4, 0.5)
    assert sol.b.tolist() == [1, 1, 0, 0]
    assert sol.objective == 2.0
    sol = solve_fractional_knapsack([0.7, 0, 0.3, 0], 1.0)
    assert sol.b.tolist() == [1, 0, 1, 0]


def test_knapsack_full_target_covers_support(rng):
    for _ in range(50):
        p = rng.dirichlet(np.ones(6))
        p[rng.random(6) < 0.3] = 0
        if p.sum() == 0:
            continue
        p = make_probability_vector(p / p.sum())
        b = solve_fractional_knapsack(p, 1.0).b
        assert np.array_equal(b, (p.probs > 0).astype(float))


def test_knapsack_matches_hand_greedy(rng):
    for _ in range(300):
        p = rng.dirichlet(np.ones(rng.integers(2, 12)))
        t = rng.random()
        np.testing.assert_allclose(solve_fractional_knapsack(p, t).b, knapsack_by_hand(p, t), atol=1e-12)


def test_single_vertex_paths_agree(rng):
    for _ in range(200):
        p = make_probability_vector(rng.dirichlet(np.ones(rng.integers(2, 8))))
        t = rng.random()
        a, b = solve_fractional_knapsack(p, t), solve_bps(SecondOrderPrediction(p.probs[None]), t)
        assert np.array_equal(a.b, b.b) and a.objective == b.objective


def test_simplex_core_reaches_knapsack_optimum(rng):
    # the simplex itself, bypassing the single-vertex shortcut
    for _ in range(300):
        p = rng.dirichlet(np.ones(rng.integers(2, 15)))
        t = rng.random()
        b, _ = _bounded_simplex(p[None, :], t)
        np.testing.assert_allclose(b, solve_fractional_knapsack(p, t).b, atol=1e-9)


def test_optimality_against_vertex_enumeration(rng):
    for _ in range(150):
        k, m = rng.integers(2, 5), rng.integers(1, 4)
        P = rng.dirichlet(np.ones(k), size=m)
        t = rng.choice(np.round(np.arange(0.1, 1.0, 0.1), 1))
        sol = solve_bps(SecondOrderPrediction.from_vectors(list(P)), t)
        assert sol.objective == pytest.approx(lp_vertex_enumeration(P, t), abs=1e-3)


def test_feasibility_and_randomized_count(rng):
    for _ in range(300):
        k, m = rng.integers(2, 30), rng.integers(1, 8)
        pr = random_prediction(rng, k, m, rng.choice([0.2, 1.0, 5.0]))
        t = rng.random()
        sol = solve_bps(pr, t)
        assert (pr.vertices @ sol.b).min() >= t - 1e-9
        assert sol.b.min() >= 0 and sol.b.max() <= 1
        assert abs(sol.objective - sol.b.sum()) <= 1e-9
        fractional = np.sum((sol.b > 1e-9) & (sol.b < 1 - 1e-9))
        assert fractional <= min(k, pr.m)


def test_monotone_in_target(rng):
    for _ in range(60):
        pr = random_prediction(rng, 6, 4)
        ts = np.linspace(0.05, 1.0, 20)
        objs = [solve_bps(pr, t).objective for t in ts]
        assert all(a <= b + 1e-9 for a, b in zip(objs, objs[1:]))
        for t_lo, t_hi, o_lo, o_hi in zip(ts, ts[1:], objs, objs[1:]):
            assert o_lo <= (t_lo / t_hi) * o_hi + 1e-9


def test_adding_vertices_never_shrinks(rng):
    for _ in range(100):
        k = rng.integers(2, 8)
        V = rng.dirichlet(np.ones(k), size=6)
        t = rng.random()
        small = solve_bps(SecondOrderPrediction.from_vectors(list(V[:3])), t).objective
        big = solve_bps(SecondOrderPrediction.from_vectors(list(V)), t).objective
        assert small <= big + 1e-9


def test_permutation_equivariance(rng):
    for _ in range(100):
        k = rng.integers(2, 8)
        V = rng.dirichlet(np.ones(k), size=rng.integers(1, 5))
        t = rng.random()
        perm = rng.permutation(k)
        orig = solve_bps(SecondOrderPrediction.from_vectors(list(V)), t)
        permuted = solve_bps(SecondOrderPrediction.from_vectors(list(V[:, perm])), t)
        assert orig.objective == pytest.approx(permuted.objective, abs=1e-9)
        carried = orig.b[perm]
        assert (V[:, perm] @ carried).min() >= t - 1e-9
        assert carried.sum() == pytest.approx(permuted.objective, abs=1e-9)


def test_labels_without_mass_stay_out(rng):
    V = rng.dirichlet(np.ones(4), size=3)
    V = np.hstack([V[:, :2], np.zeros((3, 1)), V[:, 2:]])
    sol = solve_bps(SecondOrderPrediction.from_vectors(list(V)), 1.0)
    assert sol.b[2] == 0
    assert (V @ sol.b).min() >= 1 - 1e-9


def test_disjoint_supports_at_full_target():
    sol = solve_bps(pred([0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5]), 1.0)
    np.testing.assert_allclose(sol.b, [1, 1, 1, 1])


def test_deterministic(rng):
    pr = random_prediction(rng, 12, 5)
    a, b = solve_bps(pr, 0.8), solve_bps(pr, 0.8)
    assert np.array_equal(a.b, b.b) and a.iterations == b.iterations


def test_degenerate_and_sparse_vertices():
    # repeated rows after dedup tolerance, exact zeros, and ties everywhere
    V = [[0.25, 0.25, 0.25, 0.25], [0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5], [0.5, 0, 0.5, 0]]
    for t in np.linspace(0, 1, 11):
        sol = solve_bps(pred(*V), t)
        assert (np.array(V) @ sol.b).min() >= t - 1e-9
        assert sol.objective == pytest.approx(lp_vertex_enumeration(V, t), abs=1e-9)


def test_full_target_gives_exact_support_indicator(rng):
    for _ in range(50):
        P = rng.dirichlet(np.ones(6), size=4)
        P[:, 2] = 0
        P /= P.sum(axis=1, keepdims=True)
        sol = solve_bps(SecondOrderPrediction.from_vectors(list(P)), 1.0)
        assert sol.b.tolist() == [1, 1, 0, 1, 1, 1]
