import math

import numpy as np
import pytest

from pps.aqr import AqrConfig, aqr_distance, drift, gramian, nearest
from pps.envs import make_env
from pps.lindyn import LinearizedDynamics, linearize
from pps.planner import Tree


def _lti(A, B, c=None):
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    d, m = A.shape[0], B.shape[1]
    c = np.zeros(d) if c is None else np.asarray(c, float)
    A_aff = np.zeros((d + 1, d + 1))
    A_aff[:d, :d] = A
    A_aff[:d, d] = c
    B_aff = np.vstack([B, np.zeros((1, m))])
    return LinearizedDynamics(A=A, B=B, c=c, A_affine=A_aff, B_affine=B_aff, linearization_point=np.zeros(d))


DOUBLEINT = _lti([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]])


def closed_form_gramian(T):
    # For A = [[0,1],[0,0]], B = (0,1): e^{As} B = (s, 1), so
    # G(T) = [[T^3/3, T^2/2], [T^2/2, T]].
    return np.array([[T**3 / 3.0, T**2 / 2.0], [T**2 / 2.0, T]])


def test_gramian_doubleint_closed_form():
    G = gramian(DOUBLEINT, np.eye(1), T=2.0, steps=64)
    np.testing.assert_allclose(G, [[8.0 / 3.0, 2.0], [2.0, 2.0]], rtol=1e-12)
    for T in (0.3, 1.0, 4.0):
        np.testing.assert_allclose(gramian(DOUBLEINT, np.eye(1), T), closed_form_gramian(T), rtol=1e-6)


def test_gramian_identity_case():
    lin = _lti(np.zeros((2, 2)), np.eye(2))
    np.testing.assert_allclose(gramian(lin, np.eye(2), T=1.0), np.eye(2), atol=1e-12)


def test_gramian_vanishes_at_zero_horizon():
    assert np.abs(gramian(DOUBLEINT, np.eye(1), T=1e-8)).max() < 2e-8
    np.testing.assert_array_equal(gramian(DOUBLEINT, np.eye(1), T=0.0), np.zeros((2, 2)))


def test_gramian_is_symmetric_for_random_systems():
    rng = np.random.default_rng(21)
    for _ in range(10):
        lin = _lti(rng.standard_normal((3, 3)), rng.standard_normal((3, 2)))
        G = gramian(lin, np.eye(2), T=1.5)
        assert np.abs(G - G.T).max() < 1e-10


def test_gramian_respects_control_weight():
    # Scaling R by 4 scales B R^{-1} B^T (and hence G) by 1/4.
    G1 = gramian(DOUBLEINT, np.eye(1), T=2.0)
    G4 = gramian(DOUBLEINT, 4.0 * np.eye(1), T=2.0)
    np.testing.assert_allclose(G4, G1 / 4.0, rtol=1e-12)


def test_drift_examples():
    # c = 0: pure e^{AT} x0; position advances by T * velocity.
    np.testing.assert_allclose(drift(DOUBLEINT, np.array([-1.0, 0.0]), 2.0), [-1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(drift(DOUBLEINT, np.array([0.0, 1.0]), 2.0), [2.0, 1.0], atol=1e-12)
    np.testing.assert_array_equal(drift(DOUBLEINT, np.zeros(2), 5.0), np.zeros(2))
    lin = _lti(np.zeros((2, 2)), [[0.0], [1.0]], c=[1.0, 0.0])
    np.testing.assert_allclose(drift(lin, np.zeros(2), 3.0), [3.0, 0.0], atol=1e-12)


def _cfg(**kw):
    defaults = dict(R=np.eye(1), t_max=10.0)
    defaults.update(kw)
    return AqrConfig(**defaults)


def test_aqr_distance_zero_displacement_costs_smallest_horizon():
    cfg = _cfg()
    res = aqr_distance(DOUBLEINT, np.array([4.0, 0.0]), np.array([4.0, 0.0]), cfg)
    assert res.cost == pytest.approx(cfg.horizons()[0])
    assert res.horizon == pytest.approx(cfg.horizons()[0])


def test_aqr_distance_matches_closed_form_minimum():
    # J(T) = T + 6/T^3 for displacement (-1, 0); continuous minimum at
    # T* = 18^(1/4), J* = T* + 6 T*^-3.
    cfg = _cfg()
    res = aqr_distance(DOUBLEINT, np.array([-1.0, 0.0]), np.zeros(2), cfg)
    t_star = 18.0**0.25
    j_star = t_star + 6.0 / t_star**3
    assert res.cost == pytest.approx(j_star, rel=0.02)
    grid = cfg.horizons()
    cell = np.diff(grid).max()
    assert abs(res.horizon - t_star) < cell


def test_aqr_distance_monotone_in_displacement():
    cfg = _cfg()
    costs = [
        aqr_distance(DOUBLEINT, np.array([delta, 0.0]), np.zeros(2), cfg).cost
        for delta in (0.5, 1.0, 2.0, 4.0)
    ]
    assert all(b > a for a, b in zip(costs, costs[1:]))


def test_aqr_grid_convergence():
    base = _cfg(t_grid=32, ode_steps=64)
    fine = _cfg(t_grid=64, ode_steps=128)
    j_base = aqr_distance(DOUBLEINT, np.array([-1.0, 0.0]), np.zeros(2), base).cost
    j_fine = aqr_distance(DOUBLEINT, np.array([-1.0, 0.0]), np.zeros(2), fine).cost
    assert abs(j_base - j_fine) / j_fine < 0.01


def test_aqr_unreachable_returns_inf_sentinel():
    # A violently unstable scalar system overflows the Gramian at every
    # candidate horizon (even the smallest), leaving no usable candidate.
    lin = _lti([[4000.0]], [[1.0]])
    with np.errstate(over="ignore", invalid="ignore"):
        res = aqr_distance(lin, np.array([1.0]), np.array([0.0]), _cfg(t_max=20.0))
    assert math.isinf(res.cost)


def test_aqr_config_validation():
    with pytest.raises(ValueError, match="positive definite"):
        AqrConfig(R=-np.eye(1), t_max=1.0)
    with pytest.raises(ValueError, match="symmetric"):
        AqrConfig(R=np.array([[1.0, 0.5], [0.0, 1.0]]), t_max=1.0)
    with pytest.raises(ValueError, match="t_grid"):
        AqrConfig(R=np.eye(1), t_max=1.0, t_grid=1)
    with pytest.raises(ValueError, match="t_min"):
        AqrConfig(R=np.eye(1), t_max=1.0, t_min=2.0)


def test_nearest_singleton_and_two_nodes():
    env = make_env("doubleint")
    cfg = _cfg()
    x_r = np.array([6.0, 0.0])
    lin = linearize(env, x_r)
    tree = Tree.rooted(np.zeros(2))
    assert nearest(tree, x_r, cfg, lin).id == 0
    from pps.core import Trajectory

    tree.add(np.array([5.0, 0.0]), parent=0, edge=Trajectory())
    assert nearest(tree, x_r, cfg, lin).id == 1


def test_nearest_tie_breaks_to_first_inserted():
    env = make_env("doubleint")
    cfg = _cfg()
    x_r = np.array([1.0, 0.0])
    lin = linearize(env, x_r)
    from pps.core import Trajectory

    tree = Tree.rooted(np.array([2.0, 0.0]))
    tree.add(np.array([2.0, 0.0]), parent=0, edge=Trajectory())  # duplicate state
    assert nearest(tree, x_r, cfg, lin).id == 0


def test_nearest_matches_per_node_distance():
    env = make_env("doubleint")
    cfg = _cfg()
    rng = np.random.default_rng(22)
    from pps.core import Trajectory

    tree = Tree.rooted(np.zeros(2))
    for _ in range(15):
        tree.add(rng.uniform(env.spec.state_lower, env.spec.state_upper), 0, Trajectory())
    x_r = rng.uniform(env.spec.state_lower, env.spec.state_upper)
    lin = linearize(env, x_r)
    best = nearest(tree, x_r, cfg, lin)
    costs = [aqr_distance(lin, n.state, x_r, cfg).cost for n in tree.nodes]
    assert best.id == int(np.argmin(costs))
