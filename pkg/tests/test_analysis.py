import numpy as np
import pytest

from pps.analysis import bin_indices, coverage, divisions_for, visited_states
from pps.core import Transition
from pps.envs import make_env
from pps.envs.base import EnvSpec


def _spec(lower, upper):
    lower = np.asarray(lower, float)
    return EnvSpec(
        state_dim=lower.size,
        action_dim=1,
        state_lower=lower,
        state_upper=np.asarray(upper, float),
        action_lower=np.array([-1.0]),
        action_upper=np.array([1.0]),
        dt=1.0,
    )


def test_divisions_rule():
    assert divisions_for(100, 2) == 5  # ceil(sqrt(20))
    assert divisions_for(15, 4) == 2  # ceil(3^(1/4))
    assert divisions_for(5, 1) == 1
    assert divisions_for(500, 2) == 10  # exact power stays exact
    assert divisions_for(0, 3) == 1


def test_coverage_full_grid_example():
    # N=100, d=2 -> 5 divisions, 25 bins; hitting all bins gives 1.0.
    spec = _spec([0.0, 0.0], [1.0, 1.0])
    centers = [( (i + 0.5) / 5.0, (j + 0.5) / 5.0) for i in range(5) for j in range(5)]
    states = np.array(centers * 4)
    rep = coverage(states, spec)
    assert (rep.divisions, rep.total_bins, rep.nonempty) == (5, 25, 25)
    assert rep.coverage == 1.0


def test_coverage_scaled_when_bins_exceed_samples():
    # N=15, d=4 -> 2 divisions, 16 bins > 15 samples, scale 16/15;
    # 10 occupied bins -> coverage 10 * (16/15) / 16 = 2/3.
    spec = _spec([0.0] * 4, [1.0] * 4)
    corners = [((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1) for i in range(10)]
    states = np.array([[0.25 + 0.5 * c for c in corner] for corner in corners])
    states = np.vstack([states, states[:5]])  # 15 samples in 10 distinct bins
    rep = coverage(states, spec)
    assert (rep.divisions, rep.total_bins, rep.nonempty) == (2, 16, 10)
    assert rep.coverage == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_coverage_single_repeated_state():
    spec = _spec([0.0], [1.0])
    rep = coverage(np.full((5, 1), 0.3), spec)
    assert rep.divisions == 1
    assert rep.coverage == 1.0


def test_coverage_empty_input():
    spec = _spec([0.0, 0.0], [1.0, 1.0])
    rep = coverage(np.zeros((0, 2)), spec)
    assert rep.coverage == 0.0
    assert rep.divisions == 1
    assert rep.nonempty == 0


def test_coverage_never_exceeds_one_on_random_inputs():
    rng = np.random.default_rng(51)
    for _ in range(40):
        d = int(rng.integers(1, 5))
        spec = _spec([-1.0] * d, [1.0] * d)
        n = int(rng.integers(1, 400))
        states = rng.uniform(-1, 1, size=(n, d))
        assert coverage(states, spec).coverage <= 1.0


def test_coverage_scale_identity():
    # The literal formula reduces to nonempty / min(N, total_bins).
    rng = np.random.default_rng(52)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        spec = _spec([0.0] * d, [1.0] * d)
        n = int(rng.integers(1, 200))
        rep = coverage(rng.uniform(0, 1, size=(n, d)), spec)
        assert rep.coverage == pytest.approx(rep.nonempty / min(n, rep.total_bins), abs=1e-12)


def test_coverage_permutation_invariant():
    spec = _spec([0.0, 0.0], [1.0, 1.0])
    rng = np.random.default_rng(53)
    states = rng.uniform(0, 1, size=(80, 2))
    rep1 = coverage(states, spec)
    rep2 = coverage(states[rng.permutation(80)], spec)
    assert rep1 == rep2


def test_nonempty_monotone_with_frozen_binning():
    spec = _spec([0.0, 0.0], [1.0, 1.0])
    rng = np.random.default_rng(54)
    states = rng.uniform(0, 1, size=(60, 2))
    divisions = divisions_for(60, 2)
    counts = []
    for k in range(10, 61, 10):
        counts.append(np.unique(bin_indices(states[:k], spec, divisions)).size)
    assert all(b >= a for a, b in zip(counts, counts[1:]))


def test_outliers_clamp_into_boundary_bins():
    spec = _spec([0.0, 0.0], [1.0, 1.0])
    idx = bin_indices(np.array([[1.5, -0.2], [1.0, 1.0], [0.0, 0.0]]), spec, 4)
    assert idx[0] == bin_indices(np.array([[0.99, 0.01]]), spec, 4)[0]
    # The upper edge belongs to the last bin.
    assert idx[1] == bin_indices(np.array([[0.99, 0.99]]), spec, 4)[0]


def test_visited_states_every_s_plus_final_next():
    env = make_env("doubleint")
    t1 = Transition(np.array([0.0, 0.0]), np.array([1.0]), 0.0, np.array([0.1, 0.0]), False)
    t2 = Transition(np.array([0.1, 0.0]), np.array([1.0]), 0.0, np.array([0.2, 0.0]), False)
    states = visited_states([t1, t2])
    assert states.shape == (3, 2)
    np.testing.assert_array_equal(states[-1], t2.s_next)
    assert visited_states([]).size == 0
    assert coverage(visited_states([]), env.spec).coverage == 0.0


def test_report_record_roundtrips_values():
    spec = _spec([0.0, 0.0], [1.0, 1.0])
    rep = coverage(np.random.default_rng(55).uniform(0, 1, (50, 2)), spec)
    record = rep.as_record()
    fields = dict(line.split("=", 1) for line in record.splitlines())
    assert int(fields["n_samples"]) == rep.n_samples
    assert float(fields["coverage"]) == rep.coverage
    assert int(fields["nonempty"]) == rep.nonempty
