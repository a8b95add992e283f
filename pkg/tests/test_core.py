import numpy as np
import pytest

from pps.core import ReplayBuffer, Trajectory, Transition, from_affine, to_affine


def test_to_affine_examples():
    np.testing.assert_array_equal(to_affine(np.array([0.0, 0.0])), [0.0, 0.0, 1.0])
    np.testing.assert_array_equal(to_affine(np.array([-2.5, 0.0])), [-2.5, 0.0, 1.0])
    np.testing.assert_array_equal(to_affine(np.array([6.0, 1.2])), [6.0, 1.2, 1.0])


def test_from_affine_examples():
    np.testing.assert_array_equal(from_affine(np.array([0.0, 0.0, 1.0])), [0.0, 0.0])
    np.testing.assert_array_equal(from_affine(np.array([6.0, 1.2, 1.0])), [6.0, 1.2])
    with pytest.raises(ValueError):
        from_affine(np.array([1.0, 1.0, 0.5]))


def test_affine_roundtrip_is_exact():
    rng = np.random.default_rng(0)
    for _ in range(200):
        d = rng.integers(1, 7)
        s = rng.standard_normal(d) * 10.0 ** rng.integers(-3, 4)
        np.testing.assert_array_equal(from_affine(to_affine(s)), s)


def test_to_affine_rejects_nonfinite():
    with pytest.raises(ValueError):
        to_affine(np.array([1.0, np.nan]))


def _transition(s, s_next):
    return Transition(s=np.asarray(s, float), a=np.zeros(1), r=0.0, s_next=np.asarray(s_next, float), done=False)


def test_trajectory_contiguity():
    good = Trajectory((_transition([0, 0], [1, 0]), _transition([1, 0], [2, 0])))
    good.validate()
    broken = Trajectory((_transition([0, 0], [1, 0]), _transition([1.0001, 0], [2, 0])))
    with pytest.raises(ValueError, match="between entries 0 and 1"):
        broken.validate()


def test_trajectory_final_state():
    assert Trajectory().final_state is None
    traj = Trajectory((_transition([0, 0], [1, 0]),))
    np.testing.assert_array_equal(traj.final_state, [1, 0])


def test_replay_buffer_count_tracks_length():
    buf = ReplayBuffer(env_id="doubleint", seed=3)
    assert len(buf) == 0
    buf.extend(Trajectory((_transition([0, 0], [1, 0]),)))
    assert len(buf) == 1
    assert buf.state_dim == 2
    assert buf.action_dim == 1
