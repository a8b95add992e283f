import numpy as np
import pytest
import torch

from ppstrain.data import MAGIC, load_buffer


def _write(path, rows, d=2, m=1, env="doubleint", seed=0, mean=None, std=None, count=None):
    rewards = [row[d + m] for row in rows]
    mean = np.mean(rewards) if mean is None and rewards else (mean or 0.0)
    std = np.std(rewards) if std is None and rewards else (std or 0.0)
    lines = [
        MAGIC,
        f"env={env}",
        f"d={d}",
        f"m={m}",
        f"count={len(rows) if count is None else count}",
        f"seed={seed}",
        f"reward_mean={mean!r}",
        f"reward_std={std!r}",
        "",
    ]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row[:-1]) + f",{int(row[-1])}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _rows(rewards):
    rows = []
    s = [0.0, 0.0]
    for i, r in enumerate(rewards):
        s_next = [s[0] + 0.1, s[1] + 0.01]
        rows.append((*s, 0.5, r, *s_next, False))
        s = s_next
    return rows


def test_rewards_normalized_with_header_stats(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.0, 1.0, 2.0]))
    ds = load_buffer(str(path))
    expected = (np.array([0.0, 1.0, 2.0]) - 1.0) / np.sqrt(2.0 / 3.0)
    np.testing.assert_allclose(ds.r.numpy(), expected, rtol=1e-6)
    np.testing.assert_allclose(expected, [-1.22474487, 0.0, 1.22474487], atol=1e-8)
    assert abs(float(ds.r.mean())) < 1e-6
    assert abs(float(ds.r.std(correction=0)) - 1.0) < 1e-6


def test_degenerate_std_maps_rewards_to_zero(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.7]), mean=0.7, std=0.0)
    with pytest.warns(UserWarning, match="degenerate"):
        ds = load_buffer(str(path))
    assert float(ds.r.abs().max()) == 0.0


def test_transition_count_and_fields(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.0, 0.5, 1.0, 1.5]))
    ds = load_buffer(str(path))
    assert len(ds) == 4
    assert ds.state_dim == 2 and ds.action_dim == 1
    np.testing.assert_allclose(ds.s_next[0].numpy(), ds.s[1].numpy())
    assert ds.done.sum() == 0


def test_version_mismatch_rejected(tmp_path):
    path = tmp_path / "b.buffer"
    path.write_text("# pps-buffer v9\n")
    with pytest.raises(ValueError, match="unsupported format"):
        load_buffer(str(path))


def test_dimension_mismatch_rejected(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.0, 1.0]))
    with pytest.raises(ValueError, match="do not match"):
        load_buffer(str(path), expect_dims=(4, 2))


def test_count_mismatch_rejected(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.0, 1.0]), count=5)
    with pytest.raises(ValueError, match="promises 5 rows"):
        load_buffer(str(path))


def test_malformed_row_rejected(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.0, 1.0]))
    text = path.read_text().splitlines()
    text[-1] = "1,2,3"
    path.write_text("\n".join(text) + "\n")
    with pytest.raises(ValueError, match="malformed row 2"):
        load_buffer(str(path))


def test_content_hash_is_stable_and_sensitive(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.0, 1.0, 2.0]))
    ds = load_buffer(str(path))
    h1 = ds.content_hash()
    assert h1 == load_buffer(str(path)).content_hash()
    ds2 = load_buffer(str(path))
    ds2.s[0, 0] += 1.0  # simulated corruption
    assert ds2.content_hash() != h1


def test_sampling_draws_only_dataset_rows(tmp_path):
    path = _write(tmp_path / "b.buffer", _rows([0.0, 1.0, 2.0]))
    ds = load_buffer(str(path))
    gen = torch.Generator().manual_seed(0)
    rows = {tuple(np.round(row, 9)) for row in ds.s.numpy()}
    for _ in range(20):
        s, a, r, s_next, done = ds.sample(16, gen)
        for row in s.numpy():
            assert tuple(np.round(row, 9)) in rows
