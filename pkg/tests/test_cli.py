import json
import subprocess
import sys

import numpy as np
import pytest

from pps.cli import main


def test_explore_writes_expected_files(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(
        ["explore", "--env", "doubleint", "--seeds", "2", "--budget", "60", "--horizon", "6", "--out", str(out)]
    )
    assert rc == 0
    for seed in (0, 1):
        assert (out / f"doubleint-seed{seed}.buffer").exists()
        record = (out / f"coverage-seed{seed}.txt").read_text()
        assert f"seed={seed}" in record and "coverage=" in record
    summary = (out / "summary.txt").read_text()
    assert "coverage_median=" in summary and "coverage_iqr=" in summary
    manifest = (out / "manifest.txt").read_text()
    assert "buffer_0=" in manifest and "coverage_1=" in manifest
    csv = (out / "coverage.csv").read_text().splitlines()
    assert csv[0] == "seed,coverage"
    assert len(csv) == 3
    captured = capsys.readouterr()
    assert "coverage_median=" in captured.out


def test_explore_seed_list_and_determinism(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        assert main(
            ["explore", "--env", "doubleint", "--seeds", "3,5", "--budget", "40", "--horizon", "5", "--out", str(out)]
        ) == 0
    for name in ("doubleint-seed3.buffer", "doubleint-seed5.buffer", "summary.txt", "coverage.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_explore_budget_zero(tmp_path, capsys):
    out = tmp_path / "zero"
    rc = main(["explore", "--env", "doubleint", "--seeds", "1", "--budget", "0", "--out", str(out)])
    assert rc == 0
    assert "coverage=0.0000" in capsys.readouterr().out


def test_summary_recomputes_from_per_seed_records(tmp_path):
    out = tmp_path / "run"
    main(["explore", "--env", "doubleint", "--seeds", "3", "--budget", "60", "--horizon", "6", "--out", str(out)])
    values = []
    for seed in range(3):
        fields = dict(
            line.split("=", 1) for line in (out / f"coverage-seed{seed}.txt").read_text().splitlines()
        )
        values.append(float(fields["coverage"]))
    summary = dict(line.split("=", 1) for line in (out / "summary.txt").read_text().splitlines())
    q25, med, q75 = np.percentile(values, [25, 50, 75])
    assert float(summary["coverage_median"]) == med
    assert float(summary["coverage_q25"]) == q25
    assert float(summary["coverage_iqr"]) == q75 - q25


def test_coverage_command(tmp_path, capsys):
    out = tmp_path / "run"
    main(["explore", "--env", "doubleint", "--seeds", "1", "--budget", "50", "--horizon", "5", "--out", str(out)])
    capsys.readouterr()
    rc = main(["coverage", str(out / "doubleint-seed0.buffer")])
    assert rc == 0
    printed = capsys.readouterr().out
    fields = dict(line.split("=", 1) for line in printed.strip().splitlines())
    assert fields["env"] == "doubleint"
    assert int(fields["n_samples"]) == 51
    assert 0.0 <= float(fields["coverage"]) <= 1.0


def test_coverage_command_malformed_buffer_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.buffer"
    bad.write_text("garbage\n")
    rc = main(["coverage", str(bad)])
    assert rc == 3
    assert "error:" in capsys.readouterr().err


def test_invalid_env_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["explore", "--env", "cartpole", "--out", "x"])
    assert exc.value.code == 2


def test_config_flag_reaches_environment(tmp_path, capsys):
    cfg = tmp_path / "pps.cfg"
    cfg.write_text("doubleint.dt = 0.1\n")
    out = tmp_path / "run"
    rc = main(
        [
            "explore", "--env", "doubleint", "--seeds", "1", "--budget", "10",
            "--horizon", "5", "--out", str(out), "--config", str(cfg),
        ]
    )
    assert rc == 0
    buffer_text = (out / "doubleint-seed0.buffer").read_text()
    assert buffer_text.startswith("# pps-buffer v1")


def test_serve_stdio_subprocess():
    script = (
        json.dumps({"type": "spec"})
        + "\n"
        + json.dumps({"type": "reset", "seed": 0})
        + "\n"
        + json.dumps({"type": "close"})
        + "\n"
    )
    proc = subprocess.run(
        [sys.executable, "-m", "pps", "serve", "--env", "mountaincar", "--stdio"],
        input=script,
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    lines = [json.loads(l) for l in proc.stdout.splitlines()]
    assert lines[0]["type"] == "spec" and lines[0]["d"] == 2 and lines[0]["m"] == 1
    assert lines[1]["type"] == "state"
    np.testing.assert_allclose(lines[1]["s"], [-np.pi / 6.0, 0.0])
    assert lines[2] == {"type": "ack"}


def test_serve_tcp_double_bind_fails(tmp_path):
    import socket

    sock = socket.create_server(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    try:
        proc = subprocess.run(
            [sys.executable, "-m", "pps", "serve", "--env", "doubleint", "--tcp", str(port)],
            capture_output=True,
            text=True,
            timeout=60,
        )
        assert proc.returncode == 3
        assert "error:" in proc.stderr
    finally:
        sock.close()
