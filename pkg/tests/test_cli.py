import csv
import json
from fractions import Fraction
from pathlib import Path

import pytest

from hitlab import cli
from hitlab.cf import golden
from hitlab.orbit import brute_hit
from hitlab.errors import ConfigError


def run(argv):
    return cli.main(argv)


def test_level_measure_outputs(tmp_path):
    out = tmp_path / "lm"
    assert run(["level-measure", "--out", str(out), "--set", "windows=[6]", "--set", "k_extra=4"]) == 0
    summary = json.loads((out / "level_measure.json").read_text())
    assert summary["passed"] is True
    win = summary["summary"]["windows"][0]
    assert win["n"] == 6 and "/" in win["two_r"]
    csv = (out / "level_measures.csv").read_text().splitlines()
    assert csv[0].startswith("# hitlab") and csv[1] == "n,k,mu_num,mu_den,ok"
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["files"]) == {"level_measure.json", "level_measures.csv"}
    assert "out" not in manifest["config"]
    assert (out / "runtimes.json").exists()


def test_schema_error_names_field(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "hit", "params": {"r": "1/10", "horizon": 0}}))
    assert run(["hit", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "params/horizon" in capsys.readouterr().err


def test_unknown_top_level_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "hit", "colour": 1}))
    assert run(["hit", "--config", str(cfg)]) == 2


def test_kind_mismatch(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "flow"}))
    assert run(["hit", "--config", str(cfg)]) == 2


def test_degenerate_ball_is_config_error(tmp_path, capsys):
    rc = run(["hit", "--out", str(tmp_path / "o"), "--set", "r=\"1/2\"", "--set", "horizon=10",
              "--set", 'angle={"golden": 30}'])
    assert rc == 2
    assert "invalid parameters" in capsys.readouterr().err


def test_resource_error_exit_code(tmp_path):
    rc = run(["build-pair", "--out", str(tmp_path / "o"), "--set", "gamma=3", "--set", "levels=8",
              "--set", "bit_budget=1024"])
    assert rc == 3


def test_hit_against_oracle(tmp_path):
    out = tmp_path / "h"
    rc = run(["hit", "--out", str(out), "--set", 'angle={"golden": 40}', "--set", 'r="1/30"',
              "--set", "horizon=5000", "--set", "points=3"])
    assert rc == 0
    lines = (out / "hits.csv").read_text().splitlines()
    rows = list(csv.DictReader(lines[1:]))
    assert len(rows) == 3
    alpha = golden(40)
    for row in rows:
        x = Fraction(row["x"])
        assert int(row["tau"]) == brute_hit([alpha], (x,), (0,), Fraction(1, 30), 5000)


def test_batch_mode(tmp_path):
    batch = tmp_path / "b.jsonl"
    batch.write_text('{"windows": [4]}\n{"windows": [5]}\n')
    out = tmp_path / "b"
    assert run(["level-measure", "--out", str(out), "--batch", str(batch), "--set", "k_extra=2"]) == 0
    assert (out / "0000_level_measure.json").exists() and (out / "0001_level_measure.json").exists()


def test_dumps_is_deterministic():
    obj = {"b": 1.0 / 3, "a": [float("inf"), float("nan"), 2], "c": {"z": None, "y": True}}
    s = cli.dumps(obj)
    assert s == cli.dumps(json.loads(json.dumps(obj, allow_nan=True)) | {"a": [float("inf"), float("nan"), 2]})
    assert s.index('"a"') < s.index('"b"') < s.index('"c"')
    assert '"inf"' in s and '"nan"' in s and "0.33333333333333331" in s


def test_validate_accepts_defaults():
    required = {"build-pair": {"levels": 2}, "hit": {"r": "1/10", "horizon": 10}}
    for kind in cli.KINDS:
        cli.validate({"kind": kind, "seed": 0, "out": "x", "jobs": 1, "params": required.get(kind, {})})
    with pytest.raises(ConfigError):
        cli.validate({"kind": "hit", "params": {}})
    with pytest.raises(ConfigError):
        cli.validate({"kind": "nope"})


def test_verify_all_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    ra = run(["verify-all", "--seed", "7", "--out", str(a)])
    rb = run(["verify-all", "--seed", "7", "--out", str(b), "--jobs", "2"])
    assert ra == rb
    for name in ("verify_all.json", "checks.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_hit_without_angle_uses_golden(tmp_path):
    out = tmp_path / "h"
    assert run(["hit", "--out", str(out), "--set", 'r="1/50"', "--set", "horizon=1000",
                "--set", "points=3"]) == 0
    rows = [r for r in csv.DictReader((out / "hits.csv").read_text().splitlines()[1:])]
    assert len(rows) == 3 and all(int(r["tau"]) >= 1 for r in rows)


def test_pair_gamma_defaults_to_two(tmp_path):
    out = tmp_path / "p"
    assert run(["build-pair", "--out", str(out), "--set", "levels=3"]) == 0
    summary = json.loads((out / "build_pair.json").read_text())
    assert summary["summary"]["pair"]["gamma"] == 2
