from __future__ import annotations

import hashlib
import json
from pathlib import Path

import pytest

from rigbeacon.cli import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, main
from rigbeacon.sim.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _small(tmp_path, name, **kw):
    d = load_scenario(SCENARIOS / f"{name}.json").to_json()
    d.update(kw)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(d))
    return str(path)


def _check_manifest(out: Path):
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["artifacts"]
    for art in manifest["artifacts"]:
        assert hashlib.sha256((out / art["path"]).read_bytes()).hexdigest() == art["sha256"]
    return manifest


def test_game_analyze_reproduces_dense_matrix(tmp_path, capsys):
    assert main(["game-analyze", "--m", "8", "--f", "3", "--out", str(tmp_path)]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "unique NE: uniform" in stdout
    report = json.loads((tmp_path / "game_report.json").read_text())
    assert report["matrix"][0] == [1, 1, 1, 0, 0, -1, -1, -1]
    assert report["kernel"] == {"unique": True, "rank": 7, "dimension": 1}
    assert report["density"] == "3/4"
    _check_manifest(tmp_path)


def test_game_analyze_small_m_includes_support_enumeration(capsys):
    assert main(["game-analyze", "--m", "3"]) == EXIT_OK
    assert "unique NE: uniform" in capsys.readouterr().out


def test_game_analyze_rejects_shared_factor(capsys):
    assert main(["game-analyze", "--m", "6", "--f", "2"]) == EXIT_VALIDATION
    assert "gcd(f,m) must be 1" in capsys.readouterr().err


def test_beacon_run_outputs_and_reproducibility(tmp_path):
    scen = _small(tmp_path, "withholder_commit", sessions=3)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["beacon-run", "--scenario", scen, "--seed", "5", "--out", str(a)]) == EXIT_OK
    assert main(["beacon-run", "--scenario", scen, "--seed", "5", "--out", str(b)]) == EXIT_OK
    for name in ("transcript.jsonl", "results.jsonl"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    manifest = _check_manifest(a)
    assert manifest["seed"] == 5
    assert manifest["scenario_sha256"] == hashlib.sha256(Path(scen).read_bytes()).hexdigest()
    results = [json.loads(line) for line in (a / "results.jsonl").read_text().splitlines()]
    assert len(results) == 3 and all(len(r["confiscated"]) == 1 for r in results)


def test_beacon_run_seed_changes_output(tmp_path):
    scen = _small(tmp_path, "honest_commit", sessions=2)
    main(["beacon-run", "--scenario", scen, "--seed", "1", "--out", str(tmp_path / "a")])
    main(["beacon-run", "--scenario", scen, "--seed", "2", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a/results.jsonl").read_bytes() != (tmp_path / "b/results.jsonl").read_bytes()


def test_beacon_run_invalid_timing_exits_validation(tmp_path, capsys):
    code = main(["beacon-run", "--scenario", str(SCENARIOS / "invalid_timing.json"), "--out", str(tmp_path)])
    assert code == EXIT_VALIDATION
    assert "T_commit > Δ" in capsys.readouterr().err


def test_beacon_run_bad_scenario_names_field(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"variant": "commit", "n": 4, "m": 12, "timing": {}}))
    assert main(["beacon-run", "--scenario", str(path), "--out", str(tmp_path / "o")]) == EXIT_VALIDATION
    assert "timing.T_commit" in capsys.readouterr().err


def test_beacon_run_availability_failure_is_runtime(tmp_path, capsys):
    silent = [{"kind": "withhold-after-commit"}] * 3
    scen = _small(tmp_path, "honest_pvss", sessions=1, n=5, agents=silent)
    assert main(["beacon-run", "--scenario", scen, "--out", str(tmp_path / "o")]) == EXIT_RUNTIME
    assert "threshold" in capsys.readouterr().err


def test_pvss_demo(tmp_path, capsys):
    assert main(["pvss-demo", "--seed", "9", "--out", str(tmp_path)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "p=23 q=11 g=4" in text
    assert "verify_deal: True" in text
    assert "reconstructed from shares 1..3: 9" in text
    _check_manifest(tmp_path)


def test_stats_on_beacon_results(tmp_path, capsys):
    scen = _small(tmp_path, "honest_commit", sessions=40)
    main(["beacon-run", "--scenario", scen, "--out", str(tmp_path / "run")])
    pattern = str(tmp_path / "run" / "results.jsonl")
    assert main(["stats", pattern, "--m", "16", "--out", str(tmp_path / "s")]) == EXIT_OK
    summary = json.loads((tmp_path / "s" / "stats.json").read_text())
    assert summary["field"] == "v" and summary["sessions"] == 40
    assert summary["payoff_total"] == 0
    assert main(["stats", pattern, "--m", "4"]) == EXIT_OK
    assert main(["stats", pattern, "--m", "8"]) == EXIT_VALIDATION
    capsys.readouterr()


def test_stats_missing_input(tmp_path, capsys):
    assert main(["stats", str(tmp_path / "none*.jsonl"), "--m", "16"]) == EXIT_VALIDATION
    assert "no result files" in capsys.readouterr().err


def test_epochs_command(tmp_path):
    scen = _small(tmp_path, "epochs", epochs={"count": 4, "stakes": [1, 1, 2], "roster_size": 4})
    assert main(["epochs", "--scenario", scen, "--seed", "3", "--out", str(tmp_path / "e")]) == EXIT_OK
    rows = (tmp_path / "e" / "seeds.csv").read_text().splitlines()
    assert rows[0] == "epoch,seed,next_seed,roster" and len(rows) == 5
    chained = [r.split(",") for r in rows[1:]]
    assert all(a[2] == b[1] for a, b in zip(chained, chained[1:]))
    freq = (tmp_path / "e" / "frequencies.csv").read_text().splitlines()
    assert freq[3].endswith("0.500000")
    _check_manifest(tmp_path / "e")


def test_epochs_requires_epoch_block(tmp_path, capsys):
    code = main(["epochs", "--scenario", str(SCENARIOS / "honest_commit.json"), "--out", str(tmp_path)])
    assert code == EXIT_VALIDATION
    assert "epochs" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["nope"], ["game-analyze"], ["stats", "x", "--m", "four"]])
def test_usage_errors_exit_validation(argv, capsys):
    assert main(argv) == EXIT_VALIDATION
    capsys.readouterr()
