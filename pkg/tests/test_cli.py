"""Command line tests: row output, option precedence, exit codes, and
byte-identical reruns."""

import json
import subprocess
import sys

import pytest

from posverif.cli import (
    CSV_HEADER,
    DEFAULT_SEED,
    SWEEP_POSITIONS,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    return [dict(zip(CSV_HEADER.split(","), line.split(",")))
            for line in lines[1:]]


class TestCompleteness:
    def test_default_sweep_positions(self, capsys):
        # the sweep needs enough trials that a stray verification miss
        # cannot push the interval below the 1 - 2^-9 expectation
        code, out, _ = run_cli(capsys, "completeness", "--trials", "300")
        rows = parse_csv(out)
        assert code == 0
        assert [r["experiment"] for r in rows] == [
            f"completeness@{p}" for p in SWEEP_POSITIONS]
        assert all(r["pass"] == "true" for r in rows)
        assert rows[0]["theory"] == "0.998046875"

    def test_single_position(self, capsys):
        code, out, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                               "--trials", "40")
        rows = parse_csv(out)
        assert code == 0
        assert len(rows) == 1
        assert rows[0]["experiment"] == "completeness@3/2"

    def test_outside_position_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "completeness", "--pos", "5/2",
                               "--trials", "10")
        assert code == 2
        assert "error:" in err

    def test_hashed_variant(self, capsys):
        code, out, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                               "--trials", "40", "--hashed", "--k", "2")
        rows = parse_csv(out)
        assert code == 0
        assert rows[0]["k"] == "2"

    def test_workers_do_not_change_counts(self, capsys):
        _, serial, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                               "--trials", "50")
        _, pooled, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                               "--trials", "50", "--workers", "3")
        assert serial == pooled


class TestAttack:
    @pytest.mark.parametrize("name,trials", [
        ("guess", 300),
        ("forward_compiled_guess", 200),
        ("teleport", 120),
        ("classical_forward", 300),
    ])
    def test_each_attack_row_passes(self, capsys, name, trials):
        code, out, _ = run_cli(capsys, "attack", "--name", name,
                               "--trials", str(trials))
        rows = parse_csv(out)
        assert code == 0
        assert rows[0]["experiment"] == f"attack_{name}"
        assert rows[0]["pass"] == "true"

    def test_unknown_attack_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "attack", "--name", "nope")
        assert code == 2
        assert "unknown attack" in err

    def test_missing_name_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "attack")
        assert code == 2

    def test_interval_miss_exits_1(self, capsys):
        # seed 0 with 8 trials lands only one success, so the interval
        # misses the guessing expectation deterministically
        code, out, _ = run_cli(capsys, "attack", "--name", "guess",
                               "--trials", "8", "--seed", "0")
        rows = parse_csv(out)
        assert code == 1
        assert rows[0]["pass"] == "false"


class TestNonlocal:
    def test_row_triple(self, capsys):
        code, out, _ = run_cli(capsys, "nonlocal", "--name",
                               "measure_and_guess", "--trials", "600")
        rows = parse_csv(out)
        assert code == 0
        assert [r["experiment"] for r in rows] == [
            "game_measure_and_guess",
            "reduced_measure_and_guess",
            "reduction_bound_measure_and_guess",
        ]
        bound = float(rows[2]["theory"])
        assert float(rows[2]["rate"]) >= bound

    def test_unknown_strategy_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "nonlocal", "--name", "psychic")
        assert code == 2
        assert "unknown strategy" in err


class TestPoq:
    def test_rows_and_order_check(self, capsys):
        code, out, _ = run_cli(capsys, "poq", "--trials", "200")
        rows = parse_csv(out)
        assert code == 0
        assert [r["experiment"] for r in rows] == [
            "poq_quantum", "poq_classical", "poq_order"]
        assert rows[2]["rate"] == "1"
        quantum = float(rows[0]["rate"])
        classical = float(rows[1]["rate"])
        assert quantum > classical


class TestTrace:
    def test_json_lines_schema(self, capsys):
        code, out, _ = run_cli(capsys, "trace", "--seed", "5")
        assert code == 0
        events = [json.loads(line) for line in out.strip().split("\n")]
        assert all(set(e) == {"time", "kind", "party", "digest"}
                   for e in events)
        assert {e["kind"] for e in events} <= {"alarm", "emit", "recv"}

    def test_attack_trace(self, capsys):
        code, out, _ = run_cli(capsys, "trace", "--seed", "5",
                               "--name", "guess")
        assert code == 0
        assert out

    def test_deterministic(self, capsys):
        _, first, _ = run_cli(capsys, "trace", "--seed", "9")
        _, second, _ = run_cli(capsys, "trace", "--seed", "9")
        assert first == second


class TestOutputHandling:
    def test_out_file_and_rerun_identical(self, tmp_path, capsys):
        target = tmp_path / "rows.csv"
        argv = ["completeness", "--pos", "3/2", "--trials", "40",
                "--out", str(target)]
        assert main(argv) == 0
        first = target.read_bytes()
        assert main(argv) == 0
        assert target.read_bytes() == first

    def test_json_format_sorted_keys(self, capsys):
        _, out, _ = run_cli(capsys, "poq", "--trials", "50",
                            "--format", "json")
        payload = json.loads(out)
        row = payload["rows"][0]
        assert list(row) == sorted(row)

    def test_bad_format_from_config_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("format=yaml\n")
        code, _, err = run_cli(capsys, "poq", "--trials", "10",
                               "--config", str(cfg))
        assert code == 2


class TestOptionPrecedence:
    def test_config_file_supplies_values(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# experiment defaults\ntrials=30\nseed=4\nformat=json\n")
        code, out, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                               "--config", str(cfg))
        assert code == 0
        payload = json.loads(out)
        assert payload["rows"][0]["trials"] == 30

    def test_flag_overrides_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("trials=30\n")
        code, out, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                               "--config", str(cfg), "--trials", "20")
        rows = parse_csv(out)
        assert rows[0]["trials"] == "20"

    def test_env_seed_used_when_unset(self, capsys, monkeypatch):
        monkeypatch.setenv("POSVERIF_SEED", "77")
        _, from_env, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                                 "--trials", "30")
        monkeypatch.delenv("POSVERIF_SEED")
        _, from_flag, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                                  "--trials", "30", "--seed", "77")
        assert from_env == from_flag

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("POSVERIF_SEED", "77")
        _, out, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                            "--trials", "30", "--seed", str(DEFAULT_SEED))
        monkeypatch.delenv("POSVERIF_SEED")
        _, default_out, _ = run_cli(capsys, "completeness", "--pos", "3/2",
                                    "--trials", "30")
        assert out == default_out

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("velocity=9\n")
        code, _, err = run_cli(capsys, "completeness", "--config", str(cfg))
        assert code == 2
        assert "unknown key" in err

    def test_malformed_config_line_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("trials\n")
        code, _, _ = run_cli(capsys, "completeness", "--config", str(cfg))
        assert code == 2

    def test_missing_config_file_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "completeness", "--config",
                             "/nonexistent/run.cfg")
        assert code == 2

    def test_bad_workers_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "poq", "--trials", "10",
                             "--workers", "0")
        assert code == 2


class TestModuleEntryPoint:
    def test_python_dash_m(self):
        proc = subprocess.run(
            [sys.executable, "-m", "posverif.cli", "poq", "--trials", "30"],
            capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0
        assert proc.stdout.startswith(CSV_HEADER)
