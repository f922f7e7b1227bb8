import json

import pytest

from conftest import FIXTURE_DIR, random_program
from itbqc.cli import main
from itbqc.protocol import save_program


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestDemo:
    def test_plain_protocol(self, capsys):
        code, out, _ = run_cli(capsys, "demo", "--protocol", "1",
                               "--m", "1", "--l", "2", "--seed", "7")
        assert code == 0
        assert "fidelity          1.0000" in out
        assert "qubits to server  2" in out

    def test_blind_protocol_reports_pad(self, capsys):
        code, out, _ = run_cli(capsys, "demo", "--protocol", "2",
                               "--m", "2", "--l", "2", "--seed", "3", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["ok"] is True
        assert len(report["pad"]) == 2
        assert report["qubits_to_server"] == 4

    def test_seeded_json_is_byte_identical(self, capsys):
        _, first, _ = run_cli(capsys, "demo", "--protocol", "2",
                              "--m", "1", "--l", "3", "--seed", "11", "--json")
        _, second, _ = run_cli(capsys, "demo", "--protocol", "2",
                               "--m", "1", "--l", "3", "--seed", "11", "--json")
        assert first == second

    def test_early_halt_flag(self, capsys):
        code, out, _ = run_cli(capsys, "demo", "--m", "1", "--l", "64",
                               "--seed", "1", "--early-halt", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["rounds"] < 64 and report["ok"]

    def test_zero_m_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["demo", "--m", "0", "--l", "2"])
        assert exc.value.code == 2

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["demo", "--m", "1", "--l", "1", "--bogus"])
        assert exc.value.code == 2


class TestRun:
    def test_writes_reports_and_figures(self, capsys, tmp_path):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(capsys, "run", str(FIXTURE_DIR / "prog_n2_m1_J2.json"),
                               "--samples", "200", "--seed", "5",
                               "--out-dir", str(out_dir), "--json")
        assert code == 0
        report = json.loads(out)
        assert sum(report["histogram"].values()) == 200
        assert report["tv_distance_to_exact"] < 0.2
        for name in ("histogram.csv", "histogram.png", "transcript.jsonl", "report.json"):
            assert (out_dir / name).exists()
        header = (out_dir / "histogram.csv").read_text().splitlines()[0]
        assert header == "output,count,frequency,exact"

    def test_transcript_path_flag(self, capsys, tmp_path):
        path = tmp_path / "t.jsonl"
        code, _, _ = run_cli(capsys, "run", str(FIXTURE_DIR / "prog_n1_J2.json"),
                             "--samples", "5", "--transcript", str(path))
        assert code == 0
        lines = path.read_text().splitlines()
        assert json.loads(lines[0])["type"] == "params"

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "run", "no_such_program.json")
        assert code == 2
        assert "no_such_program" in err

    def test_schema_error_reports_field(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        obj = random_program(1, 1, 2, 2, seed=0).to_dict()
        obj["gates"][1][0] = {"m": 1, "level": 7, "numerators": [0, 1]}
        bad.write_text(json.dumps(obj))
        code, _, err = run_cli(capsys, "run", str(bad))
        assert code == 2
        assert "gates[1][0].level" in err


class TestVerify:
    def test_fixture_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", str(FIXTURE_DIR / "prog_n1_J2.json"))
        assert code == 0
        assert "OK" in out

    def test_wide_register_hits_cap(self, capsys, tmp_path):
        path = tmp_path / "wide.json"
        save_program(random_program(5, 1, 2, 2, seed=1), path)
        code, _, err = run_cli(capsys, "verify", str(path))
        assert code == 3
        assert "n <= 3" in err

    def test_branch_budget_hits_cap(self, capsys, tmp_path):
        path = tmp_path / "deep.json"
        save_program(random_program(2, 2, 2, 4, seed=2), path)
        code, _, err = run_cli(capsys, "verify", str(path))
        assert code == 3
        assert "sampling" in err


class TestBlindness:
    def test_certifies(self, capsys):
        code, out, _ = run_cli(capsys, "blindness", "--m", "1", "--l", "2",
                               "--trials", "2", "--seed", "0", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["max_trace_distance_to_mixed"] < 1e-9
        assert report["pairwise_view_distance"] < 1e-9

    def test_cap_exceeded(self, capsys):
        code, _, err = run_cli(capsys, "blindness", "--m", "2", "--l", "6")
        assert code == 3
        assert "cap" in err


class TestCosts:
    def test_table_and_files(self, capsys, tmp_path):
        out_dir = tmp_path / "costs"
        code, out, _ = run_cli(capsys, "costs", str(FIXTURE_DIR / "prog_n3_m3_J2.json"),
                               "--out-dir", str(out_dir))
        assert code == 0
        assert "qubits sent, measured" in out
        assert "gate-description bound" in out
        for name in ("costs.csv", "costs.png", "report.json"):
            assert (out_dir / name).exists()
        rows = (out_dir / "costs.csv").read_text().splitlines()
        assert rows[0].startswith("n,protocol_qubits")
        assert len(rows) >= 7  # header + trend through n=6

    def test_json_deterministic(self, capsys):
        _, first, _ = run_cli(capsys, "costs", str(FIXTURE_DIR / "prog_n1_J2.json"),
                              "--seed", "4", "--json")
        _, second, _ = run_cli(capsys, "costs", str(FIXTURE_DIR / "prog_n1_J2.json"),
                               "--seed", "4", "--json")
        assert first == second
        report = json.loads(first)["report"]
        assert report["measured_qubits_to_server"] == report["expected_qubits"]
