import csv
import json

import pytest

from mimo_dof import ValidationError
from mimo_dof.cli import OUT_DIR_ENV, RunConfig, main

REGION = ["region", "--kind", "bc", "--m", "3", "--n", "2", "--alpha", "0.5", "0.5",
          "--beta", "1", "1"]
QUICK_SIM = ["simulate", "--m", "3", "--n", "2", "--alpha", "0.8", "0.8", "--target", "E*",
             "--T", "4", "--S", "10", "--trials", "20", "--seed", "5"]

GOLDEN_HEADERS = {
    "region_vertices.csv": "region,vertex_index,d1,d2",
    "region_halfplanes.csv": "region,label,a,b,c,redundant",
    "plan_ledger.csv": "unit,private_1,private_2,common,quantized,delta_com,ic_common_1,ic_common_2",
    "plan_slots.csv": None,
    "sim_rates.csv": "P,user,designed_rate,achieved_rate,margin_min,distortion",
}


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def header(path):
    return path.read_text().splitlines()[0]


class TestRegion:
    def test_vertices_include_the_symmetric_corner(self, tmp_path):
        assert main(REGION + ["--out-dir", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "region_vertices.csv")
        inner = {(round(float(r["d1"]), 9), round(float(r["d2"]), 9))
                 for r in rows if r["region"] == "inner"}
        assert (1.4, 1.4) in inner
        summary = json.loads((tmp_path / "region_summary.json").read_text())
        assert summary["case"] == "case 2"
        assert {p["label"] for p in summary["corner_points"]} == {"D*", "B*", "C*"}

    def test_square_antennas(self, tmp_path):
        assert main(["region", "--kind", "bc", "--m", "2", "--n", "2",
                     "--out-dir", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "region_summary.json").read_text())
        assert summary["case"] == "no CSIT needed"
        inner = {(float(r["d1"]), float(r["d2"])) for r in read_rows(tmp_path / "region_vertices.csv")
                 if r["region"] == "inner"}
        assert inner == {(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)}

    def test_malformed_exponent(self, tmp_path, capsys):
        rc = main(["region", "--alpha", "1.2", "0.5", "--out-dir", str(tmp_path)])
        assert rc == 2
        assert "alpha" in capsys.readouterr().err


class TestPlan:
    def test_estar_ledger(self, tmp_path):
        assert main(["plan", "--m", "3", "--n", "2", "--alpha", "0.8", "0.8", "--target", "E*",
                     "--out-dir", str(tmp_path)]) == 0
        rows = {r["unit"]: r for r in read_rows(tmp_path / "plan_ledger.csv")}
        assert float(rows["per_slot"]["common"]) == pytest.approx(1.0)
        assert rows["per_slot"]["ic_common_1"] == ""

    def test_inactive_target_exit_code(self, tmp_path, capsys):
        rc = main(["plan", "--alpha", "0.5", "0.5", "--target", "A*", "--out-dir", str(tmp_path)])
        assert rc == 3
        err = capsys.readouterr().err
        assert "C*" in err and "D*" in err

    def test_ic_split_columns(self, tmp_path):
        assert main(["plan", "--kind", "ic", "--alpha", "0.8", "0.8", "--target", "E*",
                     "--out-dir", str(tmp_path)]) == 0
        row = read_rows(tmp_path / "plan_ledger.csv")[0]
        assert float(row["ic_common_1"]) == pytest.approx(0.4)
        assert float(row["ic_common_2"]) == pytest.approx(0.6)


class TestSimulate:
    def test_fixed_seed_is_byte_identical(self, tmp_path):
        names = ("sim_rates.csv", "sim_report.json")
        assert main(QUICK_SIM + ["--out-dir", str(tmp_path)]) == 0
        first = {n: (tmp_path / n).read_bytes() for n in names}
        assert main(QUICK_SIM + ["--out-dir", str(tmp_path)]) == 0
        for n in names:
            assert first[n] and (tmp_path / n).read_bytes() == first[n]
        report = json.loads((tmp_path / "sim_report.json").read_text())
        assert {"d1_hat", "d2_hat", "stderr", "margins"} <= set(report)

    def test_single_point_ladder(self, tmp_path, capsys):
        assert main(QUICK_SIM + ["--snr", "1000", "--out-dir", str(tmp_path)]) == 2
        assert "SNR" in capsys.readouterr().err

    def test_summary_round_trips_to_run_config(self, tmp_path):
        assert main(QUICK_SIM + ["--out-dir", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "sim_report.json").read_text())
        rc = RunConfig.from_dict(report["config"])
        assert rc.to_dict() == report["config"]
        assert rc.target == "E*" and rc.seed == 5


def test_golden_headers(tmp_path):
    assert main(REGION + ["--out-dir", str(tmp_path)]) == 0
    assert main(["plan", "--alpha", "0.8", "0.8", "--target", "E*", "--out-dir", str(tmp_path)]) == 0
    assert main(QUICK_SIM + ["--out-dir", str(tmp_path)]) == 0
    for name, expected in GOLDEN_HEADERS.items():
        if expected is not None:
            assert header(tmp_path / name) == expected, name
    assert header(tmp_path / "plan_slots.csv").startswith("slot,")


class TestConfig:
    def test_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"m": 3, "n": 2, "alpha": [0.5, 0.5], "beta": [1, 1]}))
        assert main(["region", "--config", str(cfg), "--m", "4", "--out-dir", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "region_summary.json").read_text())
        assert summary["config"]["m"] == 4 and summary["config"]["alpha"] == [0.5, 0.5]

    def test_unknown_keys_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"m": 3, "antennas": 4}))
        assert main(["region", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2
        assert "antennas" in capsys.readouterr().err
        with pytest.raises(ValidationError):
            RunConfig.from_dict({"bogus": 1})

    def test_environment_sets_default_output(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "env_out"))
        assert main(REGION) == 0
        assert (tmp_path / "env_out" / "region_summary.json").exists()

    def test_unparseable_flags_exit_with_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["region", "--m", "three"])
        assert exc.value.code == 2
