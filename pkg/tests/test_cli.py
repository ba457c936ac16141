import json

import pytest

from penner_closed import cli
from penner_closed.cli import EXIT_FAILED, EXIT_INTERRUPTED, EXIT_OK, EXIT_USAGE, build_parser, main
from penner_closed.combinatorics import Triangulation
from penner_closed.report import RunReport


def report_rows(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.splitlines() if line.strip()]


class TestUsage:

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["triangulate"])

    @pytest.mark.parametrize("argv", [
        ["flip"],
        ["zero-locus"],
        ["sample", "--exact"],
        ["verify", "--exact"],
        ["verify", "--exact", "--scope", "lemmas"],
        ["gen", "--genus", "1"],
        ["verify", "--samples", "0"],
        ["verify", "--tolerance", "0"],
        ["fiber-check", "only-one.json"],
        ["zero-locus", "--edge", "5", "--x", "1.5"],
        ["sample", "--neg-triangle", "6"],
        ["length", "--edge", "18"],
    ])
    def test_rejected(self, argv):
        assert main(argv) == EXIT_USAGE

    def test_interrupt_is_not_success(self, monkeypatch):
        def interrupted(args, config, logger):
            raise KeyboardInterrupt
        monkeypatch.setitem(cli.COMMAND_TABLE, "gen", interrupted)
        assert main(["gen"]) == EXIT_INTERRUPTED

    def test_missing_config(self, tmp_path):
        assert main(["gen", "--config", str(tmp_path / "absent.yaml")]) == EXIT_USAGE

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("verify:\n  workers: 0\n")
        assert main(["gen", "--config", str(path)]) == EXIT_USAGE


class TestCommands:

    def test_gen(self, tmp_path):
        path = tmp_path / "tau.json"
        assert main(["gen", "--genus", "3", "--out", str(path)]) == EXIT_OK
        tau = Triangulation.load(str(path))
        assert tau.genus == 3
        assert len(tau.edges()) == 15

    def test_sample_then_roundtrip(self, tmp_path, capsys):
        path = tmp_path / "point.json"
        assert main(["sample", "--neg-triangle", "2", "--seed", "5", "--out", str(path)]) == EXIT_OK
        data = json.loads(path.read_text())
        assert data["eps"]["2"] == -1
        assert main(["roundtrip", "--input", str(path)]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[-1]["pass"] is True
        assert rows[1]["computed"] == {"negatives": [2]}

    def test_verify_lemmas(self, capsys):
        assert main(["verify", "--scope", "lemmas", "--seed", "7"]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[0]["command"] == ["verify", "--scope", "lemmas"]
        assert rows[0]["seed"] == 7
        names = {row["name"] for row in rows[1:-1]}
        assert {"lemma1", "lemma2", "lemma3", "half_turn"} <= names
        assert rows[-1]["failed"] == 0

    def test_verify_to_file(self, tmp_path):
        path = tmp_path / "report.jsonl"
        assert main(["verify", "--scope", "identities", "--out", str(path)]) == EXIT_OK
        report = RunReport.load(str(path))
        assert report.passed
        assert len(report.records) > 400

    def test_verify_exact_identities(self, capsys):
        assert main(["verify", "--exact", "--scope", "identities"]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[0]["command"] == ["verify", "--scope", "identities", "--exact"]
        names = {row["name"] for row in rows[1:-1]}
        assert "tetrahedron" in names and "lambda_oracle" not in names

    def test_verify_exact_ptolemy(self, capsys):
        assert main(["verify", "--exact", "--scope", "ptolemy", "--samples", "4"]) == EXIT_OK
        rows = report_rows(capsys)
        assert [row["name"] for row in rows[1:-1]] == ["double_flip"] * 4

    def test_verify_euler_genus3(self, capsys):
        assert main(["verify", "--scope", "euler", "--genus", "3"]) == EXIT_OK
        rows = report_rows(capsys)
        assert {row["input"]["n_minus"] for row in rows[1:-1]} == set(range(11))

    def test_flip(self, capsys):
        assert main(["flip", "--edge", "5", "--seed", "3"]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[1]["name"] == "ptolemy_vs_recovery"
        assert rows[1]["pass"] is True

    def test_flip_exact(self, capsys):
        assert main(["flip", "--edge", "8", "--exact", "--neg-triangle", "0"]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[1]["name"] == "double_flip"
        assert rows[1]["residual"] == 0

    def test_flip_exact_compares_signs(self, monkeypatch):
        monkeypatch.setattr(cli, "compare_points", lambda p, q: False)
        assert main(["flip", "--edge", "8", "--exact"]) == EXIT_FAILED

    def test_euler(self, capsys):
        assert main(["euler", "--neg-triangle", "4"]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[1]["expected"] == -2
        assert rows[1]["computed"] == -2

    def test_euler_exact(self, capsys):
        assert main(["euler", "--exact", "--neg-triangle", "1"]) == EXIT_OK
        assert report_rows(capsys)[1]["computed"] == -2

    def test_boundary(self):
        assert main(["boundary"]) == EXIT_OK
        assert main(["boundary", "--exact"]) == EXIT_OK

    def test_length(self, capsys):
        assert main(["length", "--edge", "5", "--edge", "13"]) == EXIT_OK
        rows = report_rows(capsys)
        assert [row["input"]["half_edge"] for row in rows[1:-1]] == [5, 13]
        assert all(row["computed"]["length"] > 0 for row in rows[1:-1])

    def test_zero_locus_fiber(self, tmp_path, capsys):
        p, q, r = (str(tmp_path / name) for name in ("p.json", "q.json", "r.json"))
        assert main(["zero-locus", "--edge", "5", "--x", "0.5", "--save", p]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[1]["computed"]["case"] == "generic"
        assert rows[1]["computed"]["x"] == pytest.approx(0.5)

        assert main(["zero-locus", "--edge", "5", "--x", "0.5", "--scale", "3", "--save", q]) == EXIT_OK
        assert main(["zero-locus", "--edge", "5", "--x", "0.5", "--seed", "99", "--save", r]) == EXIT_OK
        capsys.readouterr()

        assert main(["fiber-check", p, q]) == EXIT_OK
        rows = report_rows(capsys)
        assert rows[1]["computed"]["ratio"] == pytest.approx(3.0)

        # different free values: a failed check, not an error
        assert main(["fiber-check", p, r]) == EXIT_FAILED

    @pytest.mark.parametrize("edge", ["14", "2"])
    def test_zero_locus_coincident_sides(self, edge, capsys):
        assert main(["zero-locus", "--edge", edge, "--x", "0.25"]) == EXIT_OK

    def test_fiber_check_missing_file(self, tmp_path):
        missing = str(tmp_path / "absent.json")
        assert main(["fiber-check", missing, missing]) == EXIT_FAILED

    def test_pipeline(self, capsys):
        assert main(["pipeline", "--edge", "5", "--edge", "8", "--edge", "5", "--seed", "2"]) == EXIT_OK
        rows = report_rows(capsys)
        assert [row["name"] for row in rows[1:-1]] == ["pipeline_dual_route", "pipeline_flip_back"]

    def test_pipeline_exact(self, capsys):
        assert main(["pipeline", "--edge", "8", "--edge", "11", "--exact"]) == EXIT_OK
        rows = report_rows(capsys)
        assert [row["name"] for row in rows[1:-1]] == ["pipeline_flip_back"]
