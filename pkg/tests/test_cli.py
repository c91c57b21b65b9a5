import json

from monadlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAlgebras:
    def test_none_on_two(self, capsys):
        code, out, _ = run(capsys, "algebras", "--s", "2", "--x", "2", "--method", "brute")
        assert code == 0
        assert out.startswith("0 algebras")

    def test_twelve_on_four(self, capsys):
        code, out, _ = run(
            capsys, "algebras", "--s", "2", "--x", "4", "--method", "transport"
        )
        assert code == 0
        assert out.startswith("12 algebras")

    def test_one_on_three_single_state(self, capsys):
        code, out, _ = run(capsys, "algebras", "--s", "1", "--x", "3")
        assert code == 0
        assert out.startswith("1 algebra ")

    def test_json_records(self, capsys):
        code, out, _ = run(
            capsys, "algebras", "--s", "2", "--x", "4", "--method", "transport",
            "--format", "json",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 12
        first = json.loads(lines[0])
        assert first["s_size"] == 2 and first["x_size"] == 4
        assert len(first["h"]) == 64

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "algebras.ndjson"
        code, _, _ = run(
            capsys, "algebras", "--s", "2", "--x", "1", "--out", str(target)
        )
        assert code == 0
        records = [json.loads(line) for line in target.read_text().splitlines()]
        assert len(records) == 1

    def test_ceiling_exit_code(self, capsys):
        code, _, err = run(
            capsys, "algebras", "--s", "2", "--x", "4", "--method", "brute"
        )
        assert code == 2
        assert "ceiling" in err

    def test_env_ceiling(self, capsys, monkeypatch):
        monkeypatch.setenv("MONADLAB_CEILING", "10")
        code, _, err = run(capsys, "algebras", "--s", "2", "--x", "2", "--method", "brute")
        assert code == 2 and "ceiling" in err

    def test_bad_env_ceiling(self, capsys, monkeypatch):
        monkeypatch.setenv("MONADLAB_CEILING", "many")
        code, _, err = run(capsys, "algebras", "--s", "2", "--x", "2")
        assert code == 2

    def test_empty_state_refused(self, capsys):
        code, _, err = run(capsys, "algebras", "--s", "0", "--x", "2")
        assert code == 2
        assert "nonempty" in err

    def test_bad_jobs(self, capsys):
        code, _, _ = run(capsys, "algebras", "--s", "2", "--x", "2", "--jobs", "0")
        assert code == 2

    def test_deterministic_output(self, capsys):
        _, out1, _ = run(capsys, "algebras", "--s", "2", "--x", "4",
                         "--method", "transport", "--format", "json")
        _, out2, _ = run(capsys, "algebras", "--s", "2", "--x", "4",
                         "--method", "transport", "--format", "json")
        assert out1 == out2


class TestVerify:
    def test_passes_small(self, capsys):
        code, out, _ = run(capsys, "verify", "--s", "1", "--max-x", "3")
        assert code == 0
        assert out.strip().endswith("PASSED")

    def test_json_report(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--s", "2", "--max-x", "2", "--format", "json"
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        assert report["carriers"]["2"]["count"] == 0

    def test_refuses_empty_state(self, capsys):
        code, _, err = run(capsys, "verify", "--s", "0", "--max-x", "2")
        assert code == 2
        assert "nonempty state object" in err

    def test_empty_state_diagnostic(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--s", "0", "--max-x", "2", "--diagnose-empty"
        )
        assert code == 0
        assert "carrier 1: 1 algebra(s)" in out
        assert "carrier 2: 0 algebra(s)" in out

    def test_report_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, _, _ = run(
            capsys, "verify", "--s", "1", "--max-x", "2", "--out", str(target)
        )
        assert code == 0
        assert json.loads(target.read_text())["passed"] is True


class TestEqual:
    def test_equal_terms(self, capsys):
        code, out, _ = run(capsys, "equal", "--s", "2", "u0(u1(x0))", "u1(x0)")
        assert code == 0 and out.strip() == "equal"

    def test_different_terms(self, capsys):
        code, out, _ = run(capsys, "equal", "--s", "2", "x0", "u0(x0)")
        assert code == 1 and out.strip() == "different"

    def test_parse_error_position(self, capsys):
        code, _, err = run(capsys, "equal", "--s", "2", "l(x0)", "x0")
        assert code == 2
        assert "position" in err

    def test_explicit_vars(self, capsys):
        code, _, _ = run(capsys, "equal", "--s", "2", "--vars", "3", "x0", "x0")
        assert code == 0


class TestRewrite:
    def test_normal_form(self, capsys):
        code, out, _ = run(capsys, "rewrite", "--s", "2", "l(u0(x0),u1(x0))")
        assert code == 0 and out.strip() == "x0"

    def test_json(self, capsys):
        code, out, _ = run(
            capsys, "rewrite", "--s", "2", "--format", "json", "u0(u1(x0))"
        )
        payload = json.loads(out)
        assert code == 0 and payload["normal"] == "u1(x0)"

    def test_step_ceiling(self, capsys):
        code, _, err = run(
            capsys, "rewrite", "--s", "2", "--max-steps", "1", "u0(u1(u0(x0)))"
        )
        assert code == 2 and "rewrite limit" in err


class TestFree:
    def test_counts(self, capsys):
        code, out, _ = run(capsys, "free", "--s", "2", "--vars", "1")
        assert code == 0 and out.startswith("4 classes")
        code, out, _ = run(capsys, "free", "--s", "2", "--vars", "2")
        assert code == 0 and out.startswith("16 classes")
        code, out, _ = run(capsys, "free", "--s", "1", "--vars", "2")
        assert code == 0 and out.startswith("2 classes")

    def test_json(self, capsys):
        code, out, _ = run(
            capsys, "free", "--s", "2", "--vars", "1", "--format", "json"
        )
        payload = json.loads(out)
        assert code == 0
        assert payload["classes"] == 4 and payload["saturated"] is True
