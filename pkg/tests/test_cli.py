import json
import subprocess
import sys

import pytest

from urel.cli import main
from urel.corpus import corpus_path

LEFT = str(corpus_path("fig3_left.imp"))
LEFT_PROOF = str(corpus_path("fig3_left.proof"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestRun:
    def test_then_branch(self, capsys):
        code, out, _ = run(capsys, "run", LEFT, "--state", "x=1,low=0", "--format", "json")
        assert code == 0
        assert json.loads(out)["state"] == {"x": 1, "low": 1}

    def test_fuel_exhausted(self, capsys):
        code, out, _ = run(capsys, "run", "while true do skip", "--fuel", "5")
        assert code == 2 and "fuel exhausted" in out

    def test_bad_state(self, capsys):
        code, _, err = run(capsys, "run", "skip", "--state", "x")
        assert code == 2 and "bad state binding" in err


class TestOracle:
    def test_invalid_with_pair(self, capsys):
        code, out, _ = run(capsys, "oracle", "x := 1", "skip", "--pre", "true", "--post", "x<1> == 2",
                           "--format", "json")
        assert code == 1
        data = json.loads(out)
        assert data["status"] == "invalid"
        assert data["pair"][0]["x"] == 2

    def test_valid(self, capsys):
        code, out, _ = run(capsys, "oracle", LEFT, "--pre", "low<1> == low<2>", "--post",
                           "low<1> == 1 && low<2> == 0 && x<1> == 1 && x<2> == 0", "--range", "0..1")
        assert code == 0 and "valid" in out

    def test_unknown(self, capsys):
        code, _, _ = run(capsys, "oracle", "while x = 1 do skip", "skip", "--pre", "true",
                         "--post", "x<1> == 1", "--range", "0..1", "--fuel", "2")
        assert code == 2

    def test_per_variable_range(self, capsys):
        code, out, _ = run(capsys, "oracle", "skip", "--pre", "true", "--post", "true",
                           "--range", "x=3..4", "--post", "x<1> >= 3", "--format", "json")
        assert json.loads(out)["domain"]["values"] == {"x": [3, 4]}

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "oracle", "x := ", "--pre", "true", "--post", "true")
        assert code == 2 and "parse error" in err and "line 1" in err


class TestCheck:
    def test_left_proof(self, capsys):
        code, out, _ = run(capsys, "check", LEFT_PROOF, "--range", "0..1", "--fuel", "16")
        assert code == 0 and "accepted" in out

    def test_json(self, capsys):
        code, out, _ = run(capsys, "check", str(corpus_path("fig3_right.proof")), "--format", "json")
        data = json.loads(out)
        assert code == 0 and data["schema"] == "urel.check/1" and data["accepted"]

    def test_rejected(self, capsys, tmp_path):
        bad = tmp_path / "bad.proof"
        bad.write_text("rule Skip { conclusion: < true > skip , x := 1 < x<2> == 2 >; }")
        code, out, _ = run(capsys, "check", str(bad), "--range", "0..2")
        assert code == 1 and "FAIL" in out

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check", "/nonexistent.proof")
        assert code == 2 and err


class TestDecomp:
    def test_left(self, capsys):
        code, out, _ = run(capsys, "decomp", LEFT, "--pre", "low<1> == low<2>",
                           "--post", "low<1> == 1 && low<2> == 0", "--range", "0..1", "--format", "json")
        data = json.loads(out)
        assert code == 0
        assert all(v["holds"] for v in data["checks"].values())
        assert len(data["decomp_pairs"]) == 2

    def test_skipped(self, capsys):
        code, _, _ = run(capsys, "decomp", "while x = 1 do skip", "--pre", "true", "--post", "true",
                         "--range", "0..1", "--fuel", "2")
        assert code == 2


class TestHunt:
    def test_left(self, capsys):
        code, out, _ = run(capsys, "hunt", LEFT, "--low", "low", "--range", "0..1", "--format", "json")
        data = json.loads(out)
        assert code == 0 and data["certified"]
        assert data["witness"]["t"]["low"] != data["witness"]["t2"]["low"]

    def test_nothing_found(self, capsys):
        code, out, _ = run(capsys, "hunt", "low := 0", "--range", "0..1")
        assert code == 1 and "no violation found at this bound" in out

    def test_direct_pair(self, capsys):
        code, out, _ = run(capsys, "hunt", str(corpus_path("fig3_middle_full.imp")),
                           "--pair", "n=2000000", "n=2000000,high=1", "--format", "json")
        data = json.loads(out)
        assert code == 0 and data["mode"] == "direct"

    def test_jobs_same_output(self, capsys):
        args = ["hunt", str(corpus_path("fig3_middle.imp")), "--range", "0..2", "--format", "json"]
        _, one, _ = run(capsys, *args)
        _, many, _ = run(capsys, *args, "--jobs", "2")
        assert one == many


def test_output_is_deterministic(capsys):
    args = ["hunt", LEFT, "--range", "0..1"]
    assert run(capsys, *args) == run(capsys, *args)


def test_timings_only_on_request(capsys):
    _, plain, _ = run(capsys, "run", "skip")
    _, timed, _ = run(capsys, "run", "skip", "--timings")
    assert "time" not in plain and timed.startswith(plain.rstrip("\n"))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "urel", "run", "x := 2"], capture_output=True, text=True)
    assert proc.returncode == 0 and '"x": 2' in proc.stdout


def test_subcommand_required(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
