import json
import os

import pytest

from fockspace.cli import main, parse_args


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    # no stray .env or FOCKSPACE_* variables from the developer's shell
    monkeypatch.chdir(tmp_path)
    for key in ("FOCKSPACE_WORKERS", "FOCKSPACE_MAX_BOXES"):
        monkeypatch.delenv(key, raising=False)
    yield
    # load_dotenv writes straight into os.environ
    for key in ("FOCKSPACE_WORKERS", "FOCKSPACE_MAX_BOXES"):
        os.environ.pop(key, None)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestParser:
    def test_subcommand_is_required(self, capsys):
        code, _, _ = run(capsys)
        assert code == 2

    def test_unset_flags_stay_none(self):
        args = parse_args(["enumerate"])
        assert args.charge is None and args.max_boxes is None

    def test_audit_needs_a_target(self, capsys):
        code, _, _ = run(capsys, "audit", "--charge", "0")
        assert code == 2


class TestEnumerate:
    def test_two_boxes(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--charge", "0", "--max-boxes", "2")
        assert code == 0
        assert out == "0;\n0;-1\n0;-2\n0;-1,-1\n"

    def test_count_only(self, capsys):
        assert run(capsys, "enumerate", "--count-only", "--max-boxes", "6")[1] == "30\n"

    def test_vacuum_of_charge_three(self, capsys):
        assert run(capsys, "enumerate", "--charge", "3", "--max-boxes", "0")[1] == "3;\n"

    def test_details(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--max-boxes", "1", "--details")
        first, second = out.splitlines()
        assert first.split("\t")[:4] == ["0;", "0", "0", ""]
        assert second.split("\t")[:4] == ["0;-1", "1", "-1,1", "0"]

    def test_json(self, capsys):
        _, out, _ = run(capsys, "enumerate", "--max-boxes", "1", "--format", "json")
        data = json.loads(out)
        assert [entry["diagram"] for entry in data] == ["0;", "0;-1"]
        assert data[1]["concave"] == [-1, 1]

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "basis.txt"
        code, out, _ = run(capsys, "enumerate", "--max-boxes", "1", "--out", str(target))
        assert code == 0
        assert out == ""
        assert target.read_text() == "0;\n0;-1\n"


class TestAct:
    def test_word(self, capsys):
        assert run(capsys, "act", "--expr", "f[1]*f[0]", "--diagram", "0;")[1] == "1 * (0;-1,-1)\n"

    def test_folded(self, capsys):
        assert run(capsys, "act", "--expr", "Efold[1]", "--diagram", "0;-1,-1")[1] == "1 * (0;-1)\n"

    def test_zero(self, capsys):
        assert run(capsys, "act", "--expr", "e[0]", "--diagram", "0;")[1] == "0\n"

    def test_combination(self, capsys):
        _, out, _ = run(capsys, "act", "--expr", "f[0] - s*f[0] + a[0]", "--diagram", "0;")
        assert out == "1*r^(1) * (0;) + (-1*s^(1) + 1) * (0;-1)\n"

    def test_bad_diagram(self, capsys):
        code, out, err = run(capsys, "act", "--expr", "e[0]", "--diagram", "0;1")
        assert code == 2
        assert out == ""
        assert "error:" in err and "position 2" in err

    def test_bad_expression(self, capsys):
        code, _, err = run(capsys, "act", "--expr", "e[0] +", "--diagram", "0;")
        assert code == 2
        assert "position 6" in err


class TestAudit:
    def test_glinf_holds(self, capsys):
        code, out, _ = run(capsys, "audit", "--suite", "glinf", "--charge", "0", "--max-boxes", "2", "--no-meta")
        data = json.loads(out)
        assert code == 0
        assert data["suite"] == "glinf"
        assert {r["status"] for r in data["results"]} == {"holds"}
        assert "meta" not in data

    def test_no_meta_is_byte_stable(self, capsys):
        argv = ("audit", "--suite", "brackets", "--charges=0,3", "--max-boxes", "2", "--no-meta")
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second

    def test_meta_by_default(self, capsys):
        _, out, _ = run(capsys, "audit", "--relation", "a[0]*inv(a[0]) - 1", "--max-boxes", "1")
        assert set(json.loads(out)["meta"]) == {"version", "seconds"}

    def test_failing_relation_exit_code(self, capsys):
        code, out, _ = run(capsys, "audit", "--relation", "f[0]", "--max-boxes", "1", "--no-meta")
        assert code == 1
        (result,) = json.loads(out)["results"]
        assert result["counterexample"] == {"diagram": "0;", "residual": "1 * (0;-1)"}

    def test_affine_carries_central_and_vacuum(self, capsys):
        code, out, _ = run(
            capsys, "audit", "--suite", "affine", "--l", "2", "--charge", "0", "--max-boxes", "2", "--no-meta"
        )
        data = json.loads(out)
        assert code == 1
        assert data["config"]["preset"] == "paper"
        assert data["vacuum"]["0"]["Om"] == ["1*s^(-1)", "1", "1"]
        assert set(data["central"]["0"]) == {"gamma", "gammap", "gamma_gammap"}

    def test_narrow_window(self, capsys):
        code, _, err = run(capsys, "audit", "--suite", "glinf", "--max-boxes", "2", "--window=-1,1")
        assert code == 2
        assert "window" in err


class TestCalibrate:
    def test_small_grid(self, capsys):
        code, out, _ = run(capsys, "calibrate", "--grid=-1,0,1", "--charge", "0", "--max-boxes", "2", "--no-meta")
        data = json.loads(out)
        assert code == 0
        assert data["grid"] == ["-1", "0", "1"]
        assert data["candidates"] == 6561
        assert data["survivors"] == [
            {"$0": {"cc": "1*r^(1)", "cv": "1*s^(1)"}, "$1": {"cc": "1*s^(1)", "cv": "1*r^(1)"}}
        ]

    def test_budget(self, capsys):
        code, out, err = run(capsys, "calibrate", "--budget", "10", "--max-boxes", "1")
        assert code == 2
        assert out == ""
        assert "budget" in err

    def test_bad_grid(self, capsys):
        code, _, err = run(capsys, "calibrate", "--grid=1/3", "--max-boxes", "1")
        assert code == 2
        assert "grid" in err


class TestCharacter:
    def test_rank_two(self, capsys):
        code, out, _ = run(capsys, "character", "--l", "2", "--charge", "0", "--max-boxes", "2")
        assert code == 0
        assert json.loads(out) == {"(0,0,0)": 1, "(1,0,0)": 1, "(1,1,0)": 2}


class TestConfigLayers:
    def test_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("FOCKSPACE_MAX_BOXES", "1")
        assert run(capsys, "enumerate", "--count-only")[1] == "2\n"

    def test_dotenv_file(self, capsys, tmp_path):
        (tmp_path / ".env").write_text("FOCKSPACE_MAX_BOXES=2\n")
        assert run(capsys, "enumerate", "--count-only")[1] == "4\n"

    def test_config_file_beats_environment(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("FOCKSPACE_MAX_BOXES", "1")
        path = tmp_path / "run.cfg"
        path.write_text("max_boxes = 3\n")
        assert run(capsys, "enumerate", "--count-only", "--config", str(path))[1] == "7\n"

    def test_flags_beat_config_file(self, capsys, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("max-boxes=3\ncharge=2\n")
        _, out, _ = run(capsys, "enumerate", "--config", str(path), "--max-boxes", "0")
        assert out == "2;\n"

    def test_unknown_key(self, capsys, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("colour=red\n")
        code, _, err = run(capsys, "enumerate", "--config", str(path))
        assert code == 2
        assert "colour" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "enumerate", "--config", str(tmp_path / "absent.cfg"))
        assert code == 2
        assert "does not exist" in err
