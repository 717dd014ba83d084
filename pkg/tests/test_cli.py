import csv
import io
import json
import math
import subprocess
import sys

import pytest

from resum import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


class TestParsing:
    @pytest.mark.parametrize("text,value", [("-3+0i", -3), ("2+2i", 2 + 2j), ("i", 1j), ("-i", -1j),
                                            ("1.5", 1.5), ("3-4j", 3 - 4j), ("1e-3i", 1e-3j)])
    def test_complex(self, text, value):
        assert cli.parse_complex(text) == value

    @pytest.mark.parametrize("text", ["abc", "nan", "inf", "1+"])
    def test_bad_complex(self, text):
        with pytest.raises(cli.ValidationError):
            cli.parse_complex(text)

    def test_k(self):
        assert cli.parse_k("1..5") == [1, 2, 3, 4, 5]
        assert cli.parse_k("2,7,3..4") == [2, 7, 3, 4]
        with pytest.raises(cli.ValidationError):
            cli.parse_k("0..2")

    def test_grid(self):
        pts = cli.parse_grid("0:1:3,-1:1:2")
        assert pts == [complex(0, -1), complex(0, 1), complex(0.5, -1), complex(0.5, 1),
                       complex(1, -1), complex(1, 1)]
        with pytest.raises(cli.ValidationError):
            cli.parse_grid("0:1:1001,0:1:1000")
        with pytest.raises(cli.ValidationError):
            cli.parse_grid("0:1:3")

    def test_model_spec(self):
        m = cli.parse_model_spec("hurwitz:a=2,b=0.5")
        assert m.terms[0].density.params == {"a": 2.0, "b": 0.5}
        for bad in ("nope", "hurwitz:a", "hurwitz:c=1", "hurwitz:b=-1"):
            with pytest.raises(cli.ValidationError):
                cli.parse_model_spec(bad)

    def test_tol(self, monkeypatch):
        monkeypatch.delenv("RESUM_TOL", raising=False)
        assert cli.resolve_tol(None) == 1e-8
        monkeypatch.setenv("RESUM_TOL", "1e-11")
        assert cli.resolve_tol(None) == 1e-11
        assert cli.resolve_tol(1e-4) == 1e-4
        for bad in (1e-15, 0.1):
            with pytest.raises(cli.ValidationError):
                cli.resolve_tol(bad)


class TestEmit:
    def test_empty_creates_no_file(self, tmp_path):
        path = tmp_path / "out.csv"
        with pytest.raises(cli.ValidationError):
            cli.emit([], cli.EVAL_COLUMNS, "csv", str(path))
        assert not path.exists()

    def test_one_row(self, tmp_path):
        path = tmp_path / "out.csv"
        cli.emit([(1.0, 0.0, 0.1, 0.0, 1e-12)], cli.EVAL_COLUMNS, "csv", str(path))
        lines = path.read_text().splitlines()
        assert lines == ["re_z,im_z,re_f,im_f,abs_err", "1.0,0.0,0.1,0.0,1e-12"]

    def test_float_format_round_trips(self):
        x = 0.1 + 0.2
        assert cli.fmt(x) == "0.30000000000000004" and float(cli.fmt(x)) == x
        assert cli.fmt(7) == "7"

    def test_json(self, tmp_path):
        path = tmp_path / "out.json"
        cli.emit([(1.0, 2.0, 3.0, 4.0, 5.0)], cli.EVAL_COLUMNS, "json", str(path),
                 {"model": "m", "tol": 1e-8})
        doc = json.loads(path.read_text())
        assert doc["metadata"]["version"] and doc["metadata"]["model"] == "m"
        assert doc["results"] == [dict(zip(cli.EVAL_COLUMNS, (1.0, 2.0, 3.0, 4.0, 5.0)))]


class TestCommands:
    def test_eval_example(self, capsys):
        code, out, _ = run(["eval", "--model", "hurwitz:a=1,b=1", "--point", "-3+0i"], capsys)
        assert code == 0
        header, row = rows_of(out)
        assert header == list(cli.EVAL_COLUMNS)
        assert abs(float(row[2]) - (-1 + math.log(4) / 3)) < 1e-8
        assert float(row[2]) == pytest.approx(-0.537902, abs=1e-6)

    def test_coeffs_example(self, capsys):
        code, out, _ = run(["coeffs", "--model", "hurwitz:a=1,b=1", "--k", "1..5"], capsys)
        assert code == 0
        rows = rows_of(out)
        assert rows[0] == ["k", "re_c", "im_c", "abs_err"]
        for k, row in enumerate(rows[1:], start=1):
            assert int(row[0]) == k and abs(float(row[1]) - 1 / (k + 1)) < 1e-10

    def test_grid_of_100(self, tmp_path, capsys):
        path = tmp_path / "g.csv"
        code, _, _ = run(["eval", "--model", "hurwitz:a=1,b=1", "--grid", "-3:-1:10,-1:1:10",
                          "-o", str(path)], capsys)
        assert code == 0
        assert len(path.read_text().splitlines()) == 101

    def test_deterministic(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert run(["eval", "--model", "logmix:b=2", "--grid", "-2:-0.5:4,0.1:2:3",
                        "-o", str(p)], capsys)[0] == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_corpus(self, capsys):
        code, out, _ = run(["corpus"], capsys)
        rows = rows_of(out)
        assert code == 0
        assert rows[0] == ["model", "check", "max_residual", "limit", "passed"]
        assert all(r[-1] == "True" for r in rows[1:])
        assert {r[0].split(":")[0] for r in rows[1:]} == {"hurwitz", "logmix", "stirling_f3", "exp_sqrt"}

    def test_model_file_and_borel(self, tmp_path, capsys):
        path = tmp_path / "alt.json"
        path.write_text(json.dumps({"terms": [{"a": [-1, 0], "density": {
            "builtin": "hurwitz", "params": {"a": 1, "b": 1}}}], "f0": 1}))
        code, out, _ = run(["borel", "--model-file", str(path), "--x", "5,10", "--format", "json"],
                           capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["results"][0]["re_value"] == pytest.approx(0.18380891146129671, abs=1e-8)

    def test_jumps_and_singularity(self, capsys):
        code, out, _ = run(["jumps", "--model", "hurwitz:a=1,b=0.5", "--t", "1.5,3"], capsys)
        assert code == 0 and all(float(r[-1]) < 1e-6 for r in rows_of(out)[1:])
        code, out, _ = run(["singularity", "--model", "hurwitz:a=1,b=0.5", "--format", "json"], capsys)
        assert code == 0 and json.loads(out)["metadata"]["bounded"] is True

    def test_scan(self, capsys):
        code, out, _ = run(["scan", "--model", "hurwitz:a=1,b=1", "--directions", "-2,3"], capsys)
        assert code == 0 and len(rows_of(out)) == 7

    def test_env_tol(self, capsys, monkeypatch):
        monkeypatch.setenv("RESUM_TOL", "1e-6")
        code, out, _ = run(["coeffs", "--model", "hurwitz", "--k", "1", "--format", "json"], capsys)
        assert code == 0 and json.loads(out)["metadata"]["tol"] == 1e-6


class TestExitCodes:
    @pytest.mark.parametrize("args", [
        ["eval", "--model", "hurwitz", "--point", "1"],          # on the cut
        ["eval", "--model", "hurwitz", "--point", "-1", "--tol", "1"],
        ["eval", "--model", "nope", "--point", "-1"],
        ["eval", "--point", "-1"],
        ["eval", "--model", "hurwitz"],
        ["eval", "--model", "hurwitz", "--grid", "0:1:2000,0:1:1000"],
        ["coeffs", "--model", "hurwitz", "--k", "x"],
        ["eval", "--bogus"],
        ["borel", "--model", "hurwitz", "--x", "-1"],
    ])
    def test_validation(self, args, capsys):
        assert run(args, capsys)[0] == cli.EXIT_VALIDATION

    def test_usage_errors_and_help(self, capsys):
        assert cli.main(["nosuchcommand"]) == cli.EXIT_VALIDATION
        assert cli.main([]) == cli.EXIT_VALIDATION
        assert cli.main(["--version"]) == 0
        assert "resum" in capsys.readouterr().out

    def test_numerical(self, capsys):
        assert run(["borel", "--model", "hurwitz", "--x", "2"], capsys)[0] == cli.EXIT_NUMERICAL
        assert run(["singularity", "--model", "logmix:b=2"], capsys)[0] == cli.EXIT_NUMERICAL

    def test_io(self, tmp_path, capsys):
        bad = str(tmp_path / "missing" / "x.csv")
        assert run(["eval", "--model", "hurwitz", "--point", "-1", "-o", bad], capsys)[0] == cli.EXIT_IO
        assert run(["eval", "--model-file", str(tmp_path / "none.json"), "--point", "-1"],
                   capsys)[0] == cli.EXIT_IO

    def test_bad_model_file(self, tmp_path, capsys):
        path = tmp_path / "m.json"
        path.write_text("{not json")
        assert run(["eval", "--model-file", str(path), "--point", "-1"], capsys)[0] == 1
        path.write_text(json.dumps({"terms": [{"a": [1, 0], "density": {"builtin": "zzz"}}]}))
        assert run(["eval", "--model-file", str(path), "--point", "-1"], capsys)[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "resum", "coeffs", "--model", "hurwitz", "--k", "1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[1].startswith("1,0.5")
