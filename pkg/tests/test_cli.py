import csv
import io
import json

import pytest

from polyquery import algorithms as alg
from polyquery.cli import main
from polyquery.qsim import Circuit


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def summary(err: str) -> dict:
    return json.loads(err.strip().splitlines()[-1])


def dump(tmp_path, name, circuit) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(circuit.to_json()))
    return str(path)


class TestMeasures:
    def test_or4(self, capsys):
        code, out, err = run(capsys, "measures", "--family", "OR", "--n", "4", "--format", "json")
        d = json.loads(out)
        assert code == 0
        assert (d["deg"], d["bs"], d["c1"], d["d"]) == (4, 4, 1, 4)
        assert summary(err) == {"command": "measures", "failed_checks": [], "passed": True}

    def test_parity4(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "measures", "--family", "parity", "--n", "4")
        assert code == 0 and json.loads(out)["adeg"] == 4

    def test_constant_table(self, capsys, tmp_path):
        path = tmp_path / "const.json"
        path.write_text(json.dumps({"n": 3, "bits": "ff"}))
        code, out, _ = run(capsys, "measures", "--table", str(path), "--format", "json")
        d = json.loads(out)
        assert code == 0
        assert all(d[k] == 0 for k in ("deg", "adeg", "bs", "c", "d"))
        assert d["gamma"] == "undefined"

    def test_markdown_default(self, capsys):
        code, out, _ = run(capsys, "measures", "--family", "MAJORITY", "--n", "3")
        assert code == 0 and "|" in out

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "measures", "--table", "/no/such/file.json")
        assert code == 2
        assert summary(err)["passed"] is False

    def test_no_function(self, capsys):
        code, _, _ = run(capsys, "measures")
        assert code == 2


class TestEnumerate:
    def test_exhaustive_n3(self, capsys):
        code, out, err = run(capsys, "enumerate", "--n", "3", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert len(rows) == 256
        s = summary(err)
        assert s["functions"] == 256 and not any(s["violations"].values())

    def test_sampled_n6(self, capsys):
        code, _, err = run(capsys, "enumerate", "--n", "6", "--source", "sampled", "--count", "1000",
                           "--no-adeg", "--format", "json")
        s = summary(err)
        assert code == 0
        assert s["functions"] == 1000 and not any(s["violations"].values())

    def test_families(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--n", "5", "--source", "families", "--format", "json")
        assert code == 0 and json.loads(out)


class TestTable1:
    def test_consistent(self, capsys):
        code, out, _ = run(capsys, "table1", "--format", "json", "--parity-n", "4", "--or-n", "4",
                           "--majority-n", "4")
        rows = json.loads(out)["rows"]
        assert code == 0
        assert all(r["consistent"] for r in rows)
        parity = [r for r in rows if r["function"] == "PARITY"]
        assert parity and all(r["tight"] for r in parity)


class TestSimulate:
    def test_parity_exact_and_symbolic(self, capsys, tmp_path):
        path = dump(tmp_path, "p4.json", alg.parity_circuit(4))
        code, out, _ = run(capsys, "simulate", path, "--family", "PARITY", "--n", "4", "--exact",
                           "--symbolic", "--format", "json")
        d = json.loads(out)
        assert code == 0
        assert d["checks"][0]["pass"]
        sym = d["symbolic"]
        assert (sym["acceptance_degree"], sym["bound_2T"], sym["verdict"]) == (4, 4, "pass")

    def test_failed_check_exit_1(self, capsys, tmp_path):
        path = dump(tmp_path, "g.json", alg.grover_circuit(8, 1))
        code, _, err = run(capsys, "simulate", path, "--family", "OR", "--n", "8", "--bounded")
        assert code == 1 and summary(err)["passed"] is False

    def test_custom_gate_symbolic_refused(self, capsys, tmp_path):
        path = dump(tmp_path, "c.json", alg.counting_circuit(4).circuit)
        code, _, _ = run(capsys, "simulate", path, "--family", "OR", "--n", "4", "--symbolic")
        assert code == 2

    def test_zero_error(self, capsys, tmp_path):
        path = dump(tmp_path, "z.json", alg.or_zero_error_circuit(3))
        code, _, _ = run(capsys, "simulate", path, "--family", "OR", "--n", "3", "--zero")
        assert code == 0


class TestCircuitDump:
    def test_roundtrip(self, capsys):
        code, out, _ = run(capsys, "circuit-dump", "xor", "--n", "4", "--i", "0", "--j", "3",
                           "--format", "json")
        assert code == 0
        assert Circuit.from_json(json.loads(out)).ops == alg.xor_circuit(4, 0, 3).ops

    def test_decoder_csv(self, capsys):
        code, out, _ = run(capsys, "circuit-dump", "counting", "--n", "4", "--decoder", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        assert rows[0] == ["phase_index", "estimate"]
        assert len(rows) == 1 + 32
        assert rows[17] == ["16", "4"]

    def test_bad_precision(self, capsys):
        code, _, _ = run(capsys, "circuit-dump", "counting", "--n", "4", "--p", "2")
        assert code == 2


class TestOutput:
    def test_timestamp_toggle(self, capsys):
        args = ("measures", "--family", "OR", "--n", "3", "--format", "json")
        _, stamped, _ = run(capsys, *args)
        assert "generated_at" in json.loads(stamped)
        _, a, _ = run(capsys, *args, "--no-timestamp")
        _, b, _ = run(capsys, *args, "--no-timestamp")
        assert a == b and "generated_at" not in json.loads(a)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = run(capsys, "measures", "--family", "OR", "--n", "3", "--format", "json",
                           "--no-timestamp", "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["bs"] == 3

    @pytest.mark.parametrize("fmt", ["md", "json", "csv"])
    def test_formats(self, capsys, fmt):
        code, out, _ = run(capsys, "measures", "--family", "AND", "--n", "3", "--format", fmt)
        assert code == 0 and out.strip()
