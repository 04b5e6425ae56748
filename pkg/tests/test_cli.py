import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hhverify import SymMatrix, run_campaign, SearchConfig
from hhverify.cli import CSV_HEADER, format_float, parse_report, run, serialize_report, to_json

GOLDEN = Path(__file__).parent / "golden"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write_matrix(path, a):
    path.write_text(SymMatrix(a).to_text())
    return str(path)


class TestList:
    def test_golden(self):
        assert cli("list")[1] == (GOLDEN / "list.txt").read_text()
        assert cli("list", "--targets")[1] == (GOLDEN / "list_targets.txt").read_text()

    def test_ids_are_registry(self):
        from hhverify.harness import REGISTRY

        ids = [line.split("\t")[0] for line in cli("list")[1].splitlines()]
        assert ids == list(REGISTRY)


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv, code",
        [
            (["verify", "op-hh", "--dim", "2", "--p", "2", "--trials", "1000", "--seed", "42"], 0),
            (["verify", "no-such-id"], 2),
            (["frobnicate"], 2),
            ([], 2),
            (["verify", "op-hh", "--trials", "0"], 2),
            (["verify", "op-hh", "--dim", "two"], 2),
            (["verify", "serre-rev", "--dim", "3", "--trials", "5"], 2),
            (["verify", "det-hh", "--trials", "50", "--tol", "-1"], 2),
            (["verify", "imm-diff", "--order", "4", "--trials", "30"], 0),
            (["search", "cubic-monotone", "--trials", "2000"], 0),
            (["search", "op-hh", "--trials", "200"], 0),
            (["search", "root-det-hh", "--trials", "50"], 0),
            (["search", "nowhere"], 2),
            (["replay"], 2),
            (["demo", "everything"], 2),
        ],
    )
    def test_contract(self, argv, code):
        got, _, err = cli(*argv)
        assert got == code
        if code == 2:
            assert err.startswith("hhverify: error:") and err.count("\n") == 1

    def test_tolerance_failure_exits_one(self):
        # 1 - (x-3) + (x-3)^3/6 is not monotone, so first differences go negative
        code, out, _ = cli("verify", "pos-diff", "--function", "cubic-shift", "--order", "1", "--trials", "50")
        report = json.loads(out)
        assert code == 1 and report["failures"] > 0 and report["min_margin"] < 0

    def test_failed_search_expected_violation_exits_one(self):
        code, out, _ = cli("search", "neg-sqrt-2diff", "--trials", "1", "--tol", "1e6")
        assert code == 1 and json.loads(out)["found"] is False

    def test_module_entry_point(self):
        p = subprocess.run([sys.executable, "-m", "hhverify", "verify", "nope"], capture_output=True, text=True)
        assert p.returncode == 2


class TestReports:
    def test_json_round_trip(self):
        code, out, _ = cli("verify", "det-diff", "--order", "4", "--trials", "30", "--seed", "1")
        assert code == 0
        d = json.loads(out)
        assert {"inequality", "config", "trials", "min_margin", "witness", "failures", "elapsed_ms"} <= set(d)
        r = parse_report(out)
        assert serialize_report(r) == out
        assert float(format_float(r.min_margin)) == r.min_margin

    def test_csv(self):
        code, out, _ = cli("verify", "op-hh", "--trials", "20", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0 and tuple(rows[0]) == CSV_HEADER and len(rows) == 2
        assert rows[1][0] == "op-hh" and rows[1][2] == "20"

    def test_out_path(self, tmp_path):
        path = tmp_path / "r.json"
        code, out, _ = cli("verify", "sz", "--trials", "10", "--out", str(path))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["inequality"] == "sz"

    @given(st.floats(allow_nan=True, allow_infinity=True))
    def test_float_text_round_trips(self, x):
        text = format_float(x)
        back = float(text.replace("Infinity", "inf"))
        assert back == x or (np.isnan(x) and np.isnan(back))

    def test_nonfinite_json(self):
        assert to_json({"a": float("inf"), "b": [1, None, True]}) == '{"a": Infinity, "b": [1, null, true]}\n'
        assert json.loads(to_json({"a": float("-inf")}))["a"] == float("-inf")

    def test_threads_do_not_change_report(self):
        a = json.loads(cli("verify", "lemma-main", "--trials", "40", "--threads", "1")[1])
        b = json.loads(cli("verify", "lemma-main", "--trials", "40", "--threads", "3")[1])
        a["elapsed_ms"] = b["elapsed_ms"] = 0
        assert a == b


class TestConfig:
    def test_precedence(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("# campaign\nseed = 5\ntrials=12\n\ndim=3\n")
        d = json.loads(cli("verify", "det-hh", "--config", str(cfg), "--trials", "7")[1])
        assert d["config"]["seed"] == 5 and d["config"]["dim"] == 3
        assert d["trials"] == 7
        d = json.loads(cli("verify", "det-hh", "--trials", "3")[1])
        assert d["config"]["seed"] == 0 and d["config"]["dim"] == 2

    @pytest.mark.parametrize("text", ["seed 5\n", "colour=red\n", "trials=many\n"])
    def test_bad_file(self, tmp_path, text):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(text)
        assert cli("verify", "det-hh", "--config", str(cfg))[0] == 2

    def test_missing_file(self):
        assert cli("verify", "det-hh", "--config", "/nonexistent/x.cfg")[0] == 2


class TestReplay:
    def test_report(self, tmp_path):
        path = tmp_path / "r.json"
        assert cli("verify", "minkowski-det", "--dim", "3", "--trials", "25", "--out", str(path))[0] == 0
        code, out, _ = cli("replay", "--report", str(path))
        d = json.loads(out)
        assert code == 0 and d["reproduced"] and d["margin"] == d["reported"]

    def test_tampered_report(self, tmp_path):
        path = tmp_path / "r.json"
        cli("verify", "det-hh", "--trials", "5", "--out", str(path))
        d = json.loads(path.read_text())
        d["min_margin"] = d["min_margin"] * 1.01 + 1.0
        path.write_text(json.dumps(d))
        code, out, _ = cli("replay", "--report", str(path))
        assert code == 1 and not json.loads(out)["reproduced"]

    def test_matrices(self, tmp_path):
        paths = {n: write_matrix(tmp_path / f"{n}.txt", np.eye(2)) for n in "ABCX"}
        code, out, _ = cli("replay", "op-hh", "--p", "2", *[f"--matrix={n}={p}" for n, p in paths.items()])
        d = json.loads(out)
        assert code == 0 and d["passed"] and abs(d["margin"]) < 1e-12

    def test_matrix_lists(self, tmp_path):
        a = write_matrix(tmp_path / "a.txt", np.eye(2))
        x = write_matrix(tmp_path / "x.txt", np.zeros((2, 2)))
        code, out, _ = cli("replay", "det-diff", "--matrix", f"As={a}", "--matrix", f"As={a}", "--matrix", f"X={x}")
        assert code == 0 and json.loads(out)["margin"] == pytest.approx(2.0)

    def test_matrix_errors(self, tmp_path):
        a = write_matrix(tmp_path / "a.txt", np.eye(2))
        assert cli("replay", "op-hh", "--matrix", f"A={a}")[0] == 2
        assert cli("replay", "op-hh", "--matrix", "A")[0] == 2
        bad = tmp_path / "bad.txt"
        bad.write_text("2\n1 2 3\n")
        assert cli("replay", "det-hh", "--matrix", f"A={bad}")[0] == 2


class TestDemo:
    def test_counterexamples(self):
        code, out, _ = cli("demo", "counterexamples")
        d = json.loads(out)
        assert code == 0
        assert [r["target"] for r in d] == ["popoviciu-exp", "neg-sqrt-2diff", "cubic-monotone"]
        assert all(r["found"] and r["witness"]["margin"] < 0 for r in d)
        assert d[0]["witness"]["margin"] <= -0.25
        assert d[1]["witness"]["margin"] <= -0.34


def test_report_serializer_matches_campaign():
    r = run_campaign("pos-diff", SearchConfig(trials=15))
    assert parse_report(serialize_report(r)).to_dict() == r.to_dict()
