import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from connexive.cli import main
from connexive.hilbert import corpus_manifest
from connexive.matrix import builtin, dumps_logic, is_isomorphic, load_logic
from connexive.search import restrict

PROOFS = resources.files("connexive") / "proofs"


def schema(name):
    return json.loads((resources.files("connexive") / "schemas" / f"{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, name, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, schema(name))
    return code, doc


class TestEval:
    def test_cc1_spot(self, capsys):
        code, out, _ = run(capsys, "eval", "--logic", "cc1_bot", "--formula", "(p->q)->(q->p)", "--assign", "p=3,q=1")
        assert code == 0
        assert out.strip() == "(p -> q) -> q -> p = 3 (undesignated)"

    def test_sa2_dne(self, capsys):
        code, doc = run_json(capsys, "eval_report", "eval", "--logic", "sa2_three", "--formula", "~~p->p", "--assign", "p=0")
        assert code == 0 and doc["value"] == "0" and doc["designated"] is False

    def test_bot(self, capsys):
        code, doc = run_json(capsys, "eval_report", "eval", "--logic", "cc1_bot", "--formula", "bot", "--assign", "")
        assert doc["value"] == "4"

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "eval", "--logic", "cc1_bot", "--formula", "p -> (q", "--assign", "p=1,q=1")
        assert code == 3
        assert "position 7" in err

    def test_usage_errors(self, capsys):
        assert run(capsys, "eval", "--logic", "cc1_bot", "--formula", "p", "--assign", "p=9")[0] == 2
        assert run(capsys, "eval", "--logic", "cc1_bot", "--formula", "p & q", "--assign", "p=1")[0] == 2
        assert run(capsys, "eval", "--logic", "nosuch", "--formula", "p", "--assign", "p=1")[0] == 2
        assert run(capsys, "eval", "--logic", "sa2_three", "--formula", "p & p", "--assign", "p=1")[0] == 2
        with pytest.raises(SystemExit) as info:
            main(["eval", "--formula", "p"])
        assert info.value.code == 2

    def test_logic_file(self, capsys, tmp_path):
        path = tmp_path / "cc1.json"
        path.write_text(dumps_logic(builtin("cc1_bot")))
        code, out, _ = run(capsys, "eval", "--logic", str(path), "--formula", "p -> p", "--assign", "p=2")
        assert code == 0 and out.startswith("p -> p = 1")
        jsonschema.validate(json.loads(path.read_text()), schema("logic"))

    def test_bad_logic_file(self, capsys, tmp_path):
        doc = json.loads(dumps_logic(builtin("cc1_bot")))
        doc["tables"]["imp"][3] = ["1"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(capsys, "eval", "--logic", str(path), "--formula", "p", "--assign", "p=1")
        assert code == 3 and "partial table: imp row 3" in err
        path.write_text("{not json")
        assert run(capsys, "eval", "--logic", str(path), "--formula", "p", "--assign", "p=1")[0] == 3


class TestCheck:
    def test_holds(self, capsys):
        code, out, _ = run(capsys, "check", "--logic", "cc1_bot", "--principle", "S_BOT_A1")
        assert code == 0 and out.strip() == "S_BOT_A1: holds"

    def test_fails_with_counterexample(self, capsys):
        code, doc = run_json(capsys, "check_report", "check", "--logic", "cc1_bot", "--principle", "ECF_ARROW")
        assert code == 1
        v = doc["principles"]["ECF_ARROW"]
        assert v["verdict"] == "fails" and v["counterexample"]["assignment"] == {"A": "2"}

    def test_ecf_three_all(self, capsys):
        code, doc = run_json(capsys, "check_report", "check", "--logic", "ecf_three", "--all")
        for pid in ("S_BOT_A1", "S_BOT_A2", "S_BOT_B1", "S_BOT_B2", "ECF_AND", "ECF_ARROW"):
            assert doc["principles"][pid]["verdict"] == "holds"
        assert code == 1  # --all includes principles that fail

    def test_unknown_id(self, capsys):
        assert run(capsys, "check", "--logic", "cc1_bot", "--principle", "NOPE")[0] == 2
        assert run(capsys, "check", "--logic", "cc1_bot")[0] == 2

    def test_text_and_json_agree(self, capsys):
        _, out, _ = run(capsys, "check", "--logic", "cc1_bot", "--all")
        _, doc = run_json(capsys, "check_report", "check", "--logic", "cc1_bot", "--all")
        text = {line.split(":")[0]: line.split(":")[1].split()[0] for line in out.splitlines()}
        assert text == {pid: v["verdict"] for pid, v in doc["principles"].items()}


class TestClassify:
    def test_cc1(self, capsys):
        code, doc = run_json(capsys, "classify_report", "classify", "--logic", "cc1_bot")
        labels = doc["labels"]
        assert code == 0
        assert labels["weakly_connexive"] and labels["strongly_connexive"] and labels["super_bot_connexive"]
        assert doc["principles"]["SA1"]["verdict"] == "fails"

    def test_classical(self, capsys):
        _, doc = run_json(capsys, "classify_report", "classify", "--logic", "classical")
        assert not doc["labels"]["weakly_connexive"]

    def test_sa2_three_not_applicable(self, capsys):
        _, doc = run_json(capsys, "classify_report", "classify", "--logic", "sa2_three")
        for pid, missing in (("ABELARD", ["and"]), ("SUPER_ABELARD", ["and"]), ("S_BOT_ABELARD", ["and", "bot"])):
            assert doc["principles"][pid]["verdict"] == "not-applicable"
            assert doc["principles"][pid]["missing"] == missing

    def test_text(self, capsys):
        _, out, _ = run(capsys, "classify", "--logic", "cc1_bot")
        assert "strongly_connexive: yes" in out
        assert "super_connexive: no" in out


class TestVerify:
    def test_corpus(self, capsys):
        code, out, _ = run(capsys, "verify", "--corpus")
        n = len(corpus_manifest()["documents"])
        assert code == 0 and out.strip().endswith(f"{n}/{n} accepted")

    def test_corpus_json(self, capsys):
        code, doc = run_json(capsys, "verification_report", "verify", "--corpus", "--against", "cc1_bot")
        assert code == 0 and doc["accepted"] == doc["checked"] == 27
        bridge = {r["name"]: r["soundness"] for r in doc["reports"]}["sbota1_to_at1"]
        assert bridge["applicable"] and bridge["ok"]

    def test_single_json(self, capsys):
        code, doc = run_json(capsys, "verification_report", "verify", str(PROOFS / "sa1_trivial.json"))
        assert code == 0 and doc["accepted"] and len(doc["lines"]) == 3

    def test_bad_proof(self, capsys, tmp_path):
        doc = json.loads((PROOFS / "sa1_trivial.json").read_text())
        doc["lines"][2]["by"]["refs"] = [2, 1]
        path = tmp_path / "bad_proof.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "verify", str(path))
        assert code == 1 and "rejected at line 3" in out
        code, rep = run_json(capsys, "verification_report", "verify", str(path))
        assert rep["first_failure"]["index"] == 3

    def test_corpus_documents_match_schema(self):
        for name in corpus_manifest()["documents"]:
            jsonschema.validate(json.loads((PROOFS / f"{name}.json").read_text()), schema("proof"))

    def test_malformed_proof(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"name": "x"}))
        assert run(capsys, "verify", str(path))[0] == 3
        assert run(capsys, "verify")[0] == 2
        assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2


class TestSearch:
    def test_bicond(self, capsys):
        code, doc = run_json(capsys, "search_results", "search", "--values", "2", "--require-valid", "S_BOT_A1", "--bot-undesignated")
        assert code == 0
        imps = [m["tables"]["imp"] for m in doc["matrices"] if m["designated"] == ["1"] and m["tables"]["neg"] == ["1", "0"]]
        assert [["1", "0"], ["0", "1"]] in imps

    def test_sa2(self, capsys):
        code, doc = run_json(capsys, "search_results", "search", "--values", "3", "--signature", "neg,imp",
                             "--require-valid", "SA2", "--require-invalid", "DNE", "--limit", "5")
        assert code == 0 and len(doc["matrices"]) == 5 and doc["stats"]["truncated"]

    def test_refuses_n4(self, capsys):
        code, _, err = run(capsys, "search", "--values", "4")
        assert code == 2
        assert "--fix" in err and "--force" in err

    def test_pinned_n4(self, capsys):
        code, doc = run_json(capsys, "search_results", "search", "--values", "4", "--fix", "neg=cc1_bot",
                             "--fix", "and=cc1_bot", "--designated", "1,2", "--require-valid", "AT1",
                             "--signature", "neg,and,imp", "--fix", "imp=cc1_bot")
        assert code == 0 and len(doc["matrices"]) == 1
        found = load_logic(doc["matrices"][0])
        assert is_isomorphic(found, restrict(builtin("cc1_bot"), {"neg", "and", "imp"}))[0]

    def test_empty_result_wording(self, capsys):
        code, out, _ = run(capsys, "search", "--values", "2", "--require-valid", "S_BOT_A1,EFQ", "--require-rule", "MP")
        assert code == 0
        assert "found 0 matrices" in out and "not a proof" in out

    def test_spec_file(self, capsys, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"values": 2, "signature": ["imp"], "designated_options": [["1"]]}))
        code, doc = run_json(capsys, "search_results", "search", "--spec", str(path))
        assert code == 0 and doc["stats"]["found"] == 16
        path.write_text(json.dumps({"values": 2, "nonsense": True}))
        assert run(capsys, "search", "--spec", str(path))[0] == 3

    def test_bad_flags(self, capsys):
        assert run(capsys, "search")[0] == 2
        assert run(capsys, "search", "--values", "2", "--signature", "imp", "--require-valid", "AT1")[0] == 2
        assert run(capsys, "search", "--values", "2", "--fix", "neg=cc1_bot")[0] == 2

    def test_jobs_flag(self, capsys):
        argv = ["search", "--values", "2", "--require-valid", "S_BOT_A1", "--format", "json"]
        main(argv)
        one = json.loads(capsys.readouterr().out)
        main(argv + ["--jobs", "2"])
        two = json.loads(capsys.readouterr().out)
        assert one["matrices"] == two["matrices"]


class TestListing:
    def test_principles(self, capsys):
        code, out, _ = run(capsys, "list-principles", "--format", "json")
        rows = json.loads(out)
        assert code == 0 and {"AT1", "MP", "S_BOT_B1"} <= {r["id"] for r in rows}

    def test_logics(self, capsys):
        code, out, _ = run(capsys, "list-logics", "--format", "json")
        docs = json.loads(out)
        for doc in docs:
            jsonschema.validate(doc, schema("logic"))
        assert [d["name"] for d in docs][:3] == ["cc1_bot", "sa2_three", "ecf_three"]


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "connexive.cli", "eval", "--logic", "cc1_bot", "--formula", "bot", "--assign", ""],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "bot = 4 (undesignated)"
