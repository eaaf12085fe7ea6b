import json
import math

import pytest

from hhverify.cli import main
from hhverify.linalg_core import matrix_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_oracle_logmean(capsys):
    code, out, _ = run(capsys, "oracle", "logmean", "--a", "1", "--b", "4")
    d = json.loads(out)
    assert code == 0 and d["log_mean"] == pytest.approx(3 / math.log(4))
    assert d["geometric"] <= d["log_mean"] <= d["arithmetic"]


def test_oracle_eig(capsys, tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps(matrix_to_json([[2, 1], [1, 2]])))
    code, out, _ = run(capsys, "oracle", "eig", "--file", str(f))
    d = json.loads(out)
    assert code == 0 and d["eigenvalues"] == pytest.approx([1, 3])
    f.write_text(json.dumps(matrix_to_json([[1, 2], [0, 1]])))
    assert run(capsys, "oracle", "eig", "--file", str(f))[0] == 2


def test_check_generated_instance(capsys):
    code, out, _ = run(capsys, "check", "hh_operator_log_chain", "--seed", "3", "--dim", "4")
    assert code == 0 and json.loads(out)["verdict"]["status"] == "Holds"


def test_check_with_file_and_params(capsys, tmp_path):
    f = tmp_path / "ops.json"
    ops = {"a": matrix_to_json([[1, 0], [0, 1]]), "b": matrix_to_json([[1, 0], [0, 1]]),
           "x": matrix_to_json([[1, 0], [0, 2]])}
    f.write_text(json.dumps(ops))
    code, out, _ = run(capsys, "check", "dragomir_alpha", "--file", str(f), "--alpha", "2")
    d = json.loads(out)["verdict"]
    assert code == 0 and d["details"]["lhs"] == pytest.approx(9) and d["details"]["rhs"] == pytest.approx(21.25)
    code, out, _ = run(capsys, "check", "bhatia_davis", "--file", str(f), "--r", "1")
    assert code == 0
    code, _, err = run(capsys, "check", "bhatia_davis", "--file", str(f))
    assert code == 2 and "missing" in err


def test_check_agm_nu(capsys):
    code, out, _ = run(capsys, "check", "agm_inequality", "--nu", "0", "--show-instance")
    d = json.loads(out)
    assert code == 0 and d["instance"]["params"]["nu"] == 0.0 and d["verdict"]["margin"] == 0.0


def test_campaign_and_replay(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    csv_path = tmp_path / "rows.csv"
    code, _, err = run(capsys, "campaign", "--seed", "4", "--trials", "2", "--dims", "2,3",
                       "--checks", "inverted_exp_chain,exp_special_chain",
                       "--out", str(out_path), "--csv", str(csv_path))
    assert code == 1 and "2 violated" in err
    report = json.loads(out_path.read_text())
    assert report["config"]["dims"] == [2, 3]
    assert len(csv_path.read_text().strip().splitlines()) == 5
    refs = report["checks"]["inverted_exp_chain"]["witness_refs"]
    witness = tmp_path / "witnesses" / refs[0]
    code, out, _ = run(capsys, "check", "inverted_exp_chain", "--replay", str(witness))
    d = json.loads(out)
    assert code == 1 and d["reproduced"] and d["verdict"]["status"] == "Violated"
    code, _, _ = run(capsys, "check", "exp_special_chain", "--replay", str(witness))
    assert code == 2


def test_campaign_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 1, "trials_per_check": 1, "checks": ["trace_axioms"]}))
    code, out, _ = run(capsys, "campaign", "--config", str(cfg))
    assert code == 0 and json.loads(out)["checks"]["trace_axioms"]["holds"] == 1
    cfg.write_text("{not json")
    assert run(capsys, "campaign", "--config", str(cfg))[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "check", "unknown_check")[0] == 2
    assert run(capsys, "campaign", "--trials", "0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_check_list(capsys):
    code, out, _ = run(capsys, "check", "list")
    d = json.loads(out)
    assert code == 0 and d["inverted_exp_chain"]["default"] is False


def test_campaign_creates_output_directories(capsys, tmp_path):
    out_path = tmp_path / "nested" / "report.json"
    code, _, _ = run(capsys, "campaign", "--trials", "1", "--checks", "inverted_exp_chain", "--out", str(out_path))
    assert code == 1 and out_path.exists()
    assert (out_path.parent / "witnesses" / "inverted_exp_chain__000000.json").exists()


def test_unwritable_output_is_usage_error(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "campaign", "--trials", "1", "--checks", "trace_axioms",
                       "--out", str(blocker / "report.json"))
    assert code == 2 and "error" in err
