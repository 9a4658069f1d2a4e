import json
import random

import pytest

from zetaforms.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main
from zetaforms.extract import SpreadRequest, random_instance, zeta_shaped_instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_forms_small_case(capsys):
    code, out, _ = run(capsys, "forms", "--a", "3", "--b", "1", "--r", "1", "--n", "1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["schema"] == "zetaforms-report/1"
    form = doc["result"]["form"]
    assert form["ltilde"]["1"] == {"num": "577", "den": "8"}
    assert form["ell"]["3"] == {"num": "-60", "den": "1"}


def test_forms_9_1_1_4(capsys):
    code, _, _ = run(capsys, "forms", "--a", "9", "--b", "1", "--r", "1", "--n", "4", "--prec-bits", "128")
    assert code == EXIT_OK


def test_forms_invalid(capsys):
    code, _, err = run(capsys, "forms", "--a", "3", "--b", "3", "--r", "1", "--n", "1")
    assert code == EXIT_INVALID and "2br" in err


def test_saddle_mu1_line(capsys):
    code, out, _ = run(capsys, "saddle", "--a", "149", "--b", "1", "--r", "11")
    assert code == EXIT_OK
    assert json.loads(out)["result"]["mu1"]["value"].startswith("23.000098741335222328")


def test_plan_th145_positive(capsys):
    code, out, _ = run(capsys, "plan", "th145", "--d", "1")
    doc = json.loads(out)["result"]
    assert code == EXIT_OK and float(doc["margin"]["value"]) > 0
    assert doc["params"]["pi_constant"]["provenance"] == "imported-constant"


def test_bounds_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--a", "9", "--b", "1", "--csv", "--grid", "4")
    lines = out.strip().splitlines()
    assert code == EXIT_OK and lines[0] == "r,log_alpha,log_Q,ratio"
    assert lines[1].startswith("1,") and abs(float(lines[1].split(",")[3]) - 0.394) < 1e-3


def test_json_is_deterministic(capsys):
    argv = ("saddle", "--a", "45", "--b", "5", "--r", "2", "--prec-bits", "128")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_every_real_carries_provenance(capsys):
    _, out, _ = run(capsys, "saddle", "--a", "45", "--b", "5", "--r", "2", "--prec-bits", "128")

    def walk(node):
        if isinstance(node, dict):
            if "prec_bits" in node or "provenance" in node:
                assert "prec_bits" in node and node["provenance"] in ("computed", "imported-constant")
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)

    walk(json.loads(out)["result"])


def test_config_file_and_out(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nprec_bits = 96\nformat = csv\n")
    target = tmp_path / "z.csv"
    code, out, _ = run(capsys, "zeta", "--s", "3", "--config", str(cfg), "--out", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text().startswith("s,zeta\n3,1.2020569031595942853997")


def test_low_precision_rejected(capsys):
    code, _, _ = run(capsys, "zeta", "--s", "3", "--prec-bits", "32")
    assert code == EXIT_INVALID


def test_extract_file(tmp_path, capsys):
    inst = zeta_shaped_instance(2, 16)
    req = SpreadRequest(1, 2, (3,))
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"instance": inst.to_json(), "request": req.to_json()}))
    code, out, _ = run(capsys, "extract", str(path))
    doc = json.loads(out)["result"]
    assert code == EXIT_OK and doc["certified"] and len(doc["indices"]) == 2


def test_extract_precondition_is_invalid_input(tmp_path, capsys):
    inst = random_instance(random.Random(1))
    req = SpreadRequest(2, 50, ())
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"instance": inst.to_json(), "request": req.to_json()}))
    code, _, _ = run(capsys, "extract", str(path))
    assert code == EXIT_INVALID


def test_plan_failure_exit_code(capsys):
    code, _, _ = run(capsys, "plan", "th145", "--d", "20001", "--prec-bits", "128")
    assert code == EXIT_FAILED


def test_verify_subset(capsys):
    code, out, err = run(capsys, "verify", "--only", "1", "9")
    assert code == EXIT_OK
    assert "[PASS]  1" in err and "[PASS]  9" in err
    assert [c["id"] for c in json.loads(out)["result"]["criteria"]] == [1, 9]
