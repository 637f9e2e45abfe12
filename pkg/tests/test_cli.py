import json

import pytest

from operad_forge.cli import main
from operad_forge.smodule_operad import lie_data, presentation_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name,dims", [("lie", [1, 1, 2, 6]), ("com", [1, 1, 1, 1, 1]),
                                       ("ass", [1, 2, 6, 24]), ("as", [1, 1, 1, 1])])
def test_build_operad_stock(capsys, name, dims):
    code, out, _ = run(capsys, "build-operad", name, "--arity-cap", str(len(dims)))
    assert code == 0
    payload = json.loads(out)
    assert payload["dims"] == dims
    assert "composition" in payload and "basis" in payload


def test_build_operad_action_matrices(capsys):
    _, out, _ = run(capsys, "build-operad", "lie", "--arity-cap", "3")
    action = json.loads(out)["action"]
    # the bracket is antisymmetric: s1 sends it to minus itself
    assert action["2"]["s1"] == [[[0, -1]]]


def test_build_operad_from_file(tmp_path, capsys):
    path = tmp_path / "lie.json"
    path.write_text(json.dumps(presentation_to_json(lie_data())))
    code, out, _ = run(capsys, "build-operad", str(path), "--arity-cap", "4")
    assert code == 0 and json.loads(out)["dims"] == [1, 1, 2, 6]


def test_build_operad_writes_out_file(tmp_path, capsys):
    out_path = tmp_path / "com.json"
    code, out, _ = run(capsys, "build-operad", "com", "--arity-cap", "3", "--out", str(out_path))
    assert code == 0 and out == ""
    assert json.loads(out_path.read_text())["dims"] == [1, 1, 1]


def test_unstable_relation_exit_code(tmp_path, capsys):
    obj = presentation_to_json(lie_data())
    obj["relations"] = [obj["relations"][0][:1]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    code, _, err = run(capsys, "build-operad", str(path))
    assert code == 2
    assert "relation 0" in err


def test_malformed_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"generators": [\n  {"label": }\n]}')
    code, _, err = run(capsys, "build-operad", str(path))
    assert code == 2
    assert "line 2" in err


def test_missing_fields(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    code, _, err = run(capsys, "build-operad", str(path))
    assert code == 2 and "malformed" in err


def test_unknown_operad(capsys):
    code, _, err = run(capsys, "build-operad", "no-such-operad")
    assert code == 2 and "unknown operad" in err


def test_arity_cap_below_two(capsys):
    code, _, err = run(capsys, "build-operad", "com", "--arity-cap", "1")
    assert code == 2 and "at least 2" in err


def test_m_psi_generators(capsys):
    code, out, _ = run(capsys, "m-psi", "id_com", "--arity-cap", "3")
    payload = json.loads(out)
    assert code == 0
    assert set(payload["generators"]) == {"l_2", "l_3"}
    assert len(payload["generators"]["l_3"]) == 1


def test_m_psi_check(capsys):
    code, out, _ = run(capsys, "m-psi", "id_as", "--arity-cap", "4", "--check")
    payload = json.loads(out)
    assert code == 0
    assert payload["chain_map"]["status"] == "PASS"
    assert set(payload["generators"]) == {"a_2", "a_3", "a_4"}


def test_m_psi_bad_choice():
    with pytest.raises(SystemExit) as exc:
        main(["m-psi", "nonsense"])
    assert exc.value.code == 2


def test_verify_signs(capsys):
    code, out, err = run(capsys, "verify", "signs")
    payload = json.loads(out)
    assert code == 0 and payload["passed"]
    assert len(payload["checks"]) == 5
    assert all(c["status"] == "PASS" for c in payload["checks"])
    assert err.count("PASS") == 5


def test_verify_manin_with_caps(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, _, _ = run(capsys, "verify", "manin-square", "--arity-cap", "3", "--weight-cap", "2",
                     "--out", str(out_path))
    payload = json.loads(out_path.read_text())
    assert code == 0
    assert payload["config"]["arity_cap"] == 3 and payload["config"]["weight_cap"] == 2


def test_verify_threads(capsys, monkeypatch):
    monkeypatch.setenv("OPERAD_FORGE_THREADS", "2")
    code, out, _ = run(capsys, "verify", "signs")
    assert code == 0 and json.loads(out)["passed"]


def test_verify_failure_exit_code(capsys, monkeypatch):
    from operad_forge import verify
    monkeypatch.setitem(verify.SUITES, "signs", [("always fails", lambda cfg: (False, {}))])
    code, out, err = run(capsys, "verify", "signs")
    assert code == 1
    assert json.loads(out)["passed"] is False
    assert "FAIL" in err


def test_verify_exception_is_reported_as_failure(capsys, monkeypatch):
    from operad_forge import verify

    def boom(cfg):
        raise RuntimeError("kaput")

    monkeypatch.setitem(verify.SUITES, "signs", [("raises", boom)])
    code, out, _ = run(capsys, "verify", "signs")
    assert code == 1
    assert "kaput" in json.dumps(json.loads(out)["checks"][0]["detail"])


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "operad_forge", "build-operad", "com", "--arity-cap", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["dims"] == [1, 1]
