"""End-to-end tests of the command-line interface."""

import json

import pytest

from ballcover.bodies import make_body, save_body
from ballcover.cli import main
from ballcover.reports import parse_rat


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_ball_class_headlines(capsys):
    code, out, _ = run(capsys, "ball-class", "--dim", "3")
    assert code == 0
    assert "classification: critically-semi-eutactic" in out
    assert "conclusion: ball inextensible; relatively worst covering candidate" in out
    code, out, _ = run(capsys, "ball-class", "--dim", "4")
    assert code == 0
    assert "classification: redundantly-semi-eutactic" in out
    assert "conclusion: ball extensible; not relatively worst covering" in out


def test_dim_out_of_range_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ball-class", "--dim", "7"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_anstar_roundtrip(capsys, tmp_path):
    out_file = tmp_path / "lat.json"
    code, out, _ = run(capsys, "anstar", "--dim", "3", "--out", str(out_file))
    assert code == 0
    assert out_file.read_text() == out
    data = json.loads(out)
    assert data["kind"] == "lattice-report"
    assert parse_rat(data["mu2"]) == parse_rat("5/4")
    code, out, _ = run(capsys, "verify", "--certificate", str(out_file))
    assert code == 0
    assert out.strip() == "verified"


def test_construct_verify_and_determinism(capsys, tmp_path):
    body_file = tmp_path / "body.json"
    save_body(make_body([(4, 0, 0.01)]), str(body_file))
    cert = tmp_path / "scan.json"
    code, out1, _ = run(
        capsys, "construct", "--body", str(body_file), "--grid", "24", "--out", str(cert)
    )
    assert code == 0
    code, out2, _ = run(capsys, "construct", "--body", str(body_file), "--grid", "24")
    assert code == 0
    assert out1 == out2
    code, out, _ = run(capsys, "verify", "--certificate", str(cert))
    assert code == 0
    data = json.loads(out1)
    assert data["kind"] == "scan-report"
    assert data["margin"] > 0


def test_construct_rejects_bad_bodies(capsys, tmp_path):
    huge = tmp_path / "huge.json"
    save_body(make_body([(4, 0, 0.5)]), str(huge))
    code, _, err = run(capsys, "construct", "--body", str(huge), "--grid", "4")
    assert code == 2
    assert "asphericity" in err
    malformed = tmp_path / "bad.json"
    malformed.write_text('{"oops": 1}')
    code, _, err = run(capsys, "construct", "--body", str(malformed), "--grid", "4")
    assert code == 2
    missing = tmp_path / "missing.json"
    code, _, err = run(capsys, "construct", "--body", str(missing), "--grid", "4")
    assert code == 2


def test_witness_roundtrip_and_redundant_branch(capsys, tmp_path):
    cert = tmp_path / "wit.json"
    code, out, _ = run(
        capsys, "witness", "--dim", "3", "--pair", "1", "--eps", "1/100",
        "--out", str(cert),
    )
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "extension-witness"
    assert parse_rat(data["det_t"]) > 1
    code, out, _ = run(capsys, "verify", "--certificate", str(cert))
    assert code == 0
    code, _, err = run(capsys, "witness", "--dim", "4", "--pair", "0")
    assert code == 1
    assert "redundancy" in err
    code, _, err = run(capsys, "witness", "--dim", "3", "--pair", "9")
    assert code == 2


def test_cl_certify_csv(capsys, tmp_path):
    cert = tmp_path / "cl.csv"
    code, out, _ = run(capsys, "cl-certify", "--lmax", "220", "--out", str(cert))
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "l,c_l,residue_mod16,status"
    assert len(lines) == 222
    assert lines[1].startswith("0,12,")
    assert lines[3].split(",")[3] == "zero"
    assert lines[221].split(",")[1] == ""
    assert lines[221].split(",")[3] == "nonzero-mod16"
    code, out, _ = run(capsys, "verify", "--certificate", str(cert))
    assert code == 0


def test_zonal_roundtrip(capsys, tmp_path):
    cert = tmp_path / "zonal.json"
    code, out, _ = run(capsys, "zonal", "--lmax", "8", "--out", str(cert))
    assert code == 0
    data = json.loads(out)
    assert parse_rat(data["multipliers"][4]) == parse_rat("7/25")
    assert parse_rat(data["multipliers"][2]) == 0
    code, out, _ = run(capsys, "verify", "--certificate", str(cert))
    assert code == 0


def test_verify_detects_tampering(capsys, tmp_path):
    cert = tmp_path / "wit.json"
    code, out, _ = run(
        capsys, "witness", "--dim", "3", "--pair", "0", "--out", str(cert)
    )
    assert code == 0
    data = json.loads(cert.read_text())
    data["det_t"] = "2"
    cert.write_text(json.dumps(data))
    code, _, err = run(capsys, "verify", "--certificate", str(cert))
    assert code == 1
    assert "disagrees" in err


def test_verify_usage_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", "--certificate", str(tmp_path / "none.json"))
    assert code == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("not json at all")
    code, _, _ = run(capsys, "verify", "--certificate", str(garbled))
    assert code == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text('{"kind": "mystery"}')
    code, _, err = run(capsys, "verify", "--certificate", str(unknown))
    assert code == 1
    assert "unknown certificate kind" in err
