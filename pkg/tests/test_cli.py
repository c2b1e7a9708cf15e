import json
from importlib import resources

import pytest

from modctrl.cli import main, run

DATA = resources.files("modctrl").joinpath("data")

TOY = """\
device toy qubits 4
module a custom at 0,1 controls 0:X,1:X static (0,1):XXYY
module b custom at 2,3 controls 0:X,1:X static (0,1):XXYY
link a:1 b:0
"""

UNCOUPLED = """\
device pair qubits 2
module a custom at 0,1 controls 0:X static -
"""


@pytest.fixture
def toy(tmp_path):
    p = tmp_path / "toy.layout"
    p.write_text(TOY)
    return p


def _machine(capsys, argv):
    code = main(argv + ["--format", "machine"])
    return code, json.loads(capsys.readouterr().out)


def test_check_toy_compose(capsys, toy):
    code, rec = _machine(capsys, ["check", str(toy)])
    assert code == 0 and rec["status"] == "valid" and rec["details"]["mode"] == "compose"
    assert rec["resources"] == {"local_controls": 4, "static_couplings": 2, "tunable_couplings": 1}
    assert [m["dimension"] for m in rec["modules"]] == [15, 15]


def test_check_toy_direct_multiple_seeds(capsys, toy):
    code, rec = _machine(capsys, ["check", str(toy), "--mode", "direct", "--seeds", "2", "--seed", "4"])
    assert code == 0 and rec["seeds"] == [4, 5]
    assert [m["dimension"] for m in rec["modules"]] == [255, 255]


def test_check_not_controllable(capsys, tmp_path):
    p = tmp_path / "u.layout"
    p.write_text(UNCOUPLED)
    code, rec = _machine(capsys, ["check", str(p)])
    assert code == 1 and rec["status"] == "invalid"


def test_check_truncated_is_indeterminate(capsys, toy):
    code, rec = _machine(capsys, ["check", str(toy), "--mode", "direct", "--max-depth", "1"])
    assert code == 2 and rec["modules"][0]["truncated"]


def test_check_float_mode(capsys, toy):
    code, rec = _machine(capsys, ["check", str(toy), "--arith", "float", "--tol", "1e-9"])
    assert code == 0 and rec["arithmetic"] == "float"


def test_check_eagle_direct_is_guarded(capsys):
    code, rec = _machine(capsys, ["check", str(DATA / "eagle127.layout"), "--mode", "direct"])
    assert code == 2 and any("guard" in m for m in rec["messages"])


def test_text_and_machine_agree(capsys, toy):
    text_report = run(["check", str(toy)])
    machine = json.loads(run(["check", str(toy), "--format", "machine"]).render())
    text = text_report.render()
    assert f"status: {machine['status']}" in text
    for m in machine["modules"]:
        assert f"dim {m['dimension']}/{m['full_dimension']}" in text
    r = machine["resources"]
    assert f"{r['local_controls']} local controls, {r['static_couplings']} static couplings" in text


def test_input_errors(capsys, tmp_path):
    assert main(["check", str(tmp_path / "missing.layout")]) == 3
    bad = tmp_path / "bad.layout"
    bad.write_text("device d qubits 5\nmodule a template T9 at 0,1,2,3,4\n")
    assert main(["check", str(bad)]) == 3
    assert "line 2" in capsys.readouterr().err
    assert main(["check"]) == 3


def test_dim_reports_without_verdict(capsys, tmp_path):
    p = tmp_path / "drift.layout"
    p.write_text("device z qubits 1\nmodule a custom at 0 controls - static -\n")
    code, rec = _machine(capsys, ["dim", str(p)])
    assert code == 0 and rec["modules"][0]["dimension"] == 1


def test_dim_uncoupled_pair_matches_oracle(capsys, tmp_path):
    from modctrl.layout import layout_to_system, parse_layout
    from modctrl.oracle import dense_closure_oracle

    p = tmp_path / "u.layout"
    p.write_text(UNCOUPLED)
    code, rec = _machine(capsys, ["dim", str(p), "--seed", "2"])
    expected = dense_closure_oracle(layout_to_system(parse_layout(UNCOUPLED), 2))
    assert code == 0 and rec["modules"][0]["dimension"] == expected


def test_certificate_verify_and_tamper(capsys, toy, tmp_path):
    cert = tmp_path / "toy.cert"
    assert main(["check", str(toy), "--certificate-out", str(cert)]) == 0
    capsys.readouterr()
    assert main(["verify", str(cert), "--effort", "exhaustive"]) == 0
    tampered = tmp_path / "tampered.cert"
    tampered.write_text(cert.read_text().replace('"verdict": "valid"', '"verdict": "invalid"', 1))
    assert main(["verify", str(tampered)]) == 1
    assert main(["verify", str(tmp_path / "none.cert")]) == 3
    garbage = tmp_path / "garbage.cert"
    garbage.write_text("{\"certificate\": {\"kind\": \"direct\"}}")
    assert main(["verify", str(garbage)]) == 3


def test_audit(capsys, toy):
    code, rec = _machine(capsys, ["audit", str(toy), "--samples", "0"])
    assert code == 0 and rec["details"]["audits"][0]["samples"] == 225


def test_audit_double_t10(capsys):
    code, rec = _machine(capsys, ["audit", str(DATA / "double_t10.layout"), "--samples", "100"])
    assert code == 0 and rec["details"]["audits"][0]["passed"] == 100


def test_audit_without_links(capsys):
    assert main(["audit", str(DATA / "t5.layout")]) == 3


def test_machine_output_is_byte_stable(capsys, toy):
    main(["check", str(toy), "--format", "machine", "--seeds", "2"])
    first = capsys.readouterr().out
    main(["check", str(toy), "--format", "machine", "--seeds", "2"])
    assert capsys.readouterr().out == first


@pytest.mark.slow
def test_check_t5(capsys):
    code, rec = _machine(capsys, ["check", str(DATA / "t5.layout")])
    assert code == 0 and rec["modules"][0]["dimension"] == 1023
