"""End-to-end command-line checks: exit codes, report shape, determinism."""

import json
import math

import numpy as np
import pytest

from nonlocality.boxes import (
    Box,
    chsh_functional,
    chsh_scenario,
    pr_box,
    quantum_box,
    tsirelson_realization,
)
from nonlocality.cli import main

THEOREM_222 = 0.0035437670488272285


def run(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, out


def run_json(capsys, argv):
    rc, out = run(capsys, argv)
    return rc, json.loads(out)


def test_no_command_exits_2():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_reproduce_report(capsys):
    rc, report = run_json(capsys, ["reproduce"])
    assert rc == 0
    assert report["command"] == "reproduce"
    assert len(report["rows"]) == 15
    assert report["summary"] == {
        "rows": 15,
        "checked": 13,
        "passed": 13,
        "all_pass": True,
    }
    by_name = {row["name"]: row for row in report["rows"]}
    assert by_name["mu0"]["pass"] is True
    assert by_name["chsh_fod_floor"]["computed"] == pytest.approx(THEOREM_222)
    for flagged in ("chsh_fod_floor_paper_example", "beta_chsh_paper_example"):
        assert by_name[flagged]["checked"] is False
        assert by_name[flagged]["pass"] is None
        assert "twice" in by_name[flagged]["note"]
    assert by_name["chsh_singlet_value"]["computed"] == pytest.approx(
        2.0 * math.sqrt(2.0), abs=1e-9
    )


def test_reproduce_csv(capsys):
    rc, out = run(capsys, ["reproduce", "--format", "csv"])
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "name,paper_value,computed,tolerance,pass,provenance"
    assert len(lines) == 16
    assert lines[1].startswith("mu0,")
    assert lines[1].endswith(",true,paper")


def test_out_file_and_determinism(tmp_path, capsys):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert main(["reproduce", "--out", str(first)]) == 0
    assert main(["reproduce", "--out", str(second)]) == 0
    assert capsys.readouterr().out == ""
    assert first.read_bytes() == second.read_bytes()


def test_out_unwritable_path(capsys):
    rc = main(["reproduce", "--out", "/nonexistent-dir/report.json"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_verify_rti_small(capsys):
    rc, report = run_json(capsys, ["verify-rti", "--trials", "5"])
    assert rc == 0
    # 3 dims x 2 sizes, general and commuting, plus the two extremal rows
    assert len(report["rows"]) == 14
    names = [row["name"] for row in report["rows"]]
    assert "rti_general_dim2_l2" in names
    assert "rti_commuting_dim4_l3" in names
    assert names[-2:] == ["extremal_tightness_min_slack", "extremal_gap_identity"]
    assert report["summary"]["all_pass"] is True


def test_verify_rti_validation(capsys):
    for argv in (
        ["verify-rti", "--trials", "0"],
        ["verify-rti", "--trials", "5", "--dims", "1,2"],
        ["verify-rti", "--trials", "5", "--dims", "17"],
        ["verify-rti", "--trials", "5", "--l", "0"],
    ):
        rc = main(argv)
        assert rc == 2, argv
        assert "error:" in capsys.readouterr().err


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_box_pr_all_ops(tmp_path, capsys):
    path = _write(tmp_path, "pr.json", pr_box().to_dict())
    rc, report = run_json(capsys, ["box", path, "--ops", "ns,fod,cf"])
    assert rc == 0
    by_name = {row["name"]: row for row in report["rows"]}
    assert by_name["ns_max_violation"]["pass"] is True
    assert by_name["fod"]["computed"] == 0.0
    assert by_name["cf"]["computed"] == pytest.approx(0.0, abs=1e-9)
    decomp = report["details"]["cf_decomposition"]
    assert decomp["total"] == pytest.approx(0.0, abs=1e-9)
    assert decomp["terms"] == []
    assert decomp["residual"] is not None


def test_box_bell_op(tmp_path, capsys):
    rho, alice, bob = tsirelson_realization()
    box_path = _write(tmp_path, "singlet.json", quantum_box(rho, alice, bob).to_dict())
    fn_path = _write(tmp_path, "chsh.json", chsh_functional().to_dict())
    rc, report = run_json(capsys, ["box", box_path, "--ops", "bell", "--functional", fn_path])
    assert rc == 0
    by_name = {row["name"]: row for row in report["rows"]}
    assert by_name["bell_value"]["computed"] == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-9)
    assert by_name["bell_algebraic_max"]["computed"] == pytest.approx(4.0)
    assert by_name["bell_deterministic_max"]["computed"] == pytest.approx(2.0)
    # inline form carries the path inside --ops
    rc2, report2 = run_json(capsys, ["box", box_path, "--ops", f"bell={fn_path}"])
    assert rc2 == 0
    assert report2["rows"][0]["computed"] == by_name["bell_value"]["computed"]


def test_box_bad_usage(tmp_path, capsys):
    path = _write(tmp_path, "pr.json", pr_box().to_dict())
    assert main(["box", path, "--ops", "nope"]) == 2
    assert main(["box", path, "--ops", "bell"]) == 2
    assert main(["box", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["box", str(bad)]) == 2
    noschema = tmp_path / "noschema.json"
    noschema.write_text(json.dumps({"scenario": pr_box().to_dict()["scenario"]}))
    assert main(["box", str(noschema), "--ops", "ns"]) == 2
    capsys.readouterr()


def test_box_signalling(tmp_path, capsys):
    sc = chsh_scenario()
    t = np.zeros(sc.shape)
    t[0, 0, 0, 0] = 1.0
    t[0, 1, 1, 0] = 1.0
    t[1, 0, 0, 0] = 1.0
    t[1, 1, 0, 0] = 1.0
    path = _write(tmp_path, "sig.json", Box(sc, t).to_dict())
    assert main(["box", path, "--ops", "fod"]) == 2  # decomposition refuses it
    capsys.readouterr()
    rc, report = run_json(capsys, ["box", path, "--ops", "ns"])
    assert rc == 1  # the check itself runs and fails
    row = report["rows"][0]
    assert row["pass"] is False
    assert row["note"] == "alice marginal at x=0 between y=0 and y=1"


def test_bounds_report(capsys):
    rc, report = run_json(capsys, ["bounds", "2", "2", "2"])
    assert rc == 0
    by_name = {row["name"]: row for row in report["rows"]}
    assert by_name["theorem_form"]["computed"] == pytest.approx(THEOREM_222, rel=1e-12)
    assert by_name["proof_form_le_theorem_form"]["pass"] is True
    assert "bell_bound" not in by_name


def test_bounds_with_bell_ceiling(capsys):
    rc, report = run_json(
        capsys, ["bounds", "2", "2", "2", "--beta-alg", "4", "--beta-det", "2"]
    )
    assert rc == 0
    by_name = {row["name"]: row for row in report["rows"]}
    assert by_name["bell_bound"]["computed"] == pytest.approx(3.9929124659023456, abs=1e-12)


def test_bounds_validation(capsys):
    assert main(["bounds", "0", "2", "2"]) == 2
    assert main(["bounds", "2", "2", "2", "--beta-alg", "4"]) == 2
    capsys.readouterr()


def test_bounds_csv(capsys):
    rc, out = run(capsys, ["bounds", "2", "2", "2", "--format", "csv"])
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "name,paper_value,computed,tolerance,pass,provenance"
    assert len(lines) == 4
    assert lines[1] == f"theorem_form,,{THEOREM_222!r},,,derived"


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("NONLOCAL_SEED", "7")
    rc, report = run_json(capsys, ["bounds", "2", "2", "2"])
    assert rc == 0
    assert report["config"]["seed"] == 7
    rc, report = run_json(capsys, ["bounds", "2", "2", "2", "--seed", "3"])
    assert report["config"]["seed"] == 3
    monkeypatch.setenv("NONLOCAL_SEED", "abc")
    with pytest.raises(SystemExit):
        main(["bounds", "2", "2", "2"])


def test_same_seed_byte_identical(capsys):
    rc1, out1 = run(capsys, ["verify-rti", "--trials", "3", "--seed", "5"])
    rc2, out2 = run(capsys, ["verify-rti", "--trials", "3", "--seed", "5"])
    assert rc1 == rc2 == 0
    assert out1 == out2
