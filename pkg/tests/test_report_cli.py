import dataclasses
import importlib
import json
import math
from pathlib import Path

import numpy as np
import pytest

from akgeo.cli import main, parse_grid, parse_t, UsageError
from akgeo.errors import FrameMismatchError, PipelineError, SpecError
from akgeo.families import expected_kodaira, expected_nakamura, kodaira_thurston, nakamura
from akgeo.report import (
    PipelineOptions,
    analyze,
    default_tolerance,
    jsonable,
    load_spec,
    parse_spec,
    run_pipeline,
    verify,
)

from conftest import flat_torus_doc

GOLDEN = Path(__file__).parent / "golden"
FAST = PipelineOptions(plurigenus=False)


def write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2))
    return p


# -- loading ---------------------------------------------------------------------

def test_family_shortcuts():
    kt = parse_spec('{"family": "kodaira_thurston", "a": 2}')
    assert kt.family == "kodaira_thurston" and kt.params["a"] == 2
    nk = parse_spec('{"family": "nakamura", "params": {"t": [0, 0, 0, 0.1]}}')
    assert nk.family == "nakamura" and nk.params["t4"] == 0.1


def test_general_flat_torus_is_flat():
    spec = parse_spec(json.dumps(flat_torus_doc(4)))
    rep = run_pipeline(spec, FAST)
    for name in ("levi_civita_gamma", "theta", "psi", "curvature_real", "ricci_real", "ricci_complex"):
        assert np.abs(getattr(rep, name)).max(initial=0) == 0
    assert rep.classification["label"] == "kahler"


def test_symplectic_form_is_accepted():
    doc = flat_torus_doc(4)
    del doc["metric"]
    doc["symplectic"] = [[1, 2, 1.0], [3, 4, 1.0]]
    spec = parse_spec(json.dumps(doc))
    assert np.allclose(spec.metric.g, np.eye(4))


def test_bad_complex_structure_reports_residual():
    doc = flat_torus_doc(4)
    doc["J"] = np.eye(4).tolist()
    with pytest.raises(SpecError) as info:
        parse_spec(json.dumps(doc, indent=2))
    assert info.value.field == "J" and info.value.line is not None
    assert "residual" in str(info.value)


def test_bad_json_reports_line():
    with pytest.raises(SpecError) as info:
        parse_spec('{\n  "dim": 4,\n  "J": [1, 2,\n}')
    assert info.value.line == 4


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"dim": 4, "structure": []}, "J"),
        ({"dim": 3, "J": []}, "dim"),
        ({"family": "k3"}, "family"),
        ({"family": "kodaira_thurston"}, "a"),
        ({"family": "nakamura", "t": [0, 0]}, "t"),
    ],
)
def test_field_errors(doc, field):
    with pytest.raises(SpecError) as info:
        parse_spec(json.dumps(doc))
    assert info.value.field == field


def test_non_jacobi_structure_is_rejected():
    doc = flat_torus_doc(4)
    doc["structure"] = [[1, 2, 3, 1], [2, 3, 1, 1], [1, 3, 1, 1]]
    with pytest.raises(SpecError, match="Jacobi"):
        parse_spec(json.dumps(doc))


def test_metric_and_symplectic_are_exclusive():
    doc = flat_torus_doc(4)
    doc["symplectic"] = [[1, 2, 1.0]]
    with pytest.raises(SpecError):
        parse_spec(json.dumps(doc))


def test_out_of_domain_family_point():
    with pytest.raises(SpecError):
        parse_spec('{"family": "nakamura", "t": [0.9, 0.9, 0, 0]}')


def test_missing_file(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "nope.json")


# -- pipeline ---------------------------------------------------------------------

def test_kodaira_a2_values():
    rep = run_pipeline(kodaira_thurston(2.0), FAST)
    assert rep.scal_real == pytest.approx(-0.5)
    assert np.abs(rep.ricci_complex).max() < 1e-12
    assert rep.classification["almost_kahler"] and not rep.classification["integrable"]
    assert rep.plurigenus is None


def test_nakamura_off_axis_has_kappa_minus_infinity():
    rep = run_pipeline(nakamura((0, 0, 0, 0.1)), PipelineOptions(m_max=3, mode_bound=100))
    assert rep.plurigenus["kappa"] == -math.inf
    assert rep.plurigenus["plurigenera"] == {"1": 0, "2": 0, "3": 0}
    assert rep.plurigenus["elliptic"]


def test_stage_failure_is_tagged(monkeypatch):
    rep_mod = importlib.import_module("akgeo.report")

    def boom(*args, **kwargs):
        raise ZeroDivisionError("synthetic")

    monkeypatch.setattr(rep_mod, "curvature", boom)
    with pytest.raises(PipelineError) as info:
        run_pipeline(kodaira_thurston(1.0), FAST)
    assert info.value.stage == "curvature"


def test_json_is_deterministic():
    spec = nakamura((0.1, -0.2, 0.0, 0.2))
    opts = PipelineOptions(m_max=2, mode_bound=50)
    assert analyze(spec, opts).to_json() == analyze(spec, opts).to_json()


@pytest.mark.parametrize("stem", ["kodaira_a2", "nakamura_t"])
def test_golden_reports(stem):
    spec = load_spec(GOLDEN / f"{stem}.spec.json")
    got = analyze(spec, PipelineOptions()).to_json()
    assert json.loads(got) == json.loads((GOLDEN / f"{stem}.report.json").read_text())


def test_jsonable_rules():
    out = jsonable({"x": np.array([1 + 2j, 1e-15, -math.inf]), "y": 1 / 3, "z": float("nan")})
    assert out["x"] == [[1.0, 2.0], [0.0, 0.0], ["-inf", 0.0]]
    assert out["y"] == 0.333333333333
    assert out["z"] == "nan"


def test_text_report_has_sections():
    text = analyze(kodaira_thurston(1.0), FAST).to_text()
    for word in ("classification", "Ricci", "verification"):
        assert word.lower() in text.lower()


# -- verification -------------------------------------------------------------------

@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_verify_kodaira(a):
    res = verify(run_pipeline(kodaira_thurston(a), FAST), expected_kodaira(a))
    assert res.passed and res.exit_code == 0 and res.max_residual < 1e-12


def test_verify_nakamura():
    t = (0.2, 0.0, -0.1, 0.3)
    assert verify(run_pipeline(nakamura(t), FAST), expected_nakamura(t)).passed


def test_perturbed_theta_fails():
    rep = run_pipeline(kodaira_thurston(1.0), FAST)
    bad = dataclasses.replace(rep, theta=rep.theta + 1e-3)
    res = verify(bad, expected_kodaira(1.0))
    assert not res.passed and res.exit_code == 1
    theta = next(i for i in res.items if i.name == "theta")
    assert theta.residual == pytest.approx(1e-3, rel=1e-6)
    assert [i.name for i in res.items if not i.passed] == ["theta"]


def test_frame_mismatch():
    rep = run_pipeline(kodaira_thurston(1.0), FAST)
    with pytest.raises(FrameMismatchError):
        verify(dataclasses.replace(rep, frame_tag="F"), expected_kodaira(1.0))


def test_shape_mismatch():
    rep = run_pipeline(kodaira_thurston(1.0), FAST)
    with pytest.raises(ValueError):
        verify(dataclasses.replace(rep, ricci_real=np.zeros((3, 3))), expected_kodaira(1.0))


def test_tolerance_from_environment(monkeypatch):
    monkeypatch.delenv("AKGEO_TOL", raising=False)
    assert default_tolerance() == 1e-9
    monkeypatch.setenv("AKGEO_TOL", "1e-6")
    assert default_tolerance() == 1e-6
    monkeypatch.setenv("AKGEO_TOL", "-1")
    with pytest.raises(SpecError):
        default_tolerance()


# -- command line -------------------------------------------------------------------

def test_parse_grid():
    assert parse_grid("t4=0:0.1:0.3") == ("t4", [0.0, 0.1, 0.2, 0.3])
    assert parse_grid("a=0.5,1,2") == ("a", [0.5, 1.0, 2.0])
    for bad in ("t4", "t4=0:0:1", "t4=x:1:2", "t4=1:0.5:0"):
        with pytest.raises(UsageError):
            parse_grid(bad)


def test_parse_t():
    assert parse_t("0,0,0,0.1") == (0, 0, 0, 0.1)
    with pytest.raises(UsageError):
        parse_t("0,0")


def test_analyze_json_to_file(tmp_path):
    spec = write(tmp_path, {"family": "kodaira_thurston", "a": 2})
    out = tmp_path / "report.json"
    assert main(["analyze", str(spec), "--report", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["scal_real"] == -0.5 and doc["verification"]["passed"]


def test_analyze_text(tmp_path, capsys):
    spec = write(tmp_path, flat_torus_doc(4))
    assert main(["analyze", str(spec)]) == 0
    assert "kahler" in capsys.readouterr().out


def test_analyze_fails_at_impossible_tolerance(tmp_path, monkeypatch, capsys):
    spec = write(tmp_path, {"family": "nakamura", "t": [0.3, 0.3, 0.3, 0.3]})
    monkeypatch.setenv("AKGEO_TOL", "1e-300")
    assert main(["analyze", str(spec), "--m-max", "1", "--mode-bound", "20"]) == 1
    # an explicit flag wins over the environment
    assert main(["analyze", str(spec), "--m-max", "1", "--mode-bound", "20", "--tol", "1e-9"]) == 0


def test_input_errors_exit_2(tmp_path, capsys):
    bad = write(tmp_path, '{"dim": 4,')
    assert main(["analyze", str(bad)]) == 2
    assert main(["analyze", str(tmp_path / "missing.json")]) == 2
    assert main(["kodaira", "--t", "1,2"]) == 2
    assert main(["kodaira", "--t", "0.9,0.9,0,0"]) == 2
    assert main(["analyze", str(bad), "--tol", "0"]) == 2
    assert main(["frobnicate"]) == 2
    assert "error" in capsys.readouterr().err


def test_pipeline_failure_exits_2(tmp_path, monkeypatch, capsys):
    rep_mod = importlib.import_module("akgeo.report")
    monkeypatch.setattr(rep_mod, "levi_civita", lambda *a: 1 / 0)
    spec = write(tmp_path, {"family": "kodaira_thurston", "a": 1})
    assert main(["analyze", str(spec)]) == 2
    assert "levi_civita" in capsys.readouterr().err


def test_verify_grid(tmp_path, capsys):
    spec = write(tmp_path, {"family": "nakamura", "t": [0, 0, 0, 0]})
    assert main(["verify", str(spec), "--grid", "t4=0:0.1:0.3", "--grid", "t1=-0.2,0.2"]) == 0
    out = capsys.readouterr().out
    assert "8 point(s)" in out and "PASS" in out


def test_verify_grid_json(tmp_path, capsys):
    spec = write(tmp_path, {"family": "kodaira_thurston", "a": 1})
    assert main(["verify", str(spec), "--grid", "a=0.5,1,2", "--report", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and len(doc["points"]) == 3


def test_verify_rejects_unknown_grid_key_and_general_specs(tmp_path):
    spec = write(tmp_path, {"family": "kodaira_thurston", "a": 1})
    assert main(["verify", str(spec), "--grid", "t4=0,1"]) == 2
    flat = write(tmp_path, flat_torus_doc(4), "flat.json")
    assert main(["verify", str(flat)]) == 2


def test_kodaira_command(capsys):
    assert main(["kodaira", "--t", "0,0,0,0.1", "--m-max", "3", "--mode-bound", "100", "--report", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kappa"] == "-inf" and doc["plurigenera"] == {"1": 0, "2": 0, "3": 0}
    assert main(["kodaira", "--t", "0.1,0.1,0.2,0", "--m-max", "2", "--mode-bound", "100"]) == 0
    assert "kappa = 0" in capsys.readouterr().out
