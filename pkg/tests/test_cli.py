import json

import pytest

from stabtopo.cli import main
from stabtopo.complexes import build_complex, write_mesh
from stabtopo.fields import circle_loop
from stabtopo.report import strip_timing
from test_homology import torus7


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_catalog_lists_expected_verdicts(capsys):
    code, out, _ = run(capsys, "catalog", "--json")
    items = {d["name"]: d["expected"] for d in json.loads(out)}
    assert code == 0
    assert items["brockett_integrator"]["brockett"] == "Fails"
    assert items["example5_circle_bundle"]["homology"] == "Holds"
    assert items["example5_circle_bundle"]["adversary"] == "Fails"
    assert set(items["single_integrator_2d"].values()) == {"Holds"}
    assert "circle_target_mansouri" in items


def test_check_brockett_then_recheck(capsys, tmp_path):
    cfg = write(tmp_path, {"format": "stabtopo-config/1", "system": {"catalog": "brockett_integrator"},
                           "conditions": ["brockett"]})
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "check", cfg, "--output", str(report))
    assert code == 0 and "Fails" in out
    doc = json.loads(report.read_text())
    rec = doc["checks"][0]
    assert rec["status"] == "Fails" and rec["certificate"]["witness"]["kind"] == "unreachable_target"
    assert doc["toolkit"]["version"] and doc["parameters"]["delta"] == 0.1
    code, out, _ = run(capsys, "recheck", str(report))
    assert code == 0 and "all re-verified" in out


def test_tampered_witness_fails_recheck(capsys, tmp_path):
    report = tmp_path / "r.json"
    run(capsys, "check", "--system", "brockett_integrator", "--condition", "brockett", "-o", str(report))
    doc = json.loads(report.read_text())
    doc["checks"][0]["certificate"]["witness"]["target"] = [0.05, 0.0, 0.0]
    report.write_text(json.dumps(doc))
    code, _, _ = run(capsys, "recheck", str(report))
    assert code == 3


def test_dimension_mismatch_is_a_config_error(capsys, tmp_path):
    cfg = write(tmp_path, {"format": "stabtopo-config/1",
                           "system": {"n": 2, "dynamics": ["u1", "u2", "x1"], "control_box": [[-1, 1], [-1, 1]]},
                           "target": {"variant": "point", "point": [0, 0]}})
    code, _, err = run(capsys, "check", cfg)
    assert code == 2 and "system.dynamics" in err


@pytest.mark.parametrize("doc,where", [
    ({"format": "stabtopo-config/9", "system": {"catalog": "single_integrator_2d"}}, "format"),
    ({"format": "stabtopo-config/1", "system": {"catalog": "single_integrator_2d"}, "parameters": {"delta": -1}},
     "parameters.delta"),
    ({"format": "stabtopo-config/1", "system": {"catalog": "nope"}}, "system.catalog"),
    ({"format": "stabtopo-config/1", "system": {"catalog": "single_integrator_2d"},
      "target": {"variant": "hypersurface", "mesh": "missing.mesh", "neighborhood": [[-2, 2], [-2, 2]]}}, "target.mesh"),
    ({"format": "stabtopo-config/1", "system": {"catalog": "single_integrator_2d"},
      "reference_field": ["-x1"]}, "reference_field"),
])
def test_schema_errors_name_the_field(capsys, tmp_path, doc, where):
    code, _, err = run(capsys, "check", write(tmp_path, doc))
    assert code == 2 and where in err


def test_reports_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "check", "--system", "single_integrator_2d", "--seed", "3", "-o", str(p))
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert strip_timing(da) == strip_timing(db)
    assert all("timing_s" in rec for rec in da["checks"])


def test_level_sweep(capsys):
    code, out, _ = run(capsys, "check", "--system", "single_integrator_2d", "--condition", "homology",
                       "--level", "0.25", "--level", "0.5", "--json")
    recs = json.loads(out)["checks"]
    assert code == 0 and [r["parameters"]["level"] for r in recs] == [0.25, 0.5]
    assert all(r["status"] == "Holds" for r in recs)
    code, _, _ = run(capsys, "check", "--system", "single_integrator_2d", "--condition", "homology", "--level", "9")
    assert code == 3


def test_custom_config_with_mesh_target(capsys, tmp_path):
    write_mesh(circle_loop(n=48).to_complex(), tmp_path / "circle.mesh")
    cfg = write(tmp_path, {
        "format": "stabtopo-config/1",
        "system": {"name": "plane", "n": 2, "dynamics": ["u1", "u2"], "control_box": [[-1, 1], [-1, 1]]},
        "target": {"variant": "hypersurface", "mesh": "circle.mesh", "neighborhood": [[-2, 2], [-2, 2]]},
        "reference_field": ["(1 - x1^2 - x2^2)*x1", "(1 - x1^2 - x2^2)*x2"],
        "lyapunov": {"V": "(x1^2 + x2^2 - 1)^2", "c": 0.2},
        "cycles": [{"kind": "circle", "center": [0, 0], "radius": 1.5, "section": ["0.5*x1", "0.5*x2"]}],
        "conditions": ["mansouri", "homology"],
    })
    code, out, _ = run(capsys, "check", cfg, "--json")
    recs = {r["condition"]: r for r in json.loads(out)["checks"]}
    assert code == 0
    assert recs["mansouri"]["status"] == "Holds" and recs["homology"]["status"] == "Holds"


def test_audit_over_catalog(capsys, tmp_path):
    cfg = write(tmp_path, {"format": "stabtopo-config/1", "system": {"catalog": "all"}, "conditions": ["audit"],
                           "parameters": {"random_systems": 2}})
    out_path = tmp_path / "audit.json"
    code, out, _ = run(capsys, "check", cfg, "-o", str(out_path))
    doc = json.loads(out_path.read_text())
    assert code == 0
    assert doc["audit"]["contradictions"] == []
    assert [w["instance"] for w in doc["audit"]["independence_witnesses"]] == ["example5_circle_bundle"]
    code, _, _ = run(capsys, "recheck", str(out_path))
    assert code == 0


def test_mesh_info(capsys, tmp_path):
    T = torus7()
    # abstract torus; the coordinates only need to exist
    write_mesh(build_complex(T.top_simplices(), {v: (float(v), 0.0, 0.0) for v in T.vertices}), tmp_path / "t.mesh")
    code, out, _ = run(capsys, "mesh-info", str(tmp_path / "t.mesh"), "--json")
    info = json.loads(out)
    assert code == 0 and info["betti"] == [1, 2, 1] and info["euler"] == 0
    code, _, _ = run(capsys, "mesh-info", str(tmp_path / "none.mesh"))
    assert code == 2
