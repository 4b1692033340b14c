import csv
import json

import pytest

from fold_atlas.cli import main


def spec(tmp_path, coeffs, order=5, name="s.json"):
    path = tmp_path / name
    doc = {"order": order, "coefficients": [{"i": i, "j": j, "a": str(a)} for (i, j), a in coeffs.items()]}
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(["--no-timings", *argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


B2 = {(2, 0): 1, (2, 1): 2, (0, 5): 120}
S1 = {(2, 0): 1, (0, 2): 2, (2, 1): 2, (0, 3): 6}
S2_UMBILIC = {(2, 0): 1, (0, 2): 1, (0, 3): 6, (3, 1): 6}


def test_classify(tmp_path, capsys):
    code, doc, _ = run(capsys, "classify", spec(tmp_path, B2))
    assert code == 0 and doc["schema"] == "fold-atlas/1"
    assert doc["body"]["class"] == "B2"
    assert run(capsys, "classify", spec(tmp_path, {(1, 1): 1}))[1]["body"]["class"] == "S0"
    assert run(capsys, "classify", spec(tmp_path, {}))[1]["body"]["class"] == "BeyondCodim2"


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "classify", str(bad))[0] == 2
    assert run(capsys, "classify", spec(tmp_path, {(1, 0): 1}))[0] == 2
    assert run(capsys, "classify", str(tmp_path / "missing.json"))[0] == 2
    dup = tmp_path / "dup.json"
    dup.write_text(json.dumps({"order": 5, "coefficients": [{"i": 2, "j": 0, "a": "1"}] * 2}))
    assert run(capsys, "classify", str(dup))[0] == 2
    flt = tmp_path / "flt.json"
    flt.write_text(json.dumps({"order": 5, "coefficients": [{"i": 2, "j": 0, "a": "0.1x"}]}))
    assert run(capsys, "classify", str(flt))[0] == 2


def test_insufficient_jet(tmp_path, capsys):
    assert run(capsys, "classify", spec(tmp_path, S1, order=4))[0] == 3


def test_versal(tmp_path, capsys):
    code, doc, _ = run(capsys, "versal", spec(tmp_path, S2_UMBILIC))
    assert code == 0
    assert doc["body"]["versal"] is False and doc["body"]["reason"] == "umbilic"
    assert run(capsys, "versal", spec(tmp_path, S1))[1]["body"]["versal"] is True
    transverse = {(2, 0): 1, (2, 1): 2, (1, 3): 6, (0, 5): 120}
    body = run(capsys, "versal", spec(tmp_path, transverse))[1]["body"]
    assert body["versal"] and body["versal_geometric"] and body["versal_by_formula"]
    assert body["codimension"] == 2 and body["rows"] == 63


def test_versal_unsupported_and_dump(tmp_path, capsys):
    assert run(capsys, "versal", spec(tmp_path, {}))[0] == 4
    code, doc, _ = run(capsys, "versal", "--dump-matrix", spec(tmp_path, S1))
    assert code == 0 and doc["body"]["matrix"]["rows"] == 30


def test_versal_invariant_failure(tmp_path, capsys):
    edge = {(2, 0): 1, (0, 2): 1, (2, 1): 2, (3, 0): 1, (1, 2): 3, (0, 5): 120}
    code, _, err = run(capsys, "versal", spec(tmp_path, edge))
    assert code == 5 and "resultant_bracket" in err


def test_geometry(tmp_path, capsys):
    body = run(capsys, "geometry", spec(tmp_path, B2))[1]["body"]
    assert (body["v2_ridge"], body["v2_subparabolic"]) == (True, False)
    body = run(capsys, "geometry", spec(tmp_path, S1))[1]["body"]
    assert (body["v2_ridge"], body["v2_subparabolic"]) == (False, False)
    body = run(capsys, "geometry", spec(tmp_path, S2_UMBILIC))[1]["body"]
    assert body["umbilic"] and len(body["umbilic_report"]["conditions"]) == 5


def test_geometry_grid_csv(tmp_path, capsys):
    out = tmp_path / "field.csv"
    code, doc, _ = run(capsys, "geometry", spec(tmp_path, S1), "--grid=-0.1,0.1,-0.1,0.1,3", "--csv", str(out))
    assert code == 0 and doc["body"]["grid"]["umbilic_cells"] == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["u", "v", "k1", "k2", "v2x", "v2y", "dk2_dv2"] and len(rows) == 10


def test_output_is_byte_stable(tmp_path, capsys):
    path = spec(tmp_path, B2)
    main(["--no-timings", "versal", path])
    a = capsys.readouterr().out
    main(["--no-timings", "versal", path])
    assert capsys.readouterr().out == a
    main(["versal", path])
    timed = json.loads(capsys.readouterr().out)
    assert "timings" in timed and timed["body_sha256"] == json.loads(a)["body_sha256"]


def test_bifurcation(tmp_path, capsys):
    prefix = str(tmp_path / "b2")
    code, doc, _ = run(capsys, "bifurcation", "B2", "--a-min", "0", "--a-max", "1", "-n", "100", "--out", prefix)
    assert code == 0
    last = doc["body"]["branches"]["bi_germ"]["last"]
    assert last["s"] == pytest.approx(1, abs=1e-12) and last["t"] == pytest.approx(-2, abs=1e-12)
    code, doc, _ = run(capsys, "bifurcation", "S2", "-n", "0", "--out", str(tmp_path / "e"))
    assert code == 0 and (tmp_path / "e.csv").exists() and (tmp_path / "e.svg").exists()
    assert run(capsys, "bifurcation", "C5", "--out", prefix)[0] == 2


def test_s2_cusp(tmp_path, capsys):
    prefix = str(tmp_path / "s2")
    run(capsys, "bifurcation", "S2", "-n", "21", "--out", prefix)
    rows = [r for r in csv.DictReader(open(prefix + ".csv")) if r["branch"] == "mono_germ"]
    mid = rows[10]
    assert float(mid["s"]) == 0 and float(mid["t"]) == 0


def test_render_fold(tmp_path, capsys):
    out = tmp_path / "mesh.csv"
    code, doc, _ = run(capsys, "render-fold", "--fig1", "0.6", "--region=-0.6,0.6,-0.6,0.6", "--resolution", "3", "--out", str(out))
    assert code == 0 and doc["body"]["points"] == 9
    rows = [tuple(map(float, r)) for r in list(csv.reader(open(out)))[1:]]
    up = next(r for r in rows if r[0] == 0 and r[1] == 0.6)
    down = next(r for r in rows if r[0] == 0 and r[1] == -0.6)
    assert max(abs(p - q) for p, q in zip(up[2:], down[2:])) < 1e-12


def test_render_fold_flat_and_directions(tmp_path, capsys):
    flat = spec(tmp_path, {})
    out = tmp_path / "flat.csv"
    run(capsys, "render-fold", "--surface", flat, "--resolution", "4", "--out", str(out))
    rows = [list(map(float, r)) for r in list(csv.reader(open(out)))[1:]]
    assert all(r[3] >= 0 and r[4] == 0 for r in rows)
    base = tmp_path / "base.csv"
    surf = spec(tmp_path, S1)
    run(capsys, "render-fold", "--surface", surf, "--resolution", "4", "--out", str(out))
    run(capsys, "render-fold", "--surface", surf, "--resolution", "4", "--v", "0,1,0", "--out", str(base))
    assert open(out).read() == open(base).read()
    assert run(capsys, "render-fold", "--surface", surf, "--v", "0,0,1", "--out", str(base))[0] == 2


def test_self_tangency(tmp_path, capsys):
    code, doc, _ = run(capsys, "self-tangency", "--fig1", "0.6")
    assert code == 0
    (pair,) = doc["body"]["pairs"]
    assert pair["point"] == pytest.approx([0, 0.6], abs=1e-12)
    assert run(capsys, "self-tangency", "--fig1", "0")[1]["body"]["pairs"] == []
    even = spec(tmp_path, {(2, 0): 1, (0, 2): 1})
    assert run(capsys, "self-tangency", "--surface", even)[0] == 2


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "fold_atlas", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "render-fold" in res.stdout
