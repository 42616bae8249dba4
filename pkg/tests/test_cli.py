import json
import subprocess
import sys
from pathlib import Path

import pytest

from polysub import engine
from polysub.cli import main

CORPUS = Path(__file__).parent / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_gen_and_census(tmp_path, capsys):
    scene = tmp_path / "e.scene"
    code, rep = run(capsys, "gen", "--d", 2, "--m", 2, "--ell", 3, "--out", scene)
    assert code == 0
    assert rep["outputs"]["n"] == "6" and rep["outputs"]["predicted_vertices"] == "12"
    code, rep = run(capsys, "census", "--in", scene)
    assert code == 0
    assert rep["outputs"]["vertices"] == "12" and rep["outputs"]["bound_ok"] is True
    code, sub = run(capsys, "census", "--in", scene, "--method", "subset")
    assert sub["outputs"]["vertices"] == "12"


def test_gen_reports_both_laws(tmp_path, capsys):
    code, rep = run(capsys, "gen", "--d", 3, "--m", 2, "--ell", 3, "--out", tmp_path / "x.scene")
    assert rep["outputs"]["n"] == "10"
    assert rep["outputs"]["predicted_vertices"] == "48"
    assert rep["outputs"]["product_law_vertices"] == "24"


def test_report_shape(capsys):
    code, rep = run(capsys, "census", "--in", CORPUS / "square.scene")
    assert set(rep) == {"command", "args", "input_digest", "outputs", "timing"}
    assert rep["command"] == "census"
    assert rep["outputs"]["counts"] == ["4", "4", "2"]
    assert len(rep["input_digest"]) == 64


def test_gen_bad_params(tmp_path, capsys):
    assert main(["gen", "--d", "2", "--m", "2", "--ell", "2", "--out", str(tmp_path / "x")]) == 2
    assert main(["gen", "--d", "1", "--m", "2", "--ell", "3", "--out", str(tmp_path / "x")]) == 2
    with pytest.raises(SystemExit) as info:
        main(["gen", "--d", "two"])
    assert info.value.code == 2


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.scene"
    bad.write_text("dim 2\ncolors 1\nh 0 1 0 1/0\n")
    assert main(["census", "--in", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err
    assert main(["census", "--in", str(tmp_path / "missing.scene")]) == 2


def test_bound_exit(monkeypatch, capsys):
    monkeypatch.setattr(engine, "vertex_bound", lambda n, m, d: 0)
    assert main(["census", "--in", str(CORPUS / "square.scene")]) == 3
    assert main(["census", "--in", str(CORPUS / "square.scene"), "--method", "subset"]) == 3


def test_perturb_verify(tmp_path, capsys):
    out, log = tmp_path / "p.scene", tmp_path / "p.log"
    code, rep = run(capsys, "perturb", "--in", CORPUS / "coincident_squares.scene", "--out", out, "--log", log)
    assert code == 0 and rep["outputs"]["general_position"] is True
    assert log.read_text().count("\n") == int(rep["outputs"]["steps"]) == 8
    code, rep = run(capsys, "verify", "--before", CORPUS / "coincident_squares.scene", "--after", out)
    assert code == 0 and rep["outputs"]["monotone"] is True
    code, rep = run(capsys, "charge", "--in", out)
    assert code == 0 and rep["outputs"]["injective"] is True


def test_verify_violation_exit(tmp_path, capsys):
    after = tmp_path / "after.scene"
    after.write_text("dim 2\ncolors 2\ndelta 1\nh 0 1 0 1\nh 1 -1 0 6\nh 1 0 -1 6\nh 1 1 1 12\n")
    assert main(["verify", "--before", str(CORPUS / "square.scene"), "--after", str(after)]) == 4


def test_charge(capsys):
    code, rep = run(capsys, "charge", "--in", CORPUS / "square.scene")
    assert code == 0 and rep["outputs"]["vertices"] == "4" and rep["outputs"]["injective"]
    assert main(["charge", "--in", str(CORPUS / "coincident_squares.scene")]) == 5
    assert "perturb" in capsys.readouterr().err


def test_product_and_export(tmp_path, capsys):
    a = tmp_path / "a.scene"
    a.write_text("dim 1\ncolors 2\nh 0 1 1\nh 0 -1 1\nh 1 1 2\nh 1 -1 2\n")
    out = tmp_path / "ab.scene"
    code, rep = run(capsys, "product", "--a", a, "--b", a, "--out", out)
    assert code == 0 and rep["outputs"]["d"] == "2" and rep["outputs"]["n"] == "8"
    code, rep = run(capsys, "census", "--in", out)
    # nested squares: 8 vertices
    assert rep["outputs"]["vertices"] == "8"
    ine = tmp_path / "sq.ine"
    code, rep = run(capsys, "export-ine", "--in", CORPUS / "square.scene", "--color", 0, "--out", ine)
    assert code == 0 and rep["outputs"]["rows"] == "4"
    assert ine.read_text().splitlines()[2] == "4 3 rational"
    assert main(["product", "--a", str(a), "--b", str(CORPUS / "square.scene"), "--out", str(out)]) == 2


def test_threads_do_not_change_report(capsys):
    _, one = run(capsys, "census", "--in", CORPUS / "cube_slab.scene")
    _, two = run(capsys, "census", "--in", CORPUS / "cube_slab.scene", "--threads", 2)
    assert one["outputs"] == two["outputs"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "polysub", "census", "--in", str(CORPUS / "square.scene")],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["outputs"]["vertices"] == "4"
