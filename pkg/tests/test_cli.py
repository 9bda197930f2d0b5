"""End-to-end runs of the command line frontend."""

from __future__ import annotations

import json
import random

import pytest

from chambord import braid as br
from chambord import complex as cx
from chambord import diagram as dg
from chambord.cli import main
from chambord.grammar import catalog, eta, parse_presentation


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _write(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


def _sample_diagram():
    rng = random.Random(9)
    pres, w = catalog("thompsonV")
    return dg.random_element(pres, w, rng, atoms=3)


def test_parse_ok(capsys):
    assert main(["parse", "<a | a = a a>"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["presentation"]["letters"] == ["a"]


def test_parse_undeclared_letter_fails(capsys):
    assert main(["parse", "<a|a=b>"]) == 1
    assert "dsl-syntax" in capsys.readouterr().err


def test_parse_catalog(capsys):
    assert main(["parse", "--catalog", "houghton(2)"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["baseword"] == ["a"]


def test_eq_double_inverse(workdir, capsys):
    d = _sample_diagram()
    a = _write(workdir / "a.json", d.to_obj())
    b = _write(workdir / "b.json", dg.reduce(dg.inverse(dg.inverse(d))).to_obj())
    assert main(["eq", a, b]) == 0
    assert capsys.readouterr().out.strip() == "equal"


def test_mul_inv_reduce_roundtrip(workdir, capsys):
    d = _sample_diagram()
    a = _write(workdir / "a.json", d.to_obj())
    assert main(["inv", a, "--out", str(workdir / "ainv.json")]) == 0
    assert main(["mul", a, str(workdir / "ainv.json"), "--out", str(workdir / "prod.json")]) == 0
    prod = dg.ClosedDiagram.from_obj(json.loads((workdir / "prod.json").read_text()))
    assert prod == dg.identity(d.pres, d.baseword)
    assert main(["reduce", a]) == 0


def test_forget_outputs_shift(workdir, capsys):
    d = _sample_diagram()
    a = _write(workdir / "a.json", d.to_obj())
    assert main(["forget", a]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["balanced"] is True


def test_ball_json_and_dot(workdir, capsys):
    assert main(["ball", "--catalog", "thompsonV", "--radius", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["vertices"] and out["edges"]
    assert main(
        ["ball", "--catalog", "thompsonV", "--radius", "2", "--format", "dot",
         "--out", str(workdir / "ball.dot")]
    ) == 0
    assert (workdir / "ball.dot").read_text().startswith("graph ball {")


def test_audit_artifacts(workdir, capsys):
    assert main(
        ["audit", "--catalog", "thompsonV", "--radius", "2", "--out", str(workdir / "rep")]
    ) == 0
    report = json.loads((workdir / "rep" / "audit.json").read_text())
    assert report["audit"]["passed"] is True
    csv_text = (workdir / "rep" / "audit.csv").read_text()
    assert "no_k32,yes" in csv_text
    assert (workdir / "rep" / "audit.svg").exists()


def test_audit_inline_presentation(workdir):
    assert main(
        ["audit", "-p", "<x | x = x x>", "-w", "x", "--radius", "2",
         "--out", str(workdir / "rep2")]
    ) == 0


def test_stab_and_project(workdir, capsys):
    pres, w = catalog("thompsonV")
    f = eta(pres, w).expand((0, ()))
    g = dg.ClosedDiagram(f, f, br.make(1, 2, (), 1))
    gfile = _write(workdir / "g.json", g.to_obj())
    v = cx.resting_rep(f)
    vfile = _write(workdir / "v.json", v.to_obj())
    assert main(["stab", gfile, vfile]) == 0
    assert capsys.readouterr().out.strip() == "stabilizes"
    ffile = _write(
        workdir / "f.json", {"presentation": pres.to_obj(), "forest": f.to_obj()}
    )
    assert main(["project", gfile, ffile, "--out", str(workdir / "proj.json")]) == 0
    proj = dg.ClosedDiagram.from_obj(json.loads((workdir / "proj.json").read_text()))
    assert proj == dg.identity(pres, w)


def test_witness(capsys):
    assert main(["witness", "--depth", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"] is True


def test_selftest_budget_zero(capsys):
    assert main(["selftest", "--budget", "0"]) == 0
    assert "budget 0" in capsys.readouterr().out


def test_render_deterministic(workdir, capsys):
    d = _sample_diagram()
    a = _write(workdir / "a.json", d.to_obj())
    assert main(["render", a, "--out", str(workdir / "one.svg")]) == 0
    assert main(["render", a, "--out", str(workdir / "two.svg")]) == 0
    one = (workdir / "one.svg").read_bytes()
    two = (workdir / "two.svg").read_bytes()
    assert one == two
    assert one.startswith(b"<?xml")


def test_render_identity(workdir):
    pres, w = catalog("thompsonV")
    e = dg.identity(pres, w)
    a = _write(workdir / "e.json", e.to_obj())
    assert main(["render", a, "--out", str(workdir / "e.svg")]) == 0
    assert (workdir / "e.svg").exists()


def test_ball_budget_exceeded(workdir, capsys):
    code = main(
        ["ball", "--catalog", "thompsonV", "--radius", "4", "--budget", "3"]
    )
    assert code == 1
    assert "budget-exceeded" in capsys.readouterr().err
