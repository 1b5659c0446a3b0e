import json
import subprocess
import sys

import pytest

from hlr3 import _tensor as T
from hlr3 import fixtures
from hlr3.cli import run
from hlr3.cohomology import Cochain, cochain_space, cocycle_basis, delta
from hlr3.deformations import DeformationSeries, FormalAutomorphism, apply_equivalence
from hlr3.io import AutomorphismData, DeformationData, parse, write
from hlr3.modules import adjoint_module


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_verify_fixtures(capsys):
    for name in fixtures.NAMES:
        assert run(["verify", name]) == 0
    assert run(["--json", "verify", "F2", "--hom-jacobi-only"]) == 0
    capsys.readouterr()
    assert run(["verify", "F4", "--module", "adjoint"]) == 1
    assert run(["verify", "F4", "--module", "base"]) == 0


def test_verify_reports_a_failure(tmp_path, F2, capsys):
    b = F2.bracket.copy()
    b[0, 1, 3, 0] = 1
    p = tmp_path / "bad.json"
    write(F2.replace(bracket=b), p)
    assert run(["--json", "verify", str(p)]) == 1
    rep = _json(capsys)
    assert not rep["passed"]


def test_malformed_inputs_exit_2(tmp_path):
    p = tmp_path / "bad.json"
    doc = json.loads(fixtures.text("F2"))
    doc["payload"]["bracket"][0][1][2][3] = "1/0"
    p.write_text(json.dumps(doc))
    assert run(["verify", str(p)]) == 2
    p.write_text(fixtures.text("F2")[:100])
    assert run(["verify", str(p)]) == 2
    assert run(["verify", str(tmp_path / "nothing.json")]) == 2
    assert run(["verify"]) == 2
    assert run(["frobnicate"]) == 2
    assert run(["cohomology", "F2", "adjoint", "--degrees", "a..b"]) == 2


def test_construct(tmp_path, capsys):
    out = tmp_path / "tw.json"
    assert run(["construct", "twist", "--in", "F2", "--alpha", "[[-1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,-1]]", "--out", str(out)]) == 0
    assert parse(out).data == fixtures.build("F3")
    assert run(["construct", "twist", "--in", "F2", "--alpha", "[[2,0,0,0],[0,2,0,0],[0,0,2,0],[0,0,0,2]]"]) == 1
    assert run(["construct", "semidirect", "--in", "F2", "--out", str(tmp_path / "s.json")]) == 0
    assert run(["construct", "modsum", "--in", "F2", "adjoint", "--out", str(tmp_path / "m.json")]) == 0
    assert run(["construct", "fiber", "--in", "F1", "F2", "--out", str(tmp_path / "f.json")]) == 0
    assert parse(tmp_path / "f.json").data.L_dim == 7
    assert run(["construct", "twist", "--in", "F2"]) == 2
    capsys.readouterr()


def test_cohomology(capsys):
    assert run(["--json", "cohomology", "F2", "adjoint", "--degrees", "0..2"]) == 0
    res = _json(capsys)
    assert [(res[k]["dimZ"], res[k]["dimB"], res[k]["dimH"]) for k in "012"] == [(12, 0, 12), (13, 4, 9), (24, 3, 21)]


def test_delta(tmp_path, F2, capsys):
    ad = adjoint_module(F2)
    z = cocycle_basis(F2, ad, 1)[0]
    p = tmp_path / "z.json"
    write(z, p, module_ref="adjoint")
    assert run(["--json", "delta", "F2", "adjoint", str(p), "--out", str(tmp_path / "dz.json")]) == 0
    info = _json(capsys)
    assert info["cocycle"] and info["dual_path_agree"] and info["canonical"]
    assert parse(tmp_path / "dz.json").data.is_zero()
    v = T.zeros((4, 4, 4, 4))
    v[0, 1, 2, 0] = 1
    write(Cochain(1, v), p)
    assert run(["delta", "F2", "adjoint", str(p)]) == 2


def test_extension_commands(tmp_path, F2, capsys):
    ad = adjoint_module(F2)
    z = cocycle_basis(F2, ad, 1)[0]
    C0 = cochain_space(F2, ad, 0)
    nu0 = C0.basis[1]
    write(z, tmp_path / "w.json")
    write(z + delta(F2, ad, nu0), tmp_path / "w2.json")
    write(z.scale(2), tmp_path / "w3.json")
    for w in ("w", "w2", "w3"):
        assert run(["extension", "build", "F2", "adjoint", str(tmp_path / f"{w}.json"), "--out", str(tmp_path / f"e{w}.json")]) == 0
    assert run(["extension", "cocycle", str(tmp_path / "ew.json"), "--out", str(tmp_path / "back.json")]) == 0
    assert parse(tmp_path / "back.json").data == z
    assert run(["--json", "extension", "equiv", str(tmp_path / "ew.json"), str(tmp_path / "ew2.json")]) == 0
    assert _json(capsys)["equivalent"]
    # w and 2w differ by w, which is not a coboundary
    assert run(["extension", "equiv", str(tmp_path / "ew.json"), str(tmp_path / "ew3.json")]) == 1
    capsys.readouterr()
    assert run(["--json", "extension", "auts", str(tmp_path / "ew.json")]) == 0
    info = _json(capsys)
    assert info == {"dim_automorphisms": 12, "dimZ0": 12, "dimH1": 9}
    assert run(["extension", "equiv", str(tmp_path / "ew.json")]) == 2


def test_extension_build_of_a_non_cocycle_exits_1(tmp_path, F2):
    ad = adjoint_module(F2)
    w = next(c for c in cochain_space(F2, ad, 1).basis if not delta(F2, ad, c).is_zero())
    write(w, tmp_path / "w.json")
    assert run(["extension", "build", "F2", "adjoint", str(tmp_path / "w.json")]) == 1


def test_deform_commands(tmp_path, F2, capsys):
    ad = adjoint_module(F2)
    Z = cocycle_basis(F2, ad, 1)
    write(DeformationData(((Z[0] + Z[4]).values,)), tmp_path / "d.json")
    assert run(["deform", "check", "F2", str(tmp_path / "d.json")]) == 0
    assert run(["deform", "check", "F2", str(tmp_path / "d.json"), "--mode", "full-truncation"]) == 1
    capsys.readouterr()
    assert run(["--json", "deform", "infinitesimal", "F2", str(tmp_path / "d.json")]) == 0
    info = _json(capsys)
    assert info["order"] == 1 and info["cocycle"]

    phi = T.identity(4)
    phi[0, 1] = 1
    base = DeformationSeries.from_maps(F2, [T.zeros((4,) * 4)] * 2)
    triv = apply_equivalence(F2, base, FormalAutomorphism(F2, (phi, T.zeros((4, 4)))))
    write(DeformationData.from_series(triv), tmp_path / "t.json")
    assert run(["deform", "trivialize", "F2", str(tmp_path / "t.json"), "--out", str(tmp_path / "t1.json")]) == 0
    assert parse(tmp_path / "t1.json").data.series(F2).first_nonzero() != 1

    write(AutomorphismData((phi,)), tmp_path / "a.json")
    assert run(["deform", "equiv", "F2", str(tmp_path / "d.json"), "--automorphism", str(tmp_path / "a.json"), "--out", str(tmp_path / "e.json")]) == 0
    assert run(["deform", "equiv", "F2", str(tmp_path / "d.json")]) == 2

    codes = [run(["deform", "trivialize", "F2", str(_single(tmp_path, z))]) for z in Z]
    assert set(codes) == {0, 1}  # coboundaries trivialize, the other cocycles do not
    capsys.readouterr()


def _single(tmp_path, z):
    p = tmp_path / "single.json"
    write(DeformationData((z.values,)), p)
    return p


def test_deform_rejects_a_non_multiderivation(tmp_path):
    v = T.zeros((4,) * 4)
    v[0, 1, 2, 0] = 1  # not skew
    write(DeformationData((v,)), tmp_path / "d.json")
    assert run(["deform", "check", "F2", str(tmp_path / "d.json")]) == 1


def test_fixtures_command(tmp_path, capsys):
    assert run(["fixtures", "list"]) == 0
    assert capsys.readouterr().out.split() == list(fixtures.NAMES)
    assert run(["fixtures", "emit", "F3", "--out", str(tmp_path / "f3.json")]) == 0
    assert (tmp_path / "f3.json").read_text() == fixtures.text("F3")
    assert run(["fixtures", "emit", "F9"]) == 2
    assert run(["fixtures", "emit"]) == 2


@pytest.mark.parametrize("args, code", [(["verify", "F1"], 0), (["construct", "twist", "--in", "F2", "--alpha", "[[2,0,0,0],[0,2,0,0],[0,0,2,0],[0,0,0,2]]"], 1), (["verify", "nope.json"], 2)])
def test_console_entry_point(args, code):
    proc = subprocess.run([sys.executable, "-m", "hlr3.cli", *args], capture_output=True, text=True)
    assert proc.returncode == code, proc.stderr
