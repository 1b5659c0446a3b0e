"""Command-line interface.

Exit codes: 0 success / all checks pass, 1 mathematical failure (axiom
violated, no equivalence, not trivializable), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _tensor as T
from . import fixtures
from .algebra import DimensionError, HLR3Algebra, VerificationReport, verify_all, verify_hom_jacobi
from .cohomology import (
    Cochain,
    CochainError,
    ConventionFault,
    DegreeError,
    cohomology_dim,
    delta,
    delta_direct,
    literal_cocycle_report,
)
from .constructions import (
    ConstructionError,
    fiber_product,
    module_semidirect_sum,
    semidirect_product,
    tensor_extension,
    yau_twist,
)
from .deformations import (
    DeformationError,
    apply_equivalence,
    check_deformation,
    infinitesimal_class,
    multiderivation_check,
    solve_trivializer,
    trivialize_step,
)
from .exact_linalg import format_rational
from .extensions import (
    ExtensionError,
    automorphism_space,
    build_extension,
    canonical_section,
    find_equivalence,
    section_to_cocycle,
)
from .io import DeformationData, SchemaError, dumps, loads, parse
from .modules import adjoint_module, base_module, module_check, trivial_module, zero_module

OK, FAIL, BAD_INPUT = 0, 1, 2

MODULE_NAMES = {
    "adjoint": adjoint_module,
    "base": base_module,
    "trivial": trivial_module,
    "zero": zero_module,
}


class InputError(Exception):
    pass


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def report(self, payload: dict, text: str):
        if self.as_json:
            print(json.dumps(payload, indent=1, default=str))
        else:
            print(text)


# --- argument loading --------------------------------------------------------------


def _load(ref: str, kind: str):
    """Parse a manifest file; algebra refs may also name a bundled fixture (F1..F4)."""
    p = Path(ref)
    if kind == "algebra" and not p.exists() and p.stem in fixtures.NAMES:
        return fixtures.load(p.stem)
    man = parse(ref)
    if man.kind != kind:
        raise InputError(f"{ref}: expected kind {kind!r}, got {man.kind!r}")
    return man.data


def _load_module(alg: HLR3Algebra, ref: str):
    if ref in MODULE_NAMES:
        return MODULE_NAMES[ref](alg)
    return _load(ref, "module")


def _load_matrix(ref: str) -> np.ndarray:
    """A linear_map file, or an inline JSON matrix of rationals."""
    if Path(ref).exists():
        return _load(ref, "linear_map")
    try:
        data = json.loads(ref)
    except json.JSONDecodeError:
        raise InputError(f"{ref!r} is neither a file nor an inline JSON matrix") from None
    from .io import _tensor

    if not isinstance(data, list) or not data or not isinstance(data[0], list):
        raise InputError(f"inline matrix {ref!r} must be a list of rows")
    return _tensor(data, (len(data), len(data[0])), "$inline")


def _degrees(spec: str) -> list[int]:
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in spec.split(",")]
    except ValueError:
        raise InputError(f"bad degree range {spec!r}; use 0..2 or 0,1") from None


def _emit(obj, out: str | None, **kw):
    text = dumps(obj, **kw)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(o: _Out, rep: VerificationReport) -> int:
    o.report(rep.to_dict(), str(rep))
    return OK if rep.passed else FAIL


# --- commands ------------------------------------------------------------------------


def cmd_verify(a, o: _Out) -> int:
    alg = _load(a.algebra, "algebra")
    if a.module:
        return _report(o, module_check(alg, _load_module(alg, a.module)))
    rep = verify_hom_jacobi(alg) if a.hom_jacobi_only else verify_all(alg)
    return _report(o, rep)


def cmd_construct(a, o: _Out) -> int:
    ins = a.inputs
    need = {"twist": 1, "tensor": 2, "fiber": 2, "semidirect": 1, "modsum": 2}[a.which]
    if len(ins) != need:
        raise InputError(f"construct {a.which} takes {need} --in file(s), got {len(ins)}")
    if a.which == "twist":
        alg = _load(ins[0], "algebra")
        if a.alpha is None:
            raise InputError("twist needs --alpha")
        phi = _load_matrix(a.phi) if a.phi else T.identity(alg.A.dim)
        out = yau_twist(alg, phi, _load_matrix(a.alpha))
    elif a.which == "tensor":
        L3 = _load(ins[0], "algebra")
        A = _load(ins[1], "comm_algebra")
        rho = _load(a.rho, "anchor") if a.rho else None
        out = tensor_extension(L3, A, rho)
    elif a.which == "fiber":
        out = fiber_product(_load(ins[0], "algebra"), _load(ins[1], "algebra"))
    elif a.which == "semidirect":
        out = semidirect_product(_load(ins[0], "algebra"))
    else:
        alg = _load(ins[0], "algebra")
        out = module_semidirect_sum(alg, _load_module(alg, ins[1]))
        rep = verify_all(out)
        if not rep.passed:
            o.report(rep.to_dict(), str(rep))
            return FAIL
    _emit(out, a.out)
    return OK


def cmd_cohomology(a, o: _Out) -> int:
    alg = _load(a.algebra, "algebra")
    mod = _load_module(alg, a.module)
    res = {}
    for n in _degrees(a.degrees):
        res[n] = cohomology_dim(alg, mod, n).to_dict()
    lines = [f"H^{n}: dimC={d['dimC']} dimZ={d['dimZ']} dimB={d['dimB']} dimH={d['dimH']}" for n, d in res.items()]
    o.report({str(n): d for n, d in res.items()}, "\n".join(lines))
    return OK


def cmd_delta(a, o: _Out) -> int:
    alg = _load(a.algebra, "algebra")
    mod = _load_module(alg, a.module)
    f = _load(a.cochain, "cochain")
    df = delta(alg, mod, f)
    agree = not np.any(df.values != delta_direct(alg, mod, f).values)
    info = {"degree": f.degree, "cocycle": df.is_zero(), "dual_path_agree": agree}
    if f.degree <= 1:
        lit = literal_cocycle_report(alg, mod, f)
        info.update({"literal": lit["literal"], "canonical": lit["canonical"], "literal_agrees": lit["agree"]})
    if a.out:
        _emit(df, a.out)
    o.report(info, "\n".join(f"{k}: {v}" for k, v in info.items()))
    return OK if agree else FAIL


def _ext_report(ext) -> dict:
    return {"valid": ext.valid, "report": ext.report.to_dict()}


def cmd_extension(a, o: _Out) -> int:
    if a.which == "build":
        alg = _load(a.files[0], "algebra")
        mod = _load_module(alg, a.files[1])
        omega = _load(a.files[2], "cochain")
        ext = build_extension(alg, mod, omega)
        if not ext.valid:
            o.report(_ext_report(ext), str(ext.report))
            return FAIL
        _emit(ext, a.out)
        return OK
    ext = _load(a.files[0], "extension")
    if a.which == "cocycle":
        sec = canonical_section(ext.base, ext.fiber)
        if a.section:
            from .extensions import Section

            sec = Section(_load_matrix(a.section))
        sc = section_to_cocycle(ext, sec)
        _emit(sc.omega, a.out)
        return OK
    if a.which == "equiv":
        other = _load(a.files[1], "extension")
        nu = find_equivalence(ext, other)
        if nu is None:
            o.report({"equivalent": False}, "no equivalence exists")
            return FAIL
        if a.out:
            _emit(nu, a.out)
        rows = [[format_rational(v) for v in row] for row in nu.values]
        o.report({"equivalent": True, "nu": rows}, "equivalent; nu = " + json.dumps(rows))
        return OK
    # auts
    space = automorphism_space(ext)
    z0 = cohomology_dim(ext.base, ext.fiber, 0)
    h1 = cohomology_dim(ext.base, ext.fiber, 1)
    info = {"dim_automorphisms": space.dim, "dimZ0": z0.dim_Z, "dimH1": h1.dim_H}
    o.report(info, "\n".join(f"{k}: {v}" for k, v in info.items()))
    return OK


def _series(a, alg):
    data = _load(a.deformation, "deformation")
    if data.symbols is not None and not a.symbols:
        raise InputError("deformation file carries symbols; pass --symbols to use them")
    if a.order is not None and a.which != "trivialize":
        if a.order > data.order:
            raise InputError(f"--order {a.order} exceeds the file order {data.order}")
        data = DeformationData(data.terms[: a.order], data.symbols[: a.order] if data.symbols else None)
    series = data.series(alg)
    for i, t in enumerate(series.terms[1:], start=1):
        rep = multiderivation_check(alg, t)
        if not rep.passed:
            raise DeformationError(f"term m_{i} is not a multiderivation", rep)
    return series


def cmd_deform(a, o: _Out) -> int:
    alg = _load(a.algebra, "algebra")
    series = _series(a, alg)
    keep_symbols = bool(a.symbols)
    if a.which == "check":
        return _report(o, check_deformation(alg, series, a.mode))
    if a.which == "infinitesimal":
        ic = infinitesimal_class(alg, series)
        if ic.trivial_to_order:
            info = {"trivial_to_order": series.order, "rigidity": ic.rigidity}
        else:
            info = {
                "order": ic.order,
                "cocycle": ic.is_cocycle,
                "coboundary": ic.is_coboundary,
                "coboundary_dim": ic.coboundary_basis.dim,
                "rigidity": ic.rigidity,
            }
        o.report(info, "\n".join(f"{k}: {v}" for k, v in info.items()))
        return OK
    if a.which == "equiv":
        if not a.automorphism:
            raise InputError("deform equiv needs --automorphism FILE")
        Phi = _load(a.automorphism, "automorphism").automorphism(alg)
        out = apply_equivalence(alg, series, Phi)
        _emit(DeformationData.from_series(out, keep_symbols), a.out)
        return OK
    # trivialize
    n = a.order if a.order is not None else series.first_nonzero()
    if n is None:
        o.report({"trivial": True}, "series is already trivial")
        return OK
    if not 1 <= n <= series.order:
        raise InputError(f"order {n} is outside 1..{series.order}")
    phi = solve_trivializer(alg, series.terms[n].map)
    if phi is None:
        o.report({"trivializable": False, "order": n}, f"not trivializable at order {n}")
        return FAIL
    out = trivialize_step(alg, series, n, phi)
    _emit(DeformationData.from_series(out, keep_symbols), a.out)
    return OK


def cmd_fixtures(a, o: _Out) -> int:
    if a.which == "list":
        o.report({"fixtures": list(fixtures.NAMES)}, "\n".join(fixtures.NAMES))
        return OK
    if a.name not in fixtures.NAMES:
        raise InputError(f"unknown fixture {a.name!r}; known: {', '.join(fixtures.NAMES)}")
    text = fixtures.text(a.name)
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


# --- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hlr3", description="3-Hom-Lie-Rinehart algebras over exact rationals")
    p.add_argument("--json", action="store_true", help="machine-readable reports")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check the algebra axioms (or module conditions with --module)")
    v.add_argument("algebra")
    v.add_argument("--module", help="module file or adjoint|base|trivial|zero")
    v.add_argument("--hom-jacobi-only", action="store_true")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("construct", help="build twist|tensor|fiber|semidirect|modsum")
    c.add_argument("which", choices=["twist", "tensor", "fiber", "semidirect", "modsum"])
    c.add_argument("--in", dest="inputs", nargs="+", required=True)
    c.add_argument("--out")
    c.add_argument("--phi", help="twist on A (file or inline JSON matrix)")
    c.add_argument("--alpha", help="twist on L (file or inline JSON matrix)")
    c.add_argument("--rho", help="anchor file for tensor")
    c.set_defaults(func=cmd_construct)

    h = sub.add_parser("cohomology", help="dimensions of C, Z, B, H")
    h.add_argument("algebra")
    h.add_argument("module")
    h.add_argument("--degrees", default="0..2")
    h.set_defaults(func=cmd_cohomology)

    d = sub.add_parser("delta", help="coboundary of a cochain")
    d.add_argument("algebra")
    d.add_argument("module")
    d.add_argument("cochain")
    d.add_argument("--out")
    d.set_defaults(func=cmd_delta)

    e = sub.add_parser("extension", help="build|cocycle|equiv|auts")
    e.add_argument("which", choices=["build", "cocycle", "equiv", "auts"])
    e.add_argument("files", nargs="+")
    e.add_argument("--section", help="section matrix for cocycle")
    e.add_argument("--out")
    e.set_defaults(func=cmd_extension)

    f = sub.add_parser("deform", help="check|infinitesimal|equiv|trivialize")
    f.add_argument("which", choices=["check", "infinitesimal", "equiv", "trivialize"])
    f.add_argument("algebra")
    f.add_argument("deformation")
    f.add_argument("--order", type=int)
    f.add_argument("--mode", choices=["strict-order", "full-truncation"], default="strict-order")
    f.add_argument("--automorphism")
    f.add_argument("--symbols", action="store_true", help="use symbol-carrying terms")
    f.add_argument("--out")
    f.set_defaults(func=cmd_deform)

    x = sub.add_parser("fixtures", help="list|emit bundled fixtures")
    x.add_argument("which", choices=["list", "emit"])
    x.add_argument("name", nargs="?")
    x.add_argument("--out")
    x.set_defaults(func=cmd_fixtures)
    return p


EXTENSION_ARITY = {"build": 3, "cocycle": 1, "equiv": 2, "auts": 1}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return OK if e.code == 0 else BAD_INPUT
    o = _Out(a.json)
    try:
        if a.command == "extension" and len(a.files) != EXTENSION_ARITY[a.which]:
            raise InputError(f"extension {a.which} takes {EXTENSION_ARITY[a.which]} file(s)")
        if a.command == "fixtures" and a.which == "emit" and not a.name:
            raise InputError("fixtures emit needs a name")
        return a.func(a, o)
    except (ConstructionError, ExtensionError, DeformationError, ConventionFault) as e:
        print(f"error: {e}", file=sys.stderr)
        return FAIL
    except (InputError, SchemaError, DimensionError, CochainError, DegreeError, KeyError, OSError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return BAD_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
