"""Versioned JSON manifests for algebras, modules, cochains, deformations and extensions.

Every file is ``{"format_version": "hlr3/1", "kind": ..., "payload": {...}}``.
Tensors are nested lists of rationals written as strings (``"-3/4"``);
JSON integers are accepted on input, floats never are.  See docs/format.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import _tensor as T
from .algebra import CommAlgebra, HLR3Algebra, verify_all
from .cohomology import Cochain
from .exact_linalg import format_rational, parse_rational
from .extensions import ExtensionDatum, ExtensionError, _incl_proj
from .modules import LeftModule

__all__ = [
    "FORMAT_VERSION",
    "KINDS",
    "AutomorphismData",
    "DeformationData",
    "Manifest",
    "SchemaError",
    "dumps",
    "emit",
    "loads",
    "parse",
    "parse_data",
    "write",
]

FORMAT_VERSION = "hlr3/1"
KINDS = (
    "algebra",
    "module",
    "cochain",
    "deformation",
    "extension",
    "comm_algebra",
    "anchor",
    "linear_map",
    "automorphism",
)


class SchemaError(ValueError):
    """Malformed input; ``path`` is the JSON path of the first violation."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True, eq=False)
class DeformationData:
    """Deformation terms m_1..m_N (m_0 is the algebra's bracket, not stored)."""

    terms: tuple
    symbols: tuple | None = None

    @property
    def order(self) -> int:
        return len(self.terms)

    def series(self, alg: HLR3Algebra):
        from .deformations import DeformationSeries

        return DeformationSeries.from_maps(alg, list(self.terms), list(self.symbols) if self.symbols else None)

    @classmethod
    def from_series(cls, series, symbols: bool = False) -> "DeformationData":
        terms = tuple(t.map for t in series.terms[1:])
        syms = tuple(t.symbol for t in series.terms[1:]) if symbols else None
        return cls(terms, syms)

    def __eq__(self, other):
        if not isinstance(other, DeformationData):
            return NotImplemented
        same = len(self.terms) == len(other.terms) and all(_same(a, b) for a, b in zip(self.terms, other.terms))
        if (self.symbols is None) != (other.symbols is None):
            return False
        if self.symbols is not None:
            same = same and all(_same(a, b) for a, b in zip(self.symbols, other.symbols))
        return same

    __hash__ = None


@dataclass(frozen=True, eq=False)
class AutomorphismData:
    """Coefficients phi_1..phi_N of a formal automorphism (column-convention matrices)."""

    terms: tuple

    def automorphism(self, alg: HLR3Algebra):
        from .deformations import FormalAutomorphism

        return FormalAutomorphism(alg, self.terms)

    def __eq__(self, other):
        if not isinstance(other, AutomorphismData):
            return NotImplemented
        return len(self.terms) == len(other.terms) and all(_same(a, b) for a, b in zip(self.terms, other.terms))

    __hash__ = None


@dataclass(frozen=True)
class Manifest:
    kind: str
    data: Any
    payload: dict


def _same(a, b) -> bool:
    return a.shape == b.shape and not np.any(a != b)


# --- emit --------------------------------------------------------------------------


def _t(arr) -> list:
    arr = np.asarray(arr, dtype=object)
    if arr.ndim == 0:
        return format_rational(arr.item())
    return [_t(a) for a in arr]


def _comm_payload(A: CommAlgebra) -> dict:
    return {"dim": A.dim, "mult": _t(A.mult), "unit": _t(A.unit), "phi": _t(A.phi)}


def _algebra_payload(alg: HLR3Algebra) -> dict:
    return {
        "name": alg.name,
        "tags": list(alg.tags),
        "L_dim": alg.L_dim,
        "A": _comm_payload(alg.A),
        "a_action": _t(alg.a_action),
        "bracket": _t(alg.bracket),
        "alpha": _t(alg.alpha),
        "anchor": _t(alg.anchor),
    }


def _module_payload(mod: LeftModule) -> dict:
    return {
        "name": mod.name,
        "dim": mod.dim,
        "A_dim": mod.a_action.shape[0],
        "L_dim": mod.psi.shape[0],
        "a_action": _t(mod.a_action),
        "beta": _t(mod.beta),
        "psi": _t(mod.psi),
    }


def _cochain_payload(c: Cochain, module_ref: str = "") -> dict:
    return {
        "degree": c.degree,
        "L_dim": c.L_dim,
        "M_dim": c.M_dim,
        "module_ref": module_ref,
        "values": _t(c.values),
    }


def emit(obj, module_ref: str = "", certificate: dict | None = None) -> dict:
    """Manifest dict for a supported object."""
    if isinstance(obj, HLR3Algebra):
        kind, payload = "algebra", _algebra_payload(obj)
        if certificate is not None:
            payload["certificate"] = certificate
    elif isinstance(obj, LeftModule):
        kind, payload = "module", _module_payload(obj)
    elif isinstance(obj, Cochain):
        kind, payload = "cochain", _cochain_payload(obj, module_ref)
    elif isinstance(obj, CommAlgebra):
        kind, payload = "comm_algebra", _comm_payload(obj)
    elif isinstance(obj, DeformationData):
        d = obj.terms[0].shape[0] if obj.terms else 0
        payload = {"order": obj.order, "L_dim": d, "terms": [_t(t) for t in obj.terms]}
        if obj.symbols is not None:
            payload["A_dim"] = obj.symbols[0].shape[-1] if obj.symbols else 0
            payload["symbols"] = [_t(s) for s in obj.symbols]
        kind = "deformation"
    elif isinstance(obj, AutomorphismData):
        d = obj.terms[0].shape[0] if obj.terms else 0
        kind, payload = "automorphism", {"order": len(obj.terms), "L_dim": d, "terms": [_t(t) for t in obj.terms]}
    elif isinstance(obj, ExtensionDatum):
        kind = "extension"
        payload = {
            "base": _algebra_payload(obj.base),
            "fiber": _module_payload(obj.fiber),
            "total": _algebra_payload(obj.total),
            "omega": None if obj.omega is None else _cochain_payload(obj.omega),
        }
    elif isinstance(obj, np.ndarray) and obj.ndim == 2:
        kind, payload = "linear_map", {"rows": obj.shape[0], "cols": obj.shape[1], "matrix": _t(obj)}
    elif isinstance(obj, np.ndarray) and obj.ndim == 4:
        kind = "anchor"
        payload = {"L_dim": obj.shape[0], "A_dim": obj.shape[2], "values": _t(obj)}
    else:
        raise TypeError(f"cannot emit {type(obj).__name__}")
    return {"format_version": FORMAT_VERSION, "kind": kind, "payload": payload}


def dumps(obj, **kw) -> str:
    return json.dumps(emit(obj, **kw), indent=1) + "\n"


def write(obj, path, **kw):
    Path(path).write_text(dumps(obj, **kw))


# --- parse -------------------------------------------------------------------------


def _field(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise SchemaError("expected an object", path)
    if key not in d:
        raise SchemaError(f"missing field {key!r}", path)
    return d[key]


def _int(d: dict, key: str, path: str) -> int:
    v = _field(d, key, path)
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise SchemaError("expected a nonnegative integer", f"{path}.{key}")
    return v


def _scalar(x, path: str):
    if isinstance(x, bool):
        raise SchemaError("booleans are not rationals", path)
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return parse_rational(x)
        except ValueError as e:
            raise SchemaError(str(e), path) from None
    raise SchemaError(f"expected a rational string, got {type(x).__name__}", path)


def _tensor(data, shape: tuple, path: str) -> np.ndarray:
    out = T.zeros(shape)

    def walk(node, depth, idx, p):
        if depth == len(shape):
            out[idx] = _scalar(node, p)
            return
        if not isinstance(node, list):
            raise SchemaError(f"expected a list of length {shape[depth]}", p)
        if len(node) != shape[depth]:
            raise SchemaError(f"expected length {shape[depth]}, got {len(node)} (tensor shape {shape})", p)
        for i, child in enumerate(node):
            walk(child, depth + 1, idx + (i,), f"{p}[{i}]")

    walk(data, 0, (), path)
    return T.normalize(out)


def _comm(d: dict, path: str) -> CommAlgebra:
    n = _int(d, "dim", path)
    return CommAlgebra(
        mult=_tensor(_field(d, "mult", path), (n, n, n), f"{path}.mult"),
        unit=_tensor(_field(d, "unit", path), (n,), f"{path}.unit"),
        phi=_tensor(_field(d, "phi", path), (n, n), f"{path}.phi"),
    )


def _str(d: dict, key: str, path: str, default="") -> str:
    v = d.get(key, default) if isinstance(d, dict) else default
    if not isinstance(v, str):
        raise SchemaError("expected a string", f"{path}.{key}")
    return v


def _algebra(d: dict, path: str) -> HLR3Algebra:
    A = _comm(_field(d, "A", path), f"{path}.A")
    n, a = _int(d, "L_dim", path), A.dim
    tags = d.get("tags", [])
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise SchemaError("expected a list of strings", f"{path}.tags")
    return HLR3Algebra(
        A=A,
        a_action=_tensor(_field(d, "a_action", path), (a, n, n), f"{path}.a_action"),
        bracket=_tensor(_field(d, "bracket", path), (n,) * 4, f"{path}.bracket"),
        alpha=_tensor(_field(d, "alpha", path), (n, n), f"{path}.alpha"),
        anchor=_tensor(_field(d, "anchor", path), (n, n, a, a), f"{path}.anchor"),
        name=_str(d, "name", path),
        tags=tuple(tags),
    )


def _module(d: dict, path: str) -> LeftModule:
    m, a, n = _int(d, "dim", path), _int(d, "A_dim", path), _int(d, "L_dim", path)
    return LeftModule(
        a_action=_tensor(_field(d, "a_action", path), (a, m, m), f"{path}.a_action"),
        beta=_tensor(_field(d, "beta", path), (m, m), f"{path}.beta"),
        psi=_tensor(_field(d, "psi", path), (n, n, m, m), f"{path}.psi"),
        name=_str(d, "name", path),
    )


def _cochain(d: dict, path: str) -> Cochain:
    k, n, m = _int(d, "degree", path), _int(d, "L_dim", path), _int(d, "M_dim", path)
    _str(d, "module_ref", path)
    shape = (n,) * (2 * k + 1) + (m,)
    return Cochain(k, _tensor(_field(d, "values", path), shape, f"{path}.values"))


def _terms(d: dict, key: str, shape: tuple, path: str) -> tuple:
    items = _field(d, key, path)
    if not isinstance(items, list):
        raise SchemaError("expected a list", f"{path}.{key}")
    return tuple(_tensor(t, shape, f"{path}.{key}[{i}]") for i, t in enumerate(items))


def _deformation(d: dict, path: str) -> DeformationData:
    N, n = _int(d, "order", path), _int(d, "L_dim", path)
    terms = _terms(d, "terms", (n,) * 4, path)
    if len(terms) != N:
        raise SchemaError(f"order is {N} but {len(terms)} terms are given", f"{path}.terms")
    symbols = None
    if d.get("symbols") is not None:
        a = _int(d, "A_dim", path)
        symbols = _terms(d, "symbols", (n, n, a, a), path)
        if len(symbols) != N:
            raise SchemaError(f"order is {N} but {len(symbols)} symbols are given", f"{path}.symbols")
    return DeformationData(terms, symbols)


def _extension(d: dict, path: str) -> ExtensionDatum:
    base = _algebra(_field(d, "base", path), f"{path}.base")
    fiber = _module(_field(d, "fiber", path), f"{path}.fiber")
    total = _algebra(_field(d, "total", path), f"{path}.total")
    om = d.get("omega")
    omega = None if om is None else _cochain(om, f"{path}.omega")
    if total.L_dim != base.L_dim + fiber.dim:
        raise SchemaError("total dimension must be dim L + dim M", f"{path}.total.L_dim")
    incl, proj = _incl_proj(base.L_dim, fiber.dim)
    try:
        return ExtensionDatum(base, fiber, total, incl, proj, verify_all(total), omega)
    except ExtensionError as e:
        raise SchemaError(f"not an extension datum: {e}", path) from None


def parse_data(doc) -> Manifest:
    """Validate a decoded JSON document."""
    if not isinstance(doc, dict):
        raise SchemaError("expected an object")
    version = _field(doc, "format_version", "$")
    if version != FORMAT_VERSION:
        raise SchemaError(f"unknown format version {version!r}", "$.format_version")
    kind = _field(doc, "kind", "$")
    if kind not in KINDS:
        raise SchemaError(f"unknown kind {kind!r}", "$.kind")
    p = "$.payload"
    payload = _field(doc, "payload", "$")
    if not isinstance(payload, dict):
        raise SchemaError("expected an object", p)
    if kind == "algebra":
        data = _algebra(payload, p)
    elif kind == "module":
        data = _module(payload, p)
    elif kind == "cochain":
        data = _cochain(payload, p)
    elif kind == "comm_algebra":
        data = _comm(payload, p)
    elif kind == "deformation":
        data = _deformation(payload, p)
    elif kind == "automorphism":
        n = _int(payload, "L_dim", p)
        data = AutomorphismData(_terms(payload, "terms", (n, n), p))
        if len(data.terms) != _int(payload, "order", p):
            raise SchemaError("order does not match the number of terms", f"{p}.terms")
    elif kind == "extension":
        data = _extension(payload, p)
    elif kind == "linear_map":
        r, c = _int(payload, "rows", p), _int(payload, "cols", p)
        data = _tensor(_field(payload, "matrix", p), (r, c), f"{p}.matrix")
    else:  # anchor
        n, a = _int(payload, "L_dim", p), _int(payload, "A_dim", p)
        data = _tensor(_field(payload, "values", p), (n, n, a, a), f"{p}.values")
    return Manifest(kind, data, payload)


def loads(text: str) -> Manifest:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from None
    return parse_data(doc)


def parse(path) -> Manifest:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e.strerror}") from None
    return loads(text)
