"""Left modules (M, beta) over a 3-Hom-Lie-Rinehart algebra and their checker.

A module stores

* ``a_action[i, j, k]``: a_i . m_j = sum_k a_action[i, j, k] m_k
* ``beta[l, j]``:        beta(m_j) = sum_l beta[l, j] m_l
* ``psi[x, y]``:         the matrix of psi(x_x, x_y) acting on M
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import _tensor as T
from .algebra import (
    DimensionError,
    HLR3Algebra,
    VerificationReport,
    _arr,
    _backend,
    _Checker,
    _check_module_action,
    _check_representation,
    _same,
)

__all__ = [
    "LeftModule",
    "adjoint_module",
    "base_module",
    "module_check",
    "trivial_module",
    "zero_module",
]


@dataclass(frozen=True, eq=False)
class LeftModule:
    a_action: np.ndarray
    beta: np.ndarray
    psi: np.ndarray
    name: str = ""

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=object)
        dM = beta.shape[0] if beta.ndim == 2 else 0
        psi = np.asarray(self.psi, dtype=object)
        dL = psi.shape[0] if psi.ndim == 4 else 0
        a = np.asarray(self.a_action, dtype=object)
        dA = a.shape[0] if a.ndim == 3 else 0
        object.__setattr__(self, "beta", _arr(self.beta, (dM, dM), "beta"))
        object.__setattr__(self, "psi", _arr(self.psi, (dL, dL, dM, dM), "psi"))
        object.__setattr__(self, "a_action", _arr(self.a_action, (dA, dM, dM), "a_action"))

    @property
    def dim(self) -> int:
        return self.beta.shape[0]

    def replace(self, **changes) -> "LeftModule":
        return dataclasses.replace(self, **changes)

    def __eq__(self, other):
        if not isinstance(other, LeftModule):
            return NotImplemented
        return (
            _same(self.a_action, other.a_action)
            and _same(self.beta, other.beta)
            and _same(self.psi, other.psi)
        )

    __hash__ = None


def adjoint_module(alg: HLR3Algebra) -> LeftModule:
    """psi(x, y) = [x, y, -], beta = alpha."""
    return LeftModule(
        a_action=alg.a_action.copy(),
        beta=alg.alpha.copy(),
        psi=alg.bracket.transpose(0, 1, 3, 2).copy(),
        name=f"ad({alg.name})" if alg.name else "adjoint",
    )


def base_module(alg: HLR3Algebra) -> LeftModule:
    """(A, phi) with psi = rho."""
    return LeftModule(
        a_action=alg.A.mult.copy(),
        beta=alg.A.phi.copy(),
        psi=alg.anchor.copy(),
        name=f"A({alg.name})" if alg.name else "base",
    )


def trivial_module(alg: HLR3Algebra, dim: int = 1) -> LeftModule:
    """Q^dim with psi = 0, beta = id; only defined over a one-dimensional A."""
    if alg.A.dim != 1:
        raise ValueError("the trivial module is only defined when dim A = 1")
    scale = 1 / T.normalize(alg.A.unit)[0] if alg.A.unit[0] != 1 else 1
    action = (T.identity(dim) * scale).reshape(1, dim, dim)
    return LeftModule(
        a_action=T.normalize(action),
        beta=T.identity(dim),
        psi=T.zeros((alg.L_dim, alg.L_dim, dim, dim)),
        name="trivial",
    )


def zero_module(alg: HLR3Algebra) -> LeftModule:
    return LeftModule(
        a_action=T.zeros((alg.A.dim, 0, 0)),
        beta=T.zeros((0, 0)),
        psi=T.zeros((alg.L_dim, alg.L_dim, 0, 0)),
        name="zero",
    )


def check_module_dims(alg: HLR3Algebra, mod: LeftModule):
    dA, dL, dM = alg.A.dim, alg.L_dim, mod.dim
    if mod.a_action.shape != (dA, dM, dM):
        raise DimensionError(f"module a_action has shape {mod.a_action.shape}, expected {(dA, dM, dM)}")
    if mod.psi.shape != (dL, dL, dM, dM):
        raise DimensionError(f"module psi has shape {mod.psi.shape}, expected {(dL, dL, dM, dM)}")


def module_check(alg: HLR3Algebra, mod: LeftModule) -> VerificationReport:
    """All left-module conditions over all basis tuples.

    The representation part includes ``beta psi(x, y) = psi(alpha x, alpha y) beta``
    alongside the two Kasymov-type identities.
    """
    check_module_dims(alg, mod)
    E = T.einsum
    c, u, P, t, b, al, r, tm, be, psi = _backend(
        alg.A.mult, alg.A.unit, alg.A.phi, alg.a_action, alg.bracket, alg.alpha, alg.anchor,
        mod.a_action, mod.beta, mod.psi,
    )
    ch = _Checker(f"{mod.name or 'module'} over {alg.name or 'algebra'}")
    _check_module_action(ch, "M", c, u, tm)
    _check_representation(ch, "mod1_psi", b, al, psi, be)
    ch.check("mod2_beta_semilinear", ("a", "m"), E("imk,ok->imo", tm, be), E("pi,nm,pno->imo", P, be, tm))
    P2 = P.dot(P)
    phi2_act = E("pi,pso->iso", P2, tm)
    rhs3 = E("iso,xysk->ixyok", phi2_act, psi)
    ch.check("mod3_psi_left", ("a", "x", "y"), E("ixz,zyok->ixyok", t, psi), rhs3)
    ch.check("mod3_psi_right", ("a", "x", "y"), E("iyz,xzok->ixyok", t, psi), rhs3)
    be2 = be.dot(be)
    ch.check(
        "mod4_leibniz",
        ("a", "x", "y", "m"),
        E("imk,xyok->ixymo", tm, psi),
        E("pi,xyqm,pqo->ixymo", P2, psi, tm) + E("xysi,wm,swo->ixymo", r, be2, tm),
    )
    return ch.report
