"""Builders for the standard constructions; each output is run through the verifier."""

from __future__ import annotations

import numpy as np

from . import _tensor as T
from .algebra import (
    CommAlgebra,
    DimensionError,
    HLR3Algebra,
    HLR3Morphism,
    VerificationReport,
    _backend,
    _Checker,
    _check_comm_algebra,
    _check_representation,
    verify_all,
    verify_hom_jacobi,
    verify_morphism,
)
from .exact_linalg import kernel, left_inverse
from .modules import LeftModule, base_module, check_module_dims

__all__ = [
    "ConstructionError",
    "fiber_product",
    "from_3_lie_rinehart",
    "module_semidirect_sum",
    "semidirect_product",
    "tensor_extension",
    "yau_twist",
]


class ConstructionError(ValueError):
    """A precondition or the output verification of a construction failed."""

    def __init__(self, message, report: VerificationReport | None = None, witness=None):
        if report is not None and not report.passed:
            message = f"{message}\n{report}"
        super().__init__(message)
        self.report = report
        self.witness = witness


def _require(report: VerificationReport, what: str):
    if not report.passed:
        raise ConstructionError(what, report)


def _is_identity(m: np.ndarray) -> bool:
    return m.shape[0] == m.shape[1] and not np.any(m != T.identity(m.shape[0]))


def from_3_lie_rinehart(alg: HLR3Algebra) -> HLR3Algebra:
    """Embed an untwisted 3-Lie-Rinehart algebra (alpha = id, phi = id)."""
    if not (_is_identity(alg.alpha) and _is_identity(alg.phi)):
        raise ConstructionError("input must have alpha = id and phi = id")
    _require(verify_all(alg), "input is not a 3-Lie-Rinehart algebra")
    tags = alg.tags if "untwisted" in alg.tags else alg.tags + ("untwisted",)
    return alg.replace(tags=tags)


def yau_twist(alg: HLR3Algebra, phi_new, alpha_new, name=None) -> HLR3Algebra:
    """Twist the bracket by ``alpha_new`` and the anchor by ``phi_new``.

    ``(phi_new, alpha_new)`` must be a self-morphism of ``alg``.
    """
    phi_new = T.normalize(np.asarray(phi_new, dtype=object))
    alpha_new = T.normalize(np.asarray(alpha_new, dtype=object))
    _require(verify_morphism(alg, alg, HLR3Morphism(phi_new, alpha_new)), "twist is not a self-morphism")
    out = alg.replace(
        bracket=T.normalize(T.einsum("xyzl,ol->xyzo", alg.bracket, alpha_new)),
        anchor=T.normalize(T.einsum("ok,xyks->xyos", phi_new, alg.anchor)),
        alpha=T.normalize(alpha_new.dot(alg.alpha)),
        A=CommAlgebra(alg.A.mult, alg.A.unit, T.normalize(phi_new.dot(alg.phi))),
        name=alg.name + "^tw" if name is None else name,
        tags=tuple(t for t in alg.tags if t != "untwisted"),
    )
    _require(verify_all(out), "twisted algebra failed verification")
    return out


def _check_anchor_on(L3: HLR3Algebra, A: CommAlgebra, rho: np.ndarray) -> VerificationReport:
    E = T.einsum
    c, u, P, b, al, r = _backend(A.mult, A.unit, A.phi, L3.bracket, L3.alpha, rho)
    ch = _Checker("anchor on A")
    _check_comm_algebra(ch, c, u, P)
    ch.check(
        "anchor_phi_derivation",
        ("x", "y", "i", "j"),
        E("ijk,xyok->xyijo", c, r),
        E("pi,xyqj,pqo->xyijo", P, r, c) + E("pj,xyqi,pqo->xyijo", P, r, c),
    )
    _check_representation(ch, "rep", b, al, r, P)
    return ch.report


def tensor_extension(L3: HLR3Algebra, A: CommAlgebra, rho=None, name=None) -> HLR3Algebra:
    """The algebra on A (x) L built from a 3-Hom-Lie algebra and a representation on A.

    ``L3`` supplies the bracket and alpha (its own A must be one-dimensional);
    ``rho[x, y]`` is a matrix acting on ``A``.  Basis of the result is
    e_a (x) x_i at index ``a * dim L + i``.
    """
    if L3.A.dim != 1:
        raise ConstructionError("the 3-Hom-Lie input must be given over A = Q")
    dL, dA = L3.L_dim, A.dim
    rho = T.zeros((dL, dL, dA, dA)) if rho is None else T.normalize(np.asarray(rho, dtype=object))
    if rho.shape != (dL, dL, dA, dA):
        raise DimensionError(f"rho has shape {rho.shape}, expected {(dL, dL, dA, dA)}")
    pre = verify_hom_jacobi(L3)
    full = verify_all(L3)
    pre.extend(VerificationReport("", [c for c in full.conditions if c.name.startswith(("bracket_", "alpha_"))]))
    _require(pre, "input is not a 3-Hom-Lie algebra")
    _require(_check_anchor_on(L3, A, rho), "(rho, phi) is not a representation on A")

    E = T.einsum
    c, P, b, al, r = A.mult, A.phi, L3.bracket, L3.alpha, rho
    Pab = E("os,abs->abo", P, c)  # phi(e_a e_b)
    Pabc = E("os,abt,tcs->abco", P, c, c)  # phi(e_a e_b e_c)
    # phi(e_a e_b) * rho(x, y)(e_c)
    weighted = E("abp,xyqc,pqo->abcxyo", Pab, r, c)
    G = E("abco,xyzw->axbyczow", Pabc, b)
    G = G + E("abcxyo,wz->axbyczow", weighted, al)
    G = G + E("bcayzo,wx->axbyczow", weighted, al)
    G = G + E("cabzxo,wy->axbyczow", weighted, al)
    n = dA * dL
    bracket = G.reshape(n, n, n, n)
    action = E("dao,xw->daxow", c, T.identity(dL)).reshape(dA, n, n)
    alpha = E("oa,wx->owax", P, al).reshape(n, n)
    anchor = E("abp,xyqc,pqo->axbyoc", Pab, r, c).reshape(n, n, dA, dA)
    out = HLR3Algebra(
        A=A,
        a_action=T.normalize(action),
        bracket=T.normalize(bracket),
        alpha=T.normalize(alpha),
        anchor=T.normalize(anchor),
        name=(f"{L3.name or 'L'}_ext" if name is None else name),
    )
    _require(verify_all(out), "tensor extension failed verification")
    return out


def _block_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    out = T.zeros((n + m, n + m))
    out[:n, :n] = a
    out[n:, n:] = b
    return out


def module_semidirect_sum(alg: HLR3Algebra, mod: LeftModule, name=None) -> HLR3Algebra:
    """L (+) M with [x1+m1, x2+m2, x3+m3] = [x1,x2,x3] + psi(x1,x2)m3 + psi(x2,x3)m1 + psi(x3,x1)m2.

    Not verified here: verifying the output is how the module/semidirect
    equivalence is exercised.
    """
    check_module_dims(alg, mod)
    dL, dM, dA = alg.L_dim, mod.dim, alg.A.dim
    n = dL + dM
    br = T.zeros((n, n, n, n))
    br[:dL, :dL, :dL, :dL] = alg.bracket
    ps = mod.psi  # ps[x, y, o, k]: psi(x, y) e_k has o-th coordinate
    br[:dL, :dL, dL:, dL:] = ps.transpose(0, 1, 3, 2)  # [x, y, m] = psi(x, y) m
    br[dL:, :dL, :dL, dL:] = ps.transpose(3, 0, 1, 2)  # [m, y, z] = psi(y, z) m
    br[:dL, dL:, :dL, dL:] = ps.transpose(1, 3, 0, 2)  # [x, m, z] = psi(z, x) m
    action = T.zeros((dA, n, n))
    action[:, :dL, :dL] = alg.a_action
    action[:, dL:, dL:] = mod.a_action
    anchor = T.zeros((n, n, dA, dA))
    anchor[:dL, :dL] = alg.anchor
    return HLR3Algebra(
        A=alg.A,
        a_action=action,
        bracket=br,
        alpha=_block_matrix(alg.alpha, mod.beta),
        anchor=anchor,
        name=(f"{alg.name or 'L'}+{mod.name or 'M'}" if name is None else name),
    )


def semidirect_product(alg: HLR3Algebra, name=None) -> HLR3Algebra:
    """L x A with bracket ([x,y,z], rho(x,y)c + rho(y,z)a + rho(z,x)b) and twist (alpha, phi)."""
    out = module_semidirect_sum(alg, base_module(alg), name=f"{alg.name or 'L'}xA" if name is None else name)
    _require(verify_all(out), "semidirect product failed verification")
    return out


def fiber_product(algL: HLR3Algebra, algM: HLR3Algebra, name=None) -> HLR3Algebra:
    """Pairs (l, m) with rho_L(l, -) = rho_M(m, -), componentwise structure.

    The anchor condition is imposed on the second argument basis vectors,
    so nonzero anchors need equal L dimensions.  The carrier must be closed
    under bracket, A-action and twist, otherwise ``ConstructionError``.
    """
    if not algL.A == algM.A:
        raise ConstructionError("fiber product needs the same (A, phi) on both factors")
    _require(verify_all(algL), "first factor failed verification")
    _require(verify_all(algM), "second factor failed verification")
    dL, dM, dA = algL.L_dim, algM.L_dim, algL.A.dim
    N = dL + dM
    zero_anchors = T.is_zero(algL.anchor) and T.is_zero(algM.anchor)
    if zero_anchors:
        K = T.identity(N)
    else:
        if dL != dM:
            raise ConstructionError("nonzero anchors need equal L dimensions for the fiber condition")
        rows = np.concatenate([algL.anchor, -algM.anchor], axis=0)  # (N, d, dA, dA)
        cond = rows.transpose(1, 2, 3, 0).reshape(-1, N)
        K = kernel(cond).matrix()
    n = K.shape[1]
    Kinv = left_inverse(K) if n else T.zeros((0, N))

    E = T.einsum
    br = T.zeros((N,) * 4)
    br[:dL, :dL, :dL, :dL] = algL.bracket
    br[dL:, dL:, dL:, dL:] = algM.bracket
    act = T.zeros((dA, N, N))
    act[:, :dL, :dL] = algL.a_action
    act[:, dL:, dL:] = algM.a_action
    al = _block_matrix(algL.alpha, algM.alpha)

    def restrict(vals, what, labels):
        # vals[..., N] ambient vectors; must lie in span(K)
        coords = E("cN,...N->...c", Kinv, vals)
        back = E("Nc,...c->...N", K, coords)
        idx = T.first_mismatch(back, vals)
        if idx is not None:
            raise ConstructionError(
                f"fiber carrier is not closed under {what}", witness=dict(zip(labels, idx[:-1]))
            )
        return T.normalize(coords)

    bracket = restrict(E("iX,jY,kZ,ijkN->XYZN", K, K, K, br), "the bracket", ("x", "y", "z"))
    action = restrict(E("jX,ajN->aXN", K, act), "the A-action", ("a", "x"))
    alpha = restrict(E("jX,Nj->XN", K, al), "alpha", ("x",)).T.copy()
    anc_L = E("iX,jY,ijok->XYok", K[:dL], K[:dL], algL.anchor)
    anc_M = E("iX,jY,ijok->XYok", K[dL:], K[dL:], algM.anchor)
    idx = T.first_mismatch(anc_L, anc_M)
    if idx is not None:
        raise ConstructionError("anchor is not well defined on the fiber carrier", witness=idx[:2])
    out = HLR3Algebra(
        A=algL.A,
        a_action=action,
        bracket=bracket,
        alpha=T.normalize(alpha),
        anchor=T.normalize(anc_L),
        name=(f"{algL.name or 'L'}x_{algM.name or 'M'}" if name is None else name),
    )
    _require(verify_all(out), "fiber product failed verification")
    return out
