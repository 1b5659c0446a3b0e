"""A-split abelian extensions in split coordinates L (+) M.

Vectors of the total space put the L coordinates first, then the M ones.
``incl`` embeds M, ``proj`` projects onto L, and the canonical section is
tau_0(x) = (x, 0).  Maps nu: L -> M are stored as degree-0 cochains
(``values[x, o]``); F_nu = id + incl nu proj.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _tensor as T
from .algebra import (
    DimensionError,
    HLR3Algebra,
    VerificationReport,
    _Checker,
    verify_all,
)
from .cohomology import Cochain, CochainError, _cochain_space, delta
from .constructions import module_semidirect_sum
from .exact_linalg import SubspaceBasis, kernel, left_inverse, rank, solve
from .modules import LeftModule, check_module_dims

__all__ = [
    "ExtensionDatum",
    "ExtensionError",
    "Section",
    "SectionCocycle",
    "automorphism_space",
    "build_extension",
    "canonical_section",
    "find_equivalence",
    "nu_morphism",
    "section_to_cocycle",
    "transport",
]


class ExtensionError(ValueError):
    def __init__(self, message, report: VerificationReport | None = None):
        if report is not None and not report.passed:
            message = f"{message}\n{report}"
        super().__init__(message)
        self.report = report


def _datum_report(base, fiber, total, incl, proj) -> VerificationReport:
    dL, dM = base.L_dim, fiber.dim
    ch = _Checker("extension datum")
    ch.check("proj_incl_zero", (), proj.dot(incl), T.zeros((dL, dM)))
    ch.check("incl_injective", (), np.array(_rank(incl)), np.array(dM))
    ch.check("proj_surjective", (), np.array(_rank(proj)), np.array(dL))
    ch.check("exact_at_total", (), np.array(_rank(incl) + _rank(proj)), np.array(total.L_dim))
    E = T.einsum
    # [., m, n] = 0: bracket with two fiber arguments
    fib = E("uvwl,vm,wn->umnl", total.bracket, incl, incl)
    ch.check("abelian_ideal", ("u", "m", "n"), fib, T.zeros(fib.shape))
    tau = canonical_section(base, fiber).tau
    _section_checks(ch, base, total, proj, tau)
    return ch.report


def _rank(m: np.ndarray) -> int:
    return rank(m) if m.size else 0


def _section_checks(ch: _Checker, base: HLR3Algebra, total: HLR3Algebra, proj, tau):
    E = T.einsum
    ch.check("section_proj", (), proj.dot(tau), T.identity(base.L_dim))
    ch.check(
        "section_A_linear",
        ("a", "x"),
        E("axy,uy->axu", base.a_action, tau),
        E("vx,avu->axu", tau, total.a_action),
    )
    ch.check("section_alpha", (), tau.dot(base.alpha), total.alpha.dot(tau))


@dataclass(frozen=True, eq=False)
class ExtensionDatum:
    """An abelian extension 0 -> M -> L (+) M -> L -> 0 in split coordinates.

    ``report`` is the verifier output for ``total``; a datum whose total
    algebra fails verification is still returned (for diagnosis) with
    ``valid == False``.
    """

    base: HLR3Algebra
    fiber: LeftModule
    total: HLR3Algebra
    incl: np.ndarray
    proj: np.ndarray
    report: VerificationReport
    omega: Cochain | None = None

    def __post_init__(self):
        structural = _datum_report(self.base, self.fiber, self.total, self.incl, self.proj)
        if not structural.passed:
            raise ExtensionError("not an A-split abelian extension datum", structural)

    @property
    def valid(self) -> bool:
        return self.report.passed


@dataclass(frozen=True, eq=False)
class Section:
    tau: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tau", T.normalize(np.asarray(self.tau, dtype=object)))


class SectionCocycle(NamedTuple):
    omega: Cochain
    psi: np.ndarray


def _incl_proj(dL: int, dM: int):
    incl = T.zeros((dL + dM, dM))
    incl[dL:, :] = T.identity(dM)
    proj = T.zeros((dL, dL + dM))
    proj[:, :dL] = T.identity(dL)
    return incl, proj


def canonical_section(base: HLR3Algebra, fiber: LeftModule) -> Section:
    dL, dM = base.L_dim, fiber.dim
    tau = T.zeros((dL + dM, dL))
    tau[:dL, :] = T.identity(dL)
    return Section(tau)


def build_extension(alg: HLR3Algebra, mod: LeftModule, omega: Cochain) -> ExtensionDatum:
    """Total algebra with [x+m, y+n, z+p] = [x,y,z] + psi(x,y)p + psi(y,z)m + psi(z,x)n + omega(x,y,z)."""
    check_module_dims(alg, mod)
    dL, dM = alg.L_dim, mod.dim
    if omega.degree != 1 or omega.values.shape != (dL, dL, dL, dM):
        raise DimensionError(f"omega must be a degree 1 cochain of shape {(dL, dL, dL, dM)}")
    msg = _cochain_space(alg, mod, 1).violation(omega)
    if msg is not None:
        raise CochainError(f"omega is not in C^1: {msg}")
    semi = module_semidirect_sum(alg, mod)
    br = semi.bracket.copy()
    br[:dL, :dL, :dL, dL:] = br[:dL, :dL, :dL, dL:] + omega.values
    total = semi.replace(bracket=T.normalize(br), name=f"{alg.name or 'L'}+_w{mod.name or 'M'}")
    incl, proj = _incl_proj(dL, dM)
    return ExtensionDatum(alg, mod, total, incl, proj, verify_all(total), omega)


def section_to_cocycle(ext: ExtensionDatum, section: Section) -> SectionCocycle:
    """Omega_tau(x,y,z) = incl^{-1}([tau x, tau y, tau z] - tau[x,y,z]) and psi(x,y)m = [tau x, tau y, m]."""
    base, total = ext.base, ext.total
    dL, dM = base.L_dim, ext.fiber.dim
    tau = section.tau
    if tau.shape != (dL + dM, dL):
        raise DimensionError(f"section has shape {tau.shape}, expected {(dL + dM, dL)}")
    ch = _Checker("section")
    _section_checks(ch, base, total, ext.proj, tau)
    if not ch.report.passed:
        raise ExtensionError("not an A-split section", ch.report)
    E = T.einsum
    P = left_inverse(ext.incl)
    img = E("ux,vy,wz,uvwl->xyzl", tau, tau, tau, total.bracket)
    diff = T.normalize(img - E("xyzk,lk->xyzl", base.bracket, tau))
    coords = T.normalize(E("ol,xyzl->xyzo", P, diff))
    idx = T.first_mismatch(E("lo,xyzo->xyzl", ext.incl, coords), diff)
    if idx is not None:
        raise ExtensionError(f"[tau x, tau y, tau z] - tau[x,y,z] leaves the fiber at {idx[:3]}")
    act = E("ux,vy,wm,uvwl->xyml", tau, tau, ext.incl, total.bracket)
    psi = T.normalize(E("ol,xyml->xyom", P, act))
    idx = T.first_mismatch(E("lo,xyom->xyml", ext.incl, psi), act)
    if idx is not None:
        raise ExtensionError(f"[tau x, tau y, m] leaves the fiber at {idx[:3]}")
    omega = Cochain(1, coords)
    induced = ext.fiber.replace(psi=psi)
    if not delta(base, induced, omega, check=False).is_zero():
        raise ExtensionError("the section cocycle is not closed (malformed extension)")
    return SectionCocycle(omega, psi)


def nu_morphism(ext: ExtensionDatum, nu: Cochain) -> np.ndarray:
    """F_nu = id + incl nu proj on the total space."""
    n = ext.total.L_dim
    return T.normalize(T.identity(n) + ext.incl.dot(nu.values.T).dot(ext.proj))


def transport(alg: HLR3Algebra, F: np.ndarray) -> HLR3Algebra:
    """Structure pushed forward along an invertible linear map F (fixing A)."""
    F = T.normalize(np.asarray(F, dtype=object))
    G = left_inverse(F)
    E = T.einsum
    return alg.replace(
        bracket=T.normalize(E("ux,vy,wz,uvwl,ol->xyzo", G, G, G, alg.bracket, F)),
        alpha=T.normalize(F.dot(alg.alpha).dot(G)),
        a_action=T.normalize(E("ux,auv,ov->axo", G, alg.a_action, F)),
        anchor=T.normalize(E("ux,vy,uvok->xyok", G, G, alg.anchor)),
    )


def _residual(src: HLR3Algebra, dst: HLR3Algebra, F: np.ndarray) -> np.ndarray:
    """All morphism conditions for F: src -> dst (identity on A), flattened."""
    E = T.einsum
    parts = [
        E("xyzl,ol->xyzo", src.bracket, F) - E("ux,vy,wz,uvwo->xyzo", F, F, F, dst.bracket),
        F.dot(src.alpha) - dst.alpha.dot(F),
        E("axl,ol->axo", src.a_action, F) - E("ux,auo->axo", F, dst.a_action),
        src.anchor - E("ux,vy,uvok->xyok", F, F, dst.anchor),
    ]
    return T.normalize(np.concatenate([p.reshape(-1) for p in parts]))


def _same_setting(extA: ExtensionDatum, extB: ExtensionDatum):
    if not extA.base == extB.base:
        raise ExtensionError("extensions have different bases")
    fa, fb = extA.fiber, extB.fiber
    if not (fa.dim == fb.dim and fa == fb):
        raise ExtensionError("extensions have different fibers")


def _linear_system(extA: ExtensionDatum, extB: ExtensionDatum):
    dL, dM = extA.base.L_dim, extA.fiber.dim
    zero = Cochain(0, T.zeros((dL, dM)))
    r0 = _residual(extA.total, extB.total, nu_morphism(extA, zero))
    cols = []
    for k in range(dL * dM):
        vals = T.zeros(dL * dM)
        vals[k] = 1
        nu = Cochain(0, vals.reshape(dL, dM))
        cols.append(_residual(extA.total, extB.total, nu_morphism(extA, nu)) - r0)
    J = np.stack(cols, axis=1) if cols else T.zeros((len(r0), 0))
    return J, r0


def find_equivalence(extA: ExtensionDatum, extB: ExtensionDatum) -> Cochain | None:
    """nu with F_nu: extB.total -> extA.total an isomorphism of extensions, or None.

    F_nu(x + m) = x + m + nu(x) runs from B to A, so for extensions built from
    cocycles omega_B - omega_A = delta nu.  The residual of the morphism
    conditions is affine in nu because brackets with two fiber arguments
    vanish, so one exact linear solve decides it.
    """
    _same_setting(extA, extB)
    J, r0 = _linear_system(extB, extA)
    x = solve(J, T.normalize(-r0))
    if x is None:
        return None
    nu = Cochain(0, x.reshape(extA.base.L_dim, extA.fiber.dim))
    if T.first_mismatch(_residual(extB.total, extA.total, nu_morphism(extB, nu)), T.zeros(len(r0))) is not None:
        raise ExtensionError("internal: solved equivalence does not transport the structure")
    return nu


def automorphism_space(ext: ExtensionDatum) -> SubspaceBasis:
    """Basis of {nu : F_nu is an automorphism of ext}, as flattened ``nu.values`` vectors."""
    J, r0 = _linear_system(ext, ext)
    if not T.is_zero(r0):
        raise ExtensionError("identity is not an automorphism: extension datum is inconsistent")
    return kernel(J)
