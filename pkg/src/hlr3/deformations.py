"""Multiderivations, the shuffle bracket, and order-by-order formal deformations.

Tensor layout: a degree-n multiderivation ``D`` has ``map`` of shape
``(dim L,) * (n + 1) + (dim L,)`` (last axis = output coordinate) and
``symbol`` of shape ``(dim L,) * n + (dim A, dim A)`` (a matrix acting on A
per argument tuple).  Linear self-maps of L used by formal automorphisms are
matrices in the column convention of the rest of the package
(``phi[l, i]`` is the l-th coordinate of phi(x_i)).

The deformation complex uses the odd-arity grading: a map with 2n - 1
arguments is sent by :func:`def_delta` to one with 2n + 1 arguments using
the displayed Leibniz-type expansion (the coboundary of the adjoint module).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _tensor as T
from .algebra import (
    DimensionError,
    HLR3Algebra,
    VerificationReport,
    _Checker,
)
from .cohomology import _delta_batch, cohomology_dim
from .exact_linalg import Echelon, SubspaceBasis, exact, kernel, solve
from .modules import adjoint_module

__all__ = [
    "DeformationError",
    "DeformationSeries",
    "FormalAutomorphism",
    "InfinitesimalClass",
    "Multiderivation",
    "apply_equivalence",
    "check_deformation",
    "compose",
    "def_delta",
    "def_delta_paths",
    "gbracket",
    "infinitesimal_class",
    "invert_automorphism",
    "maurer_cartan_check",
    "mc_expansion",
    "multiderivation_check",
    "order_residual",
    "rigidity_probe",
    "shuffles",
    "solve_trivializer",
    "structure_as_multiderivation",
    "trivialize_step",
]


class DeformationError(ValueError):
    def __init__(self, message, report: VerificationReport | None = None):
        if report is not None and not report.passed:
            message = f"{message}\n{report}"
        super().__init__(message)
        self.report = report


@dataclass(frozen=True, eq=False)
class Multiderivation:
    degree: int
    map: np.ndarray
    symbol: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        m = T.normalize(np.asarray(self.map, dtype=object))
        s = T.normalize(np.asarray(self.symbol, dtype=object))
        b = T.normalize(np.asarray(self.beta, dtype=object))
        n, d = self.degree, b.shape[0]
        if m.shape != (d,) * (n + 2):
            raise DimensionError(f"degree {n} map must have shape {(d,) * (n + 2)}, got {m.shape}")
        if s.ndim != n + 2 or s.shape[:n] != (d,) * n or s.shape[-1] != s.shape[-2]:
            raise DimensionError(f"degree {n} symbol must have shape {(d,) * n} + (dA, dA), got {s.shape}")
        object.__setattr__(self, "map", m)
        object.__setattr__(self, "symbol", s)
        object.__setattr__(self, "beta", b)

    @property
    def arity(self) -> int:
        return self.degree + 1

    @classmethod
    def from_map(cls, alg: HLR3Algebra, degree: int, values, symbol=None) -> "Multiderivation":
        dL, dA = alg.L_dim, alg.A.dim
        if symbol is None:
            symbol = T.zeros((dL,) * degree + (dA, dA))
        return cls(degree, values, symbol, alg.alpha)

    @classmethod
    def from_linear(cls, alg: HLR3Algebra, phi) -> "Multiderivation":
        """Degree-0 multiderivation of a linear self-map given as a column-convention matrix."""
        phi = T.normalize(np.asarray(phi, dtype=object))
        return cls.from_map(alg, 0, phi.T.copy())

    def linear(self) -> np.ndarray:
        if self.degree != 0:
            raise DimensionError("only degree 0 multiderivations are linear maps")
        return self.map.T.copy()

    def is_zero(self) -> bool:
        return T.is_zero(self.map) and T.is_zero(self.symbol)

    def __eq__(self, other):
        if not isinstance(other, Multiderivation):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.map.shape == other.map.shape
            and not np.any(self.map != other.map)
            and self.symbol.shape == other.symbol.shape
            and not np.any(self.symbol != other.symbol)
        )

    __hash__ = None


def _letters(k: int, start: str = "a") -> str:
    return "".join(chr(ord(start) + i) for i in range(k))


def multiderivation_check(alg: HLR3Algebra, D: Multiderivation) -> VerificationReport:
    """Total skewness and conditions (i)-(iv) of a (phi, beta)-multiderivation on basis tuples."""
    n, dL = D.degree, alg.L_dim
    if D.map.shape[0] != dL or D.symbol.shape[-1] != alg.A.dim:
        raise DimensionError("multiderivation does not match the algebra dimensions")
    E = T.einsum
    ch = _Checker(f"degree {n} multiderivation")
    m, s, be = D.map, D.symbol, D.beta
    for k in range(n):
        perm = list(range(n + 2))
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        ch.check(f"map_skew_{k + 1}{k + 2}", _letters(n + 1, "p"), m, -m.transpose(perm))
    for k in range(n - 1):
        perm = list(range(n + 2))
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        ch.check(f"symbol_skew_{k + 1}{k + 2}", _letters(n, "p"), s, -s.transpose(perm))
    args = _letters(n + 1)
    # (i) D(beta x_0, ..., beta x_n) = beta D(x)
    upper = _letters(n + 1, "A")
    ops = [f"{u}{a}" for u, a in zip(upper, args)]
    lhs = E(",".join(ops + [f"{upper}o"]) + f"->{args}o", *([be] * (n + 1) + [m]))
    rhs = E(f"{args}k,ok->{args}o", m, be)
    ch.check("i_beta_equivariant", tuple(args), lhs, rhs)
    P = alg.phi
    if n:
        sargs, supper = args[:n], upper[:n]
        # (ii) sigma(beta x)(phi a) = phi(sigma(x)(a))
        ops = [f"{u}{a}" for u, a in zip(supper, sargs)]
        lhs = E(",".join(ops + [f"{supper}yz", "zj"]) + f"->{sargs}yj", *([be] * n + [s, P]))
        rhs = E(f"yz,{sargs}zj->{sargs}yj", P, s)
        ch.check("ii_symbol_phi_equivariant", tuple(sargs), lhs, rhs)
        # (iii) sigma(x_1, ..., a.x_n) = phi^n(a) sigma(x)
        Pn = T.matpow(P, n)
        lead = sargs[:-1]
        lhs = E(f"i{sargs[-1]}Z,{lead}Zyz->i{sargs}yz", alg.a_action, s)
        rhs = E(f"pi,pqy,{sargs}qz->i{sargs}yz", Pn, alg.A.mult, s)
        ch.check("iii_symbol_A_linear", ("a",) + tuple(sargs), lhs, rhs)
    # (iv) D(x_0, ..., a.x_n) = phi^n(a) D(x) + sigma(x_0..x_{n-1})(a) beta^n(x_n)
    Pn = T.matpow(P, n)
    Bn = T.matpow(be, n)
    lead, last = args[:-1], args[-1]
    lhs = E(f"i{last}Z,{lead}Zo->i{args}o", alg.a_action, m)
    rhs = E(f"pi,{args}k,pko->i{args}o", Pn, m, alg.a_action)
    if n:
        rhs = rhs + E(f"{lead}pi,w{last},pwo->i{args}o", s, Bn, alg.a_action)
    ch.check("iv_leibniz", ("a",) + tuple(args), lhs, rhs)
    return ch.report


def structure_as_multiderivation(alg: HLR3Algebra) -> Multiderivation:
    """m = bracket with symbol rho."""
    m = Multiderivation(2, alg.bracket, alg.anchor, alg.alpha)
    rep = multiderivation_check(alg, m)
    if not rep.passed:
        raise DeformationError("the bracket is not a degree 2 multiderivation", rep)
    return m


def _perm_sign(p) -> int:
    sign, p = 1, list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def shuffles(q1: int, p: int):
    """(sign, first block, second block) for the (q1, p) shuffles of range(q1 + p)."""
    N = q1 + p
    for S in itertools.combinations(range(N), q1):
        R = [i for i in range(N) if i not in S]
        yield _perm_sign(list(S) + R), S, tuple(R)


def _compose_maps(m1, p: int, m2, q: int, beta) -> np.ndarray:
    N = p + q + 1
    args = _letters(N)
    Bq = T.matpow(beta, q)
    machine = T.int_backend([m1, m2, Bq], degree=p + 3)
    if machine is not None:
        m1, m2, Bq = machine
    out = None
    for sign, S, R in shuffles(q + 1, p):
        subs = ["".join(args[i] for i in S) + "Z"]
        ops = [m2]
        d1 = "Z"
        for r in R:
            u = chr(ord("A") + r)
            subs.append(u + args[r])
            ops.append(Bq)
            d1 += u
        subs.append(d1 + "o")
        ops.append(m1)
        val = T.einsum(",".join(subs) + f"->{args}o", *ops)
        val = val if sign == 1 else -val
        out = val if out is None else out + val
    return T.from_machine(out) if machine is not None else T.normalize(out)


def compose(D1: Multiderivation, D2: Multiderivation) -> np.ndarray:
    """(D1 o D2)(x_0..x_{p+q}) = sum over Sh(q+1, p) of sign * D1(D2(x_S), beta^q x_R)."""
    if D1.map.shape[0] != D2.map.shape[0]:
        raise DimensionError("multiderivations act on spaces of different dimension")
    if np.any(D1.beta != D2.beta):
        raise DimensionError("multiderivations have different twists")
    return _compose_maps(D1.map, D1.degree, D2.map, D2.degree, D1.beta)


def gbracket(D1: Multiderivation, D2: Multiderivation) -> np.ndarray:
    """[D1, D2] = (-1)^{pq} D1 o D2 - D2 o D1 (map part)."""
    p, q = D1.degree, D2.degree
    a = compose(D1, D2)
    b = compose(D2, D1)
    return T.normalize(a - b if (p * q) % 2 == 0 else -a - b)


def maurer_cartan_check(alg: HLR3Algebra) -> bool:
    """m in Der^2 (bracket with symbol rho) and m o m = 0 for the shuffle composition."""
    try:
        m = structure_as_multiderivation(alg)
    except DeformationError:
        return False
    return T.is_zero(compose(m, m))


def mc_expansion(alg: HLR3Algebra, m=None) -> np.ndarray:
    """The four-term expansion [ax, ay, [u,v,w]] - [av, aw, [x,y,u]] + [au, aw, [x,y,v]] - [au, av, [x,y,w]]."""
    m = alg.bracket if m is None else m
    return order_residual(alg, [m], 0)


# --- deformation complex ------------------------------------------------------------


def _as_values(D) -> np.ndarray:
    return D.map if isinstance(D, Multiderivation) else T.normalize(np.asarray(D, dtype=object))


def def_delta(alg: HLR3Algebra, D) -> np.ndarray:
    """Displayed coboundary of an odd-arity map (2n - 1 arguments) into 2n + 1 arguments."""
    vals = _as_values(D)
    arity = vals.ndim - 1
    if arity % 2 == 0 or vals.shape != (alg.L_dim,) * (arity + 1):
        raise DimensionError(f"def_delta needs an odd-arity map on L, got shape {vals.shape}")
    n = (arity + 1) // 2
    return _delta_batch(alg, adjoint_module(alg), vals[None], n)[0]


def def_delta_paths(alg: HLR3Algebra, D: Multiderivation) -> dict:
    """Displayed expansion next to [m, D] from the shuffle bracket.

    ``sign`` is +1 or -1 when the two agree up to that global sign, else None.
    """
    disp = def_delta(alg, D)
    m = Multiderivation(2, alg.bracket, alg.anchor, alg.alpha)
    br = gbracket(m, D)
    sign = None
    if disp.shape == br.shape:
        if not np.any(disp != br):
            sign = 1
        elif not np.any(disp != -br):
            sign = -1
    return {"degree": D.degree, "displayed": disp, "bracket": br, "sign": sign, "agree": sign is not None}


def _commutant(alpha: np.ndarray) -> SubspaceBasis:
    """Linear maps phi (flattened column-convention, row-major) with phi alpha = alpha phi."""
    d = alpha.shape[0]
    rows = []
    for i in range(d):
        for j in range(d):
            row = T.zeros(d * d)
            for k in range(d):
                row[i * d + k] += alpha[k, j]  # (phi alpha)[i, j]
                row[k * d + j] -= alpha[i, k]  # (alpha phi)[i, j]
            rows.append(T.normalize(row))
    return kernel(np.array(rows, dtype=object).reshape(d * d, d * d))


def solve_trivializer(alg: HLR3Algebra, target) -> np.ndarray | None:
    """A linear map phi commuting with alpha with def_delta(phi) = target, or None."""
    target = _as_values(target)
    d = alg.L_dim
    comm = _commutant(alg.alpha)
    if comm.dim == 0:
        return None if not T.is_zero(target) else T.zeros((d, d))
    cols = []
    for v in comm.vectors:
        phi = np.array(v, dtype=object).reshape(d, d)
        cols.append(def_delta(alg, phi.T).reshape(-1))
    J = np.stack(cols, axis=1)
    c = solve(J, target.reshape(-1))
    if c is None:
        return None
    return T.normalize(comm.matrix().dot(c).reshape(d, d))


def rigidity_probe(alg: HLR3Algebra) -> dict:
    """First-order rigidity data: skew alpha-equivariant trilinear maps modulo def_delta(commutant).

    Computed as degree-1 cohomology of the adjoint module (same cochains and
    the same coboundary when A-linearity is not in play).
    """
    dims = cohomology_dim(alg, adjoint_module(alg), 1)
    return {"dimZ": dims.dim_Z, "dimB": dims.dim_B, "dimH": dims.dim_H, "rigid_to_first_order": dims.dim_H == 0}


# --- series -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DeformationSeries:
    """m_t = sum t^i m_i truncated at ``order``; m_0 is the structure of ``alg``."""

    alg: HLR3Algebra
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise DeformationError("a series needs at least m_0")
        for i, t in enumerate(terms):
            if not isinstance(t, Multiderivation) or t.degree != 2:
                raise DeformationError(f"term {i} is not a degree 2 multiderivation")
            if t.map.shape[0] != self.alg.L_dim:
                raise DimensionError(f"term {i} has the wrong dimension")
        m0 = terms[0]
        if np.any(m0.map != self.alg.bracket) or np.any(m0.symbol != self.alg.anchor):
            raise DeformationError("m_0 must equal the structure multiderivation of the algebra")
        object.__setattr__(self, "terms", terms)

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    @classmethod
    def from_maps(cls, alg: HLR3Algebra, maps, symbols=None) -> "DeformationSeries":
        """Series (m, maps[0], maps[1], ...); symbols default to zero."""
        symbols = symbols or [None] * len(maps)
        terms = [Multiderivation(2, alg.bracket, alg.anchor, alg.alpha)]
        terms += [Multiderivation.from_map(alg, 2, mp, s) for mp, s in zip(maps, symbols)]
        return cls(alg, tuple(terms))

    def maps(self) -> list:
        return [t.map for t in self.terms]

    def first_nonzero(self) -> int | None:
        for i, t in enumerate(self.terms[1:], start=1):
            if not t.is_zero():
                return i
        return None


def order_residual(alg: HLR3Algebra, maps, n: int) -> np.ndarray:
    """Coefficient of t^n: sum over i + j = n of the four-term expression, indexed [x, y, u, v, w, o]."""
    E = T.einsum
    d = alg.L_dim
    out = None
    for i in range(n + 1):
        j = n - i
        if i >= len(maps) or j >= len(maps):
            continue
        mi, mj, al = maps[i], maps[j], alg.alpha
        if T.is_zero(mi) or T.is_zero(mj):
            continue
        machine = T.int_backend([mi, mj, al], degree=4)
        if machine is not None:
            mi, mj, al = machine
        ai = E("px,qy,pqro->xyro", al, al, mi)  # m_i(a x, a y, r)
        val = (
            E("xyro,uvwr->xyuvwo", ai, mj)
            - E("vwro,xyur->xyuvwo", ai, mj)
            + E("uwro,xyvr->xyuvwo", ai, mj)
            - E("uvro,xywr->xyuvwo", ai, mj)
        )
        val = T.from_machine(val) if machine is not None else T.normalize(val)
        out = val if out is None else out + val
    return T.zeros((d,) * 6) if out is None else T.normalize(out)


def check_deformation(alg: HLR3Algebra, series: DeformationSeries, mode: str = "strict-order") -> VerificationReport:
    """Order-n equations for n = 0..N (strict-order) or n = 0..2N (full-truncation)."""
    if mode not in ("strict-order", "full-truncation"):
        raise ValueError(f"unknown mode {mode!r}")
    top = series.order if mode == "strict-order" else 2 * series.order
    maps = series.maps()
    ch = _Checker(f"deformation of order {series.order}")
    zero = T.zeros((alg.L_dim,) * 6)
    for n in range(top + 1):
        ch.check(f"order_{n}", ("x", "y", "u", "v", "w"), order_residual(alg, maps, n), zero)
    return ch.report


@dataclass(frozen=True, eq=False)
class FormalAutomorphism:
    """Phi_t = id + sum_{i>=1} t^i phi_i, each phi_i commuting with alpha."""

    alg: HLR3Algebra
    terms: tuple  # phi_1 .. phi_N as column-convention matrices

    def __post_init__(self):
        terms = tuple(T.normalize(np.asarray(t, dtype=object)) for t in self.terms)
        al = self.alg.alpha
        for i, t in enumerate(terms, start=1):
            if t.shape != al.shape:
                raise DimensionError(f"phi_{i} has shape {t.shape}, expected {al.shape}")
            if np.any(t.dot(al) != al.dot(t)):
                raise DeformationError(f"phi_{i} does not commute with alpha")
        object.__setattr__(self, "terms", terms)

    @property
    def order(self) -> int:
        return len(self.terms)

    def coefficient(self, i: int) -> np.ndarray:
        if i == 0:
            return T.identity(self.alg.L_dim)
        return self.terms[i - 1] if i <= len(self.terms) else T.zeros((self.alg.L_dim,) * 2)


def invert_automorphism(Phi: FormalAutomorphism, order: int) -> FormalAutomorphism:
    """Truncated inverse: Psi_k = -sum_{i=1..k} phi_i Psi_{k-i}."""
    psi = [T.identity(Phi.alg.L_dim)]
    for k in range(1, order + 1):
        acc = T.zeros((Phi.alg.L_dim,) * 2)
        for i in range(1, k + 1):
            acc = acc - Phi.coefficient(i).dot(psi[k - i])
        psi.append(T.normalize(acc))
    return FormalAutomorphism(Phi.alg, tuple(psi[1:]))


def apply_equivalence(alg: HLR3Algebra, series: DeformationSeries, Phi: FormalAutomorphism) -> DeformationSeries:
    """m~_t = Phi_t^{-1} m_t(Phi_t x, Phi_t y, Phi_t z), truncated at the series order."""
    E = T.einsum
    N = series.order
    inv = invert_automorphism(Phi, N)
    phis = [Phi.coefficient(i) for i in range(N + 1)]
    psis = [inv.coefficient(i) for i in range(N + 1)]
    d, dA = alg.L_dim, alg.A.dim
    # inner[s] = sum_{i+j+k+l=s} m_i(phi_j x, phi_k y, phi_l z); symbols likewise with two slots
    inner = [T.zeros((d,) * 4) for _ in range(N + 1)]
    sym = [T.zeros((d, d, dA, dA)) for _ in range(N + 1)]
    for i, term in enumerate(series.terms):
        for j, k, l in itertools.product(range(N + 1 - i), repeat=3):
            s = i + j + k + l
            if s > N:
                continue
            inner[s] = inner[s] + E("ux,vy,wz,uvwo->xyzo", phis[j], phis[k], phis[l], term.map)
        for j, k in itertools.product(range(N + 1 - i), repeat=2):
            s = i + j + k
            if s > N:
                continue
            sym[s] = sym[s] + E("ux,vy,uvab->xyab", phis[j], phis[k], term.symbol)
    terms = []
    for n in range(N + 1):
        acc = T.zeros((d,) * 4)
        for a in range(n + 1):
            acc = acc + E("op,xyzp->xyzo", psis[a], inner[n - a])
        terms.append(Multiderivation(2, T.normalize(acc), T.normalize(sym[n]), alg.alpha))
    return DeformationSeries(alg, tuple(terms))


def trivialize_step(alg: HLR3Algebra, series: DeformationSeries, n: int, phi) -> DeformationSeries:
    """Remove the n-infinitesimal m_n = def_delta(phi) with Phi_t = id - t^n phi.

    ``phi`` is a linear self-map (column convention) or a degree 0
    multiderivation.
    """
    if isinstance(phi, Multiderivation):
        phi = phi.linear()
    phi = T.normalize(np.asarray(phi, dtype=object))
    if not 1 <= n <= series.order:
        raise DeformationError(f"order {n} is outside 1..{series.order}")
    for i in range(1, n):
        if not series.terms[i].is_zero():
            raise DeformationError(f"m_{i} is nonzero, so m_{n} is not the n-infinitesimal")
    if np.any(phi.dot(alg.alpha) != alg.alpha.dot(phi)):
        raise DeformationError("phi does not commute with alpha")
    if np.any(def_delta(alg, phi.T) != series.terms[n].map):
        raise DeformationError(f"def_delta(phi) differs from m_{n}")
    coeffs = [T.zeros(phi.shape) for _ in range(n)]
    coeffs[n - 1] = T.normalize(-phi)
    out = apply_equivalence(alg, series, FormalAutomorphism(alg, tuple(coeffs)))
    if not T.is_zero(out.terms[n].map):
        raise DeformationError(f"transported m_{n} is not zero")
    return out


class InfinitesimalClass(NamedTuple):
    order: int | None  # None: trivial to the series order
    representative: np.ndarray | None
    is_cocycle: bool
    coboundary_basis: SubspaceBasis | None
    is_coboundary: bool
    trivializer: np.ndarray | None
    rigidity: dict

    @property
    def trivial_to_order(self) -> bool:
        return self.order is None


def _coboundary_basis(alg: HLR3Algebra) -> SubspaceBasis:
    d = alg.L_dim
    vecs = []
    for v in _commutant(alg.alpha).vectors:
        phi = np.array(v, dtype=object).reshape(d, d)
        vecs.append(def_delta(alg, phi.T).reshape(-1))
    return SubspaceBasis.from_vectors(d ** 4, vecs)


def infinitesimal_class(alg: HLR3Algebra, series: DeformationSeries) -> InfinitesimalClass:
    """First nonzero m_n, its cocycle and coboundary status, and the rigidity probe."""
    probe = rigidity_probe(alg)
    n = series.first_nonzero()
    if n is None:
        return InfinitesimalClass(None, None, True, None, True, None, probe)
    rep = series.terms[n].map
    cocycle = T.is_zero(def_delta(alg, rep))
    phi = solve_trivializer(alg, rep)
    return InfinitesimalClass(n, rep, cocycle, _coboundary_basis(alg), phi is not None, phi, probe)
