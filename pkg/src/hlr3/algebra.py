"""Structure-constant model of 3-Hom-Lie-Rinehart algebras and the axiom verifier.

Conventions used throughout the package (coordinates are column vectors,
matrices act from the left):

* ``mult[i, j, k]``      e_i * e_j = sum_k mult[i, j, k] e_k           (algebra A)
* ``a_action[i, j, k]``  a_i . x_j = sum_k a_action[i, j, k] x_k      (A on L)
* ``bracket[i, j, k, l]`` [x_i, x_j, x_k] = sum_l bracket[i, j, k, l] x_l
* ``alpha[l, i]``        alpha(x_i) = sum_l alpha[l, i] x_l            (same for phi)
* ``anchor[i, j]``       the matrix of rho(x_i, x_j) acting on A

The verifier is a brute force over all basis tuples.  Each condition is
evaluated as a full tensor identity; integer-only data is evaluated in
int64 (with an overflow bound), everything else on exact object arrays.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import _tensor as T
from .exact_linalg import format_rational, rank, to_exact_array

__all__ = [
    "CommAlgebra",
    "ConditionResult",
    "DimensionError",
    "HLR3Algebra",
    "HLR3Morphism",
    "VerificationReport",
    "evaluate_anchor",
    "evaluate_bracket",
    "verify_all",
    "verify_hom_jacobi",
    "verify_morphism",
]


class DimensionError(ValueError):
    pass


def _arr(x, shape, what):
    a = to_exact_array(x) if not (isinstance(x, np.ndarray) and x.dtype == object) else T.normalize(x)
    if a.size == 0 and int(np.prod(shape)) == 0:
        return T.zeros(shape)
    if a.shape != tuple(shape):
        raise DimensionError(f"{what} has shape {a.shape}, expected {tuple(shape)}")
    return a


def _same(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and not np.any(a != b)


@dataclass(frozen=True, eq=False)
class CommAlgebra:
    """Commutative associative algebra A with unit and endomorphism phi."""

    mult: np.ndarray
    unit: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        d = len(self.unit) if hasattr(self.unit, "__len__") else 0
        object.__setattr__(self, "unit", _arr(self.unit, (d,), "unit"))
        object.__setattr__(self, "mult", _arr(self.mult, (d, d, d), "mult"))
        object.__setattr__(self, "phi", _arr(self.phi, (d, d), "phi"))

    @property
    def dim(self) -> int:
        return len(self.unit)

    @property
    def regular(self) -> bool:
        return rank(self.phi) == self.dim

    def multiply(self, a, b):
        return T.einsum("i,j,ijk->k", to_exact_array(a), to_exact_array(b), self.mult)

    def left_mult(self, a) -> np.ndarray:
        """Matrix of b -> a*b."""
        return T.einsum("i,ijk->kj", to_exact_array(a), self.mult)

    def __eq__(self, other):
        if not isinstance(other, CommAlgebra):
            return NotImplemented
        return _same(self.mult, other.mult) and _same(self.unit, other.unit) and _same(self.phi, other.phi)

    __hash__ = None

    @classmethod
    def rationals(cls) -> "CommAlgebra":
        return cls(mult=[[[1]]], unit=[1], phi=[[1]])

    @classmethod
    def dual_numbers(cls, phi=None) -> "CommAlgebra":
        """Q[t]/(t^2) on the basis (1, t)."""
        mult = T.zeros((2, 2, 2))
        mult[0, 0, 0] = 1
        mult[0, 1, 1] = 1
        mult[1, 0, 1] = 1
        return cls(mult=mult, unit=[1, 0], phi=T.identity(2) if phi is None else phi)


@dataclass(frozen=True, eq=False)
class HLR3Algebra:
    """The tuple (A, L, [.,.,.], phi, alpha, rho) as dense structure tensors."""

    A: CommAlgebra
    a_action: np.ndarray
    bracket: np.ndarray
    alpha: np.ndarray
    anchor: np.ndarray
    name: str = ""
    tags: tuple = field(default=())

    def __post_init__(self):
        dA = self.A.dim
        dL = np.asarray(self.alpha, dtype=object).shape[0] if np.size(self.alpha) else 0
        object.__setattr__(self, "alpha", _arr(self.alpha, (dL, dL), "alpha"))
        object.__setattr__(self, "a_action", _arr(self.a_action, (dA, dL, dL), "a_action"))
        object.__setattr__(self, "bracket", _arr(self.bracket, (dL,) * 4, "bracket"))
        object.__setattr__(self, "anchor", _arr(self.anchor, (dL, dL, dA, dA), "anchor"))
        object.__setattr__(self, "tags", tuple(self.tags))

    @property
    def L_dim(self) -> int:
        return self.alpha.shape[0]

    @property
    def phi(self) -> np.ndarray:
        return self.A.phi

    @property
    def regular(self) -> bool:
        return self.A.regular and rank(self.alpha) == self.L_dim

    def replace(self, **changes) -> "HLR3Algebra":
        return dataclasses.replace(self, **changes)

    def __eq__(self, other):
        if not isinstance(other, HLR3Algebra):
            return NotImplemented
        return (
            self.A == other.A
            and _same(self.a_action, other.a_action)
            and _same(self.bracket, other.bracket)
            and _same(self.alpha, other.alpha)
            and _same(self.anchor, other.anchor)
        )

    __hash__ = None

    @classmethod
    def untwisted_over_q(cls, bracket, alpha=None, name="") -> "HLR3Algebra":
        """Algebra over A = Q with scalar action and zero anchor."""
        b = to_exact_array(bracket)
        n = b.shape[0]
        action = T.identity(n).reshape(1, n, n)
        return cls(
            A=CommAlgebra.rationals(),
            a_action=action,
            bracket=b,
            alpha=T.identity(n) if alpha is None else alpha,
            anchor=T.zeros((n, n, 1, 1)),
            name=name,
        )


@dataclass(frozen=True, eq=False)
class HLR3Morphism:
    """Pair (g, f): g on algebra coordinates, f on L coordinates."""

    g: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", to_exact_array(self.g))
        object.__setattr__(self, "f", to_exact_array(self.f))


@dataclass
class ConditionResult:
    name: str
    passed: bool
    witness: tuple | None = None
    labels: tuple = ()
    lhs: list | None = None
    rhs: list | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if not self.passed:
            out["witness"] = dict(zip(self.labels, self.witness)) if self.labels else list(self.witness)
            out["lhs"] = self.lhs
            out["rhs"] = self.rhs
        return out

    def __str__(self):
        if self.passed:
            return f"PASS {self.name}"
        where = ", ".join(f"{k}={v}" for k, v in zip(self.labels, self.witness))
        return f"FAIL {self.name} at ({where}): lhs={self.lhs} rhs={self.rhs}"


@dataclass
class VerificationReport:
    subject: str
    conditions: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __bool__(self):
        return self.passed

    def failed(self) -> list:
        return [c for c in self.conditions if not c.passed]

    def condition(self, name) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def extend(self, other: "VerificationReport", prefix=""):
        for c in other.conditions:
            self.conditions.append(dataclasses.replace(c, name=prefix + c.name))

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "conditions": [c.to_dict() for c in self.conditions],
        }

    def __str__(self):
        head = f"{self.subject}: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + ["  " + str(c) for c in self.conditions])


def _fmt(values) -> list:
    arr = np.asarray(values, dtype=object)
    return np.vectorize(lambda x: format_rational(int(x) if isinstance(x, np.integer) else x), otypes=[object])(
        arr
    ).tolist() if arr.size else []


class _Checker:
    """Collects named tensor identities ``lhs == rhs``.

    ``labels`` names the leading axes that form the witness tuple; trailing
    axes are output coordinates and are reported as the two side values.
    """

    def __init__(self, subject):
        self.report = VerificationReport(subject)

    def check(self, name, labels, lhs, rhs):
        idx = T.first_mismatch(lhs, rhs)
        if idx is None:
            self.report.conditions.append(ConditionResult(name, True))
            return True
        w = idx[: len(labels)]
        self.report.conditions.append(
            ConditionResult(name, False, w, tuple(labels), _fmt(lhs[w]), _fmt(rhs[w]))
        )
        return False

    def check_chunked(self, name, labels, pairs):
        """Like :meth:`check` over an iterator of (offset, lhs, rhs) chunks along axis 0."""
        for offset, lhs, rhs in pairs:
            idx = T.first_mismatch(lhs, rhs)
            if idx is not None:
                w = (idx[0] + offset,) + idx[1 : len(labels)]
                local = idx[: len(labels)]
                self.report.conditions.append(
                    ConditionResult(name, False, w, tuple(labels), _fmt(lhs[local]), _fmt(rhs[local]))
                )
                return False
        self.report.conditions.append(ConditionResult(name, True))
        return True


def _backend(*arrays):
    ints = T.int_backend(arrays)
    return ints if ints is not None else list(arrays)


def _check_dims(alg: HLR3Algebra):
    dA, dL = alg.A.dim, alg.L_dim
    expect = {
        "A.mult": (alg.A.mult.shape, (dA,) * 3),
        "A.phi": (alg.A.phi.shape, (dA, dA)),
        "a_action": (alg.a_action.shape, (dA, dL, dL)),
        "bracket": (alg.bracket.shape, (dL,) * 4),
        "alpha": (alg.alpha.shape, (dL, dL)),
        "anchor": (alg.anchor.shape, (dL, dL, dA, dA)),
    }
    for what, (got, want) in expect.items():
        if tuple(got) != want:
            raise DimensionError(f"{what} has shape {got}, expected {want}")


def _hom_jacobi_chunks(b, al, chunk=1):
    """Chunks of the Hom-Jacobi identity over the first argument x."""
    E = T.einsum
    ba12 = E("ix,jy,ijqo->xyqo", al, al, b)  # [a x, a y, e_q]
    ba23 = E("jv,kw,qjko->qvwo", al, al, b)  # [e_q, a v, a w]
    ba13 = E("iu,kw,iqko->uqwo", al, al, b)  # [a u, e_q, a w]
    n = b.shape[0]
    for start in range(0, n, chunk):
        bx = b[start : start + chunk]
        lhs = E("xyqo,uvwq->xyuvwo", ba12[start : start + chunk], b)
        rhs = (
            E("xyuq,qvwo->xyuvwo", bx, ba23)
            + E("xyvq,uqwo->xyuvwo", bx, ba13)
            + E("xywq,uvqo->xyuvwo", bx, ba12)
        )
        yield start, lhs, rhs


def _chunk_size(n: int) -> int:
    # keep each chunk around a million entries
    return max(1, min(n, 10**6 // max(1, n**5)))


def verify_hom_jacobi(alg: HLR3Algebra) -> VerificationReport:
    """Hom-Jacobi identity on every basis quintuple (x, y, u, v, w)."""
    _check_dims(alg)
    b, al = _backend(alg.bracket, alg.alpha)
    ch = _Checker(alg.name or "algebra")
    n = alg.L_dim
    ch.check_chunked("hom_jacobi", ("x", "y", "u", "v", "w"), _hom_jacobi_chunks(b, al, _chunk_size(n)))
    return ch.report


def _check_comm_algebra(ch: _Checker, c, u, P):
    E = T.einsum
    d = c.shape[0]
    eye = np.eye(d, dtype=c.dtype) if c.dtype != object else T.identity(d)
    ch.check("A_commutative", ("i", "j"), c, c.transpose(1, 0, 2))
    ch.check("A_associative", ("i", "j", "k"), E("ijs,sko->ijko", c, c), E("jks,iso->ijko", c, c))
    ch.check("A_unit", ("j",), E("i,ijk->jk", u, c), eye)
    ch.check("phi_multiplicative", ("i", "j"), E("ijk,ok->ijo", c, P), E("pi,qj,pqo->ijo", P, P, c))


def _check_module_action(ch: _Checker, prefix, c, u, t):
    E = T.einsum
    d = t.shape[1]
    eye = np.eye(d, dtype=t.dtype) if t.dtype != object else T.identity(d)
    ch.check(f"{prefix}_unit_action", ("x",), E("i,ixk->xk", u, t), eye)
    ch.check(f"{prefix}_action_associative", ("i", "j", "x"), E("ijs,sxo->ijxo", c, t), E("jxy,iyo->ijxo", t, t))


def _check_representation(ch: _Checker, prefix, b, al, rep, tw):
    """(rep, tw) as a representation of (L, bracket, alpha): skew, multiplicative, R1, R2.

    ``rep[x, y]`` is the operator matrix of rep(x_x, x_y) on the target
    space and ``tw`` the twist on that space.
    """
    E = T.einsum
    ch.check(f"{prefix}_skew", ("x", "y"), rep, -rep.transpose(1, 0, 2, 3))
    ra = E("ix,jy,ijok->xyok", al, al, rep)  # rep(a x, a y)
    ch.check(f"{prefix}_multiplicative", ("x", "y"), E("ok,xyks->xyos", tw, rep), E("xyok,ks->xyos", ra, tw))
    # x1..x4 -> a, b, c, d; operator matrices carry (out, in) = (o, s)
    rb = E("abcq,jd,qjok->abcdok", b, al, rep)  # rep([x1,x2,x3], alpha x4)
    rb_tw = E("abcdok,ks->abcdos", rb, tw)
    lhs1 = E("abok,cdks->abcdos", ra, rep) - E("cdok,abks->abcdos", ra, rep)
    rhs1 = rb_tw + E("ic,abdq,iqok,ks->abcdos", al, b, rep, tw)
    ch.check(f"{prefix}_R1", ("x1", "x2", "x3", "x4"), lhs1, rhs1)
    rhs2 = (
        E("abok,cdks->abcdos", ra, rep)
        + E("bcok,adks->abcdos", ra, rep)
        + E("caok,bdks->abcdos", ra, rep)
    )
    ch.check(f"{prefix}_R2", ("x1", "x2", "x3", "x4"), rb_tw, rhs2)


def verify_all(alg: HLR3Algebra) -> VerificationReport:
    """Check every defining condition over all basis tuples.

    Conditions are reported in a fixed order under stable names; each
    failing condition carries its lexicographically first counterexample.
    """
    _check_dims(alg)
    E = T.einsum
    c, u, P, t, b, al, r = _backend(
        alg.A.mult, alg.A.unit, alg.A.phi, alg.a_action, alg.bracket, alg.alpha, alg.anchor
    )
    ch = _Checker(alg.name or "algebra")
    _check_comm_algebra(ch, c, u, P)
    _check_module_action(ch, "L", c, u, t)
    ch.check("bracket_skew_12", ("x", "y", "z"), b, -b.transpose(1, 0, 2, 3))
    ch.check("bracket_skew_23", ("x", "y", "z"), b, -b.transpose(0, 2, 1, 3))
    ch.check(
        "anchor_phi_derivation",
        ("x", "y", "i", "j"),
        E("ijk,xyok->xyijo", c, r),
        E("pi,xyqj,pqo->xyijo", P, r, c) + E("pj,xyqi,pqo->xyijo", P, r, c),
    )
    ch.check_chunked("hom_jacobi", ("x", "y", "u", "v", "w"), _hom_jacobi_chunks(b, al, _chunk_size(alg.L_dim)))
    ch.check(
        "alpha_multiplicative",
        ("x", "y", "z"),
        E("xyzl,ol->xyzo", b, al),
        E("ix,jy,kz,ijko->xyzo", al, al, al, b),
    )
    ch.check("cond2_alpha_semilinear", ("a", "x"), E("ixk,ok->ixo", t, al), E("pi,yx,pyo->ixo", P, al, t))
    _check_representation(ch, "cond3_anchor", b, al, r, P)
    P2 = P.dot(P)
    phi2_mult = E("pi,pso->iso", P2, c)  # matrix of b -> phi^2(a_i) b, indexed [i, s, o]
    rhs4 = E("iso,xysk->ixyok", phi2_mult, r)
    ch.check("cond4_anchor_left", ("a", "x", "y"), E("ixz,zyok->ixyok", t, r), rhs4)
    ch.check("cond4_anchor_right", ("a", "x", "y"), E("iyz,xzok->ixyok", t, r), rhs4)
    al2 = al.dot(al)
    ch.check(
        "cond5_leibniz",
        ("a", "x", "y", "z"),
        E("izw,xywo->ixyzo", t, b),
        E("pi,xyzq,pqo->ixyzo", P2, b, t) + E("xysi,wz,swo->ixyzo", r, al2, t),
    )
    return ch.report


def verify_morphism(src: HLR3Algebra, dst: HLR3Algebra, h: HLR3Morphism) -> VerificationReport:
    """Check that (g, f) is a homomorphism src -> dst on all basis tuples."""
    g, f = h.g, h.f
    if g.shape != (dst.A.dim, src.A.dim) or f.shape != (dst.L_dim, src.L_dim):
        raise DimensionError(
            f"morphism shapes g{g.shape}, f{f.shape} do not fit "
            f"A: {src.A.dim}->{dst.A.dim}, L: {src.L_dim}->{dst.L_dim}"
        )
    E = T.einsum
    arrs = _backend(
        src.A.mult, src.A.phi, src.a_action, src.bracket, src.alpha, src.anchor,
        dst.A.mult, dst.A.phi, dst.a_action, dst.bracket, dst.alpha, dst.anchor, g, f,
    )
    c, P, t, b, al, r, c2, P2, t2, b2, al2, r2, g, f = arrs
    ch = _Checker(f"{src.name or 'src'} -> {dst.name or 'dst'}")
    ch.check("g_multiplicative", ("i", "j"), E("ijk,ok->ijo", c, g), E("pi,qj,pqo->ijo", g, g, c2))
    ch.check("hom1_action", ("a", "x"), E("ixk,ok->ixo", t, f), E("pi,yx,pyo->ixo", g, f, t2))
    ch.check(
        "hom2_bracket",
        ("x", "y", "z"),
        E("xyzl,ol->xyzo", b, f),
        E("ix,jy,kz,ijko->xyzo", f, f, f, b2),
    )
    ch.check("hom3_alpha", ("x",), f.dot(al).T, al2.dot(f).T)
    ch.check("hom4_phi", ("a",), g.dot(P).T, P2.dot(g).T)
    ch.check(
        "hom5_anchor",
        ("x", "y", "a"),
        E("ok,xyka->xyao", g, r),
        E("ix,jy,ijok,ka->xyao", f, f, r2, g),
    )
    return ch.report


def evaluate_bracket(alg: HLR3Algebra, x, y, z) -> np.ndarray:
    vs = [to_exact_array(v) for v in (x, y, z)]
    for v in vs:
        if v.shape != (alg.L_dim,):
            raise DimensionError(f"vector of shape {v.shape}, expected ({alg.L_dim},)")
    return T.normalize(T.einsum("i,j,k,ijkl->l", *vs, alg.bracket))


def evaluate_anchor(alg: HLR3Algebra, x, y, a) -> np.ndarray:
    x, y, a = (to_exact_array(v) for v in (x, y, a))
    if x.shape != (alg.L_dim,) or y.shape != (alg.L_dim,) or a.shape != (alg.A.dim,):
        raise DimensionError("anchor arguments have the wrong length")
    return T.normalize(T.einsum("i,j,ijok,k->o", x, y, alg.anchor, a))
