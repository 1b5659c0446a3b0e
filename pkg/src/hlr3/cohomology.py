"""Cochains C^n(L; M), the coboundary and cohomology dimensions.

Degree convention: a degree-n cochain takes 2n + 1 arguments, so C^0 = maps
L -> M and the coboundary maps C^{n-1} -> C^n.  For n >= 1 a cochain is skew
in each of its first n - 1 argument pairs and totally skew in its last three
arguments (the domain is wedge^2 L (x) ... (x) wedge^2 L (x) wedge^3 L), so
C^1 consists of totally skew maps, as the extension theory needs.  The formula is the four-group one with the pair action psi
in place of the anchor:

    delta f(x_1, ..., x_{2n+1})
      = (-1)^{n+1} psi(a^n x_{2n+1}, a^n x_{2n-1}) f(x_1, ..., x_{2n-2}, x_{2n})
      + (-1)^{n+1} psi(a^n x_{2n},   a^n x_{2n+1}) f(x_1, ..., x_{2n-1})
      + sum_k (-1)^{k+1} psi(a^n x_{2k-1}, a^n x_{2k}) f(..., ^x_{2k-1}, ^x_{2k}, ...)
      + sum_k sum_{j>=2k+1} (-1)^k f(a x_1, ..., ^, ^, ..., [x_{2k-1}, x_{2k}, x_j], ..., a x_{2n+1})

with ``a = alpha``.  Cochain values are stored as full tensors of shape
``(dim L,) * (2n + 1) + (dim M,)``.  Linear algebra on cochain spaces runs in
packed coordinates: one coordinate per (pair_1, ..., pair_{n-1}, triple, o)
with increasing indices inside each pair and triple.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _tensor as T
from .algebra import DimensionError, HLR3Algebra
from .exact_linalg import ContainmentError, Echelon, SubspaceBasis, exact, quotient_dim
from .modules import LeftModule, check_module_dims

__all__ = [
    "Cochain",
    "CochainError",
    "CochainSpaceBasis",
    "CohomologyDims",
    "ConventionFault",
    "DegreeError",
    "MAX_DEGREE_ENV",
    "check_0cocycle_literal",
    "check_1cocycle_literal",
    "coboundary_space",
    "cochain_space",
    "cocycle_basis",
    "cocycle_space",
    "cohomology_dim",
    "delta",
    "delta_direct",
    "delta_matrix",
    "evaluate_delta_at",
    "literal_cocycle_report",
    "max_degree",
]

MAX_DEGREE_ENV = "HLR3_MAX_DEGREE"


class DegreeError(ValueError):
    pass


class CochainError(ValueError):
    """A tensor is not a cochain: not pair-skew or violates conditions (1)/(2)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConventionFault(RuntimeError):
    """The coboundary left the cochain space or delta o delta != 0."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def max_degree() -> int:
    raw = os.environ.get(MAX_DEGREE_ENV, "2")
    try:
        val = int(raw)
    except ValueError:
        raise DegreeError(f"{MAX_DEGREE_ENV} must be an integer, got {raw!r}") from None
    if val < 0:
        raise DegreeError(f"{MAX_DEGREE_ENV} must be >= 0")
    return val


def _check_degree(n: int):
    if n < 0:
        raise DegreeError("degree must be >= 0")
    if n > max_degree():
        raise DegreeError(f"degree {n} exceeds the configured bound {max_degree()} (set {MAX_DEGREE_ENV})")


@dataclass(frozen=True, eq=False)
class Cochain:
    degree: int
    values: np.ndarray

    def __post_init__(self):
        vals = T.normalize(np.asarray(self.values, dtype=object))
        if self.degree < 0:
            raise DegreeError("degree must be >= 0")
        if vals.ndim != 2 * self.degree + 2:
            raise DimensionError(
                f"degree {self.degree} cochain needs {2 * self.degree + 2} axes, got {vals.ndim}"
            )
        if len(set(vals.shape[:-1])) > 1:
            raise DimensionError(f"argument axes differ in length: {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def arity(self) -> int:
        return 2 * self.degree + 1

    @property
    def L_dim(self) -> int:
        return self.values.shape[0]

    @property
    def M_dim(self) -> int:
        return self.values.shape[-1]

    @classmethod
    def zero(cls, degree: int, L_dim: int, M_dim: int) -> "Cochain":
        return cls(degree, T.zeros((L_dim,) * (2 * degree + 1) + (M_dim,)))

    def is_zero(self) -> bool:
        return T.is_zero(self.values)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.values.shape == other.values.shape
            and not np.any(self.values != other.values)
        )

    __hash__ = None

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.degree != other.degree:
            raise DegreeError("cannot add cochains of different degrees")
        return Cochain(self.degree, self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(-1)

    def scale(self, c) -> "Cochain":
        c = exact(c)
        return Cochain(self.degree, self.values * c)

    def __call__(self, *args) -> np.ndarray:
        """Evaluate at basis indices."""
        return self.values[tuple(args)]


def _perm_sign(p) -> int:
    sign, p = 1, list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


_TRIPLE_PERMS = [(p, _perm_sign(p)) for p in itertools.permutations(range(3))]


class _Packing:
    """Packed coordinates for degree-n cochains L^{2n+1} -> M.

    Degree 0 is a single slot.  For n >= 1 the first n - 1 pairs are skew and
    the last three arguments are totally skew, so a packed base is
    (pair_1, ..., pair_{n-1}, triple) with strictly increasing entries.
    """

    def __init__(self, L_dim: int, M_dim: int, n: int):
        self.L_dim, self.M_dim, self.n = L_dim, M_dim, n
        self.pairs = list(itertools.combinations(range(L_dim), 2))
        self.pair_index = {p: i for i, p in enumerate(self.pairs)}
        self.triples = list(itertools.combinations(range(L_dim), 3)) if n else [(z,) for z in range(L_dim)]
        self.triple_index = {t: i for i, t in enumerate(self.triples)}
        self.n_base = len(self.pairs) ** max(n - 1, 0) * len(self.triples)
        self.size = self.n_base * M_dim

    def base_of(self, args):
        """(sign, base index) of an argument tuple, or None when it is forced to vanish."""
        sign, base = 1, 0
        P = len(self.pairs)
        for k in range(self.n - 1):
            a, b = args[2 * k], args[2 * k + 1]
            if a == b:
                return None
            if a > b:
                a, b, sign = b, a, -sign
            base = base * P + self.pair_index[(a, b)]
        last = args[2 * self.n - 2 :] if self.n else args
        if len(set(last)) < len(last):
            return None
        order = sorted(range(len(last)), key=lambda i: last[i])
        sign *= _perm_sign(order)
        key = tuple(last[i] for i in order)
        return sign, base * len(self.triples) + self.triple_index[key]

    def eval_tuples(self):
        for ps in itertools.product(self.pairs, repeat=max(self.n - 1, 0)):
            for t in self.triples:
                yield tuple(i for p in ps for i in p) + t

    @cached_property
    def _positions(self):
        # index arrays of the packed positions in the full tensor, in packed order
        tuples = np.array(list(self.eval_tuples()), dtype=np.intp).reshape(self.n_base, 2 * self.n + 1)
        return tuple(tuples.T)

    def from_full(self, values: np.ndarray) -> np.ndarray:
        """Packed vector(s); a leading batch axis is kept."""
        if values.ndim == 2 * self.n + 2:
            return values[self._positions].reshape(-1)
        return values[(slice(None),) + self._positions].reshape(values.shape[0], -1)

    def to_full(self, vecs: np.ndarray) -> np.ndarray:
        """Full tensors from a batch of packed vectors (batch, size)."""
        batch = vecs.shape[0]
        out = np.zeros((batch,) + (self.L_dim,) * (2 * self.n + 1) + (self.M_dim,), dtype=vecs.dtype)
        if vecs.dtype == object:
            out[...] = 0
        vals = vecs.reshape(batch, self.n_base, self.M_dim)
        pos = self._positions
        lead = 2 * self.n - 2 if self.n else 0
        tails = _TRIPLE_PERMS if self.n else [((0,), 1)]
        for flips in itertools.product((False, True), repeat=max(self.n - 1, 0)):
            idx = []
            sign = 1
            for k, f in enumerate(flips):
                a, b = pos[2 * k], pos[2 * k + 1]
                idx += [b, a] if f else [a, b]
                sign = -sign if f else sign
            for perm, ps in tails:
                full = idx + [pos[lead + i] for i in perm]
                out[(slice(None),) + tuple(full)] = vals * (sign * ps)
        return out


def _skew_witness(values: np.ndarray, n: int):
    """First failing transposition: pair k (0-based) or 'last' for the final pair of the triple."""
    swaps = [(2 * k, 2 * k + 1) for k in range(n)]
    if n:
        swaps.append((2 * n - 1, 2 * n))
    for a, b in swaps:
        perm = list(range(values.ndim))
        perm[a], perm[b] = perm[b], perm[a]
        idx = T.first_mismatch(values, -values.transpose(perm))
        if idx is not None:
            return (a + 1, b + 1), idx[:-1]
    return None


def _nonzero_column(m: np.ndarray, i: int):
    return [(l, m[l, i]) for l in range(m.shape[0]) if m[l, i] != 0]


def _constraint_rows(alg: HLR3Algebra, mod: LeftModule, pk: _Packing):
    """Sparse rows (packed coordinates) of conditions (1) and, for dim A > 1, (2)."""
    n, dM = pk.n, pk.M_dim
    al, be = alg.alpha, mod.beta
    cols = [_nonzero_column(al, i) for i in range(pk.L_dim)]
    for t in pk.eval_tuples():
        sb, base = pk.base_of(t)
        terms = {}
        for combo in itertools.product(*(cols[i] for i in t)):
            hit = pk.base_of(tuple(l for l, _ in combo))
            if hit is None:
                continue
            c = sb * hit[0]
            for _, v in combo:
                c *= v
            terms[hit[1]] = terms.get(hit[1], 0) + c
        for o in range(dM):
            row = {}
            for b2, c in terms.items():
                if c != 0:
                    row[b2 * dM + o] = exact(c)
            for k in range(dM):
                if be[o, k] != 0:
                    key = base * dM + k
                    row[key] = exact(row.get(key, 0) - sb * be[o, k])
            row = {k: v for k, v in row.items() if v != 0}
            if row:
                yield row
    if alg.A.dim <= 1:
        return
    Phi = T.matpow(alg.phi, 2 * n + 1)
    act, mact = alg.a_action, mod.a_action
    for a in range(alg.A.dim):
        # phi^{2n+1}(e_a) acting on M
        left = T.einsum("p,pko->ok", Phi[:, a], mact)
        for t in pk.eval_tuples():
            sb, base = pk.base_of(t)
            for slot in range(2 * n + 1):
                terms = {}
                for y in range(pk.L_dim):
                    c = act[a, t[slot], y]
                    if c == 0:
                        continue
                    t2 = t[:slot] + (y,) + t[slot + 1 :]
                    hit = pk.base_of(t2)
                    if hit is not None:
                        terms[hit[1]] = terms.get(hit[1], 0) + sb * hit[0] * c
                for o in range(dM):
                    row = {b2 * dM + o: exact(c) for b2, c in terms.items() if c != 0}
                    for k in range(dM):
                        if left[o, k] != 0:
                            key = base * dM + k
                            row[key] = exact(row.get(key, 0) - sb * left[o, k])
                    row = {k: v for k, v in row.items() if v != 0}
                    if row:
                        yield row


@dataclass(eq=False)
class CochainSpaceBasis:
    """Basis of C^n(L; M) as the kernel of the constraint rows in packed coordinates.

    Basis vector ``j`` is the kernel vector for free packed column
    ``free[j]``; the coordinates of a member are therefore its values at the
    free columns.
    """

    degree: int
    L_dim: int
    M_dim: int
    _packing: _Packing = field(repr=False)
    _constraints: Echelon = field(repr=False)

    @cached_property
    def free(self) -> list:
        return [c for c in range(self._packing.size) if c not in self._constraints.pivots]

    @property
    def dim(self) -> int:
        return len(self.free)

    @cached_property
    def packed_matrix(self) -> np.ndarray:
        """Packed basis vectors as rows (dim, packed size)."""
        out = T.zeros((self.dim, self._packing.size))
        for j, sv in enumerate(self._constraints.kernel_vectors()):
            for k, v in sv.items():
                out[j, k] = v
        return out

    @property
    def basis(self) -> list:
        full = self._packing.to_full(self.packed_matrix)
        return [Cochain(self.degree, full[j]) for j in range(self.dim)]

    def cochain(self, coords) -> Cochain:
        coords = np.asarray(coords, dtype=object).reshape(1, -1)
        vec = coords.dot(self.packed_matrix) if self.dim else T.zeros((1, self._packing.size))
        return Cochain(self.degree, self._packing.to_full(T.normalize(vec))[0])

    def violation(self, f: Cochain):
        """``None`` for members, otherwise a description of the first failure."""
        if f.degree != self.degree or f.values.shape != (self.L_dim,) * f.arity + (self.M_dim,):
            return f"shape {f.values.shape} does not match degree {self.degree} cochains"
        w = _skew_witness(f.values, self.degree)
        if w is not None:
            return f"not skew in arguments {w[0]} at {w[1]}"
        vec = self._packing.from_full(f.values)
        for row in self._constraints.rows():
            if sum(v * vec[k] for k, v in row.items()) != 0:
                return "violates the twist/A-linearity conditions"
        return None

    def contains(self, f: Cochain) -> bool:
        return self.violation(f) is None

    def coordinates(self, f: Cochain) -> np.ndarray:
        msg = self.violation(f)
        if msg is not None:
            raise CochainError(f"not a degree {self.degree} cochain: {msg}")
        vec = self._packing.from_full(f.values)
        return np.array([vec[c] for c in self.free], dtype=object)


_SPACE_CACHE: dict = {}


def _cache_key(alg, mod, n):
    return (id(alg), id(mod), n)


def cochain_space(alg: HLR3Algebra, mod: LeftModule, n: int) -> CochainSpaceBasis:
    _check_degree(n)
    return _cochain_space(alg, mod, n)


def _cochain_space(alg, mod, n) -> CochainSpaceBasis:
    check_module_dims(alg, mod)
    key = _cache_key(alg, mod, n)
    hit = _SPACE_CACHE.get(key)
    if hit is not None and hit[0] is alg and hit[1] is mod:
        return hit[2]
    pk = _Packing(alg.L_dim, mod.dim, n)
    ech = Echelon(pk.size)
    for row in _constraint_rows(alg, mod, pk):
        ech.insert(row)
        if ech.rank == pk.size:
            break
    space = CochainSpaceBasis(n, alg.L_dim, mod.dim, pk, ech)
    if len(_SPACE_CACHE) > 64:
        _SPACE_CACHE.clear()
    _SPACE_CACHE[key] = (alg, mod, space)
    return space


# --- coboundary, tensor path -------------------------------------------------

_OUT = "abcdefghijklmnopqrstuvwx"
_SUM = "ABCDEFGHIJKLMNOPQRSTUVWXY"


def _delta_terms(n: int, alpha_is_id: bool):
    """(sign, kind, spec) for each term of delta into degree n."""
    idx = _OUT[: 2 * n + 1]
    x = lambda r: idx[r - 1]  # 1-based argument letter
    s = (-1) ** (n + 1)
    terms = [
        (s, "psi", (x(2 * n + 1), x(2 * n - 1), idx[: 2 * n - 2] + x(2 * n))),
        (s, "psi", (x(2 * n), x(2 * n + 1), idx[: 2 * n - 1])),
    ]
    for k in range(1, n + 1):
        rest = "".join(x(r) for r in range(1, 2 * n + 2) if r not in (2 * k - 1, 2 * k))
        terms.append(((-1) ** (k + 1), "psi", (x(2 * k - 1), x(2 * k), rest)))
    for k in range(1, n + 1):
        for j in range(2 * k + 1, 2 * n + 2):
            fl, ops = "", []
            for r in range(1, 2 * n + 2):
                if r in (2 * k - 1, 2 * k):
                    continue
                u = _SUM[r - 1]
                if r == j:
                    fl += u
                    ops.append(("bracket", x(2 * k - 1) + x(2 * k) + x(j) + u))
                elif alpha_is_id:
                    fl += x(r)
                else:
                    fl += u
                    ops.append(("alpha", u + x(r)))
            terms.append(((-1) ** k, "insert", (fl, ops)))
    return idx, terms


def _delta_prepare(alg: HLR3Algebra, mod: LeftModule, n: int):
    al = alg.alpha
    alpha_is_id = not np.any(al != T.identity(al.shape[0]))
    An = T.matpow(al, n)
    psi_n = T.normalize(T.einsum("px,qy,pqok->xyok", An, An, mod.psi))
    return psi_n, alpha_is_id


def _delta_core(F, psi_n, al, br, n: int, alpha_is_id: bool) -> np.ndarray:
    idx, terms = _delta_terms(n, alpha_is_id)
    out = None
    for sign, kind, spec in terms:
        if kind == "psi":
            p, q, fl = spec
            val = T.einsum(f"{p}{q}yz,Z{fl}z->Z{idx}y", psi_n, F)
        else:
            fl, ops = spec
            names = [f"Z{fl}y"] + [o[1] for o in ops]
            arrays = [F] + [br if o[0] == "bracket" else al for o in ops]
            val = T.einsum(",".join(names) + f"->Z{idx}y", *arrays)
        if sign == 1:
            out = val if out is None else out + val
        else:
            out = -val if out is None else out - val
    return out


def _delta_batch(alg: HLR3Algebra, mod: LeftModule, F: np.ndarray, n: int) -> np.ndarray:
    """delta of a batch F (batch, L^{2n-1}, M) into degree n, as (batch, L^{2n+1}, M)."""
    psi_n, alpha_is_id = _delta_prepare(alg, mod, n)
    arrays = [F, psi_n, alg.alpha, alg.bracket]
    machine = T.int_backend(arrays, degree=2 * n + 2, dtype=np.float64)
    if machine is not None:
        return T.from_machine(_delta_core(*machine, n, alpha_is_id))
    return T.normalize(_delta_core(*arrays, n, alpha_is_id))


def _require_member(alg, mod, f: Cochain):
    space = _cochain_space(alg, mod, f.degree)
    msg = space.violation(f)
    if msg is not None:
        raise CochainError(f"input is not a degree {f.degree} cochain: {msg}")


def delta(alg: HLR3Algebra, mod: LeftModule, f: Cochain, check: bool = True) -> Cochain:
    """Coboundary of ``f`` in C^{n-1}; returns a degree-n cochain (tensor path)."""
    check_module_dims(alg, mod)
    if f.values.shape != (alg.L_dim,) * f.arity + (mod.dim,):
        raise DimensionError(f"cochain shape {f.values.shape} does not match the algebra/module")
    if check:
        _require_member(alg, mod, f)
    n = f.degree + 1
    return Cochain(n, _delta_batch(alg, mod, f.values[None], n)[0])


# --- coboundary, symbol-by-symbol path ----------------------------------------


def _vec_add(acc: dict, vec: dict, c):
    for k, v in vec.items():
        nv = acc.get(k, 0) + c * v
        if nv == 0:
            acc.pop(k, None)
        else:
            acc[k] = nv


def _eval_multi(values: np.ndarray, vecs: list) -> dict:
    """f(v_1, ..., v_r) for sparse argument vectors, as a sparse M-vector."""
    out: dict = {}
    for combo in itertools.product(*(list(v.items()) for v in vecs)):
        c = 1
        for _, x in combo:
            c *= x
        row = values[tuple(i for i, _ in combo)]
        for o, y in enumerate(row):
            if y != 0:
                _vec_add(out, {o: y}, c)
    return out


def evaluate_delta_at(alg: HLR3Algebra, mod: LeftModule, f: Cochain, args) -> np.ndarray:
    """delta f at one basis tuple, expanding the formula term by term."""
    n = f.degree + 1
    args = tuple(args)
    if len(args) != 2 * n + 1:
        raise DimensionError(f"delta into degree {n} takes {2 * n + 1} arguments")
    dL = alg.L_dim
    e = lambda i: {i: 1}

    def alpha(v: dict, times=1) -> dict:
        for _ in range(times):
            w: dict = {}
            for i, c in v.items():
                _vec_add(w, {l: alg.alpha[l, i] for l in range(dL) if alg.alpha[l, i] != 0}, c)
            v = w
        return v

    def bracket(u: dict, v: dict, w: dict) -> dict:
        out: dict = {}
        for (i, a), (j, b), (k, c) in itertools.product(u.items(), v.items(), w.items()):
            _vec_add(out, {l: alg.bracket[i, j, k, l] for l in range(dL) if alg.bracket[i, j, k, l] != 0}, a * b * c)
        return out

    def psi(u: dict, v: dict, m: dict) -> dict:
        out: dict = {}
        for (i, a), (j, b), (k, c) in itertools.product(u.items(), v.items(), m.items()):
            col = mod.psi[i, j][:, k]
            _vec_add(out, {o: col[o] for o in range(mod.dim) if col[o] != 0}, a * b * c)
        return out

    X = [None] + [e(i) for i in args]  # 1-based
    total: dict = {}
    s = (-1) ** (n + 1)
    inner = _eval_multi(f.values, [X[r] for r in range(1, 2 * n - 1)] + [X[2 * n]])
    _vec_add(total, psi(alpha(X[2 * n + 1], n), alpha(X[2 * n - 1], n), inner), s)
    inner = _eval_multi(f.values, [X[r] for r in range(1, 2 * n)])
    _vec_add(total, psi(alpha(X[2 * n], n), alpha(X[2 * n + 1], n), inner), s)
    for k in range(1, n + 1):
        rest = [X[r] for r in range(1, 2 * n + 2) if r not in (2 * k - 1, 2 * k)]
        inner = _eval_multi(f.values, rest)
        _vec_add(total, psi(alpha(X[2 * k - 1], n), alpha(X[2 * k], n), inner), (-1) ** (k + 1))
    for k in range(1, n + 1):
        for j in range(2 * k + 1, 2 * n + 2):
            argv = []
            for r in range(1, 2 * n + 2):
                if r in (2 * k - 1, 2 * k):
                    continue
                argv.append(bracket(X[2 * k - 1], X[2 * k], X[j]) if r == j else alpha(X[r]))
            _vec_add(total, _eval_multi(f.values, argv), (-1) ** k)
    out = T.zeros(mod.dim)
    for o, v in total.items():
        out[o] = exact(v)
    return out


def delta_direct(alg: HLR3Algebra, mod: LeftModule, f: Cochain) -> Cochain:
    """delta f with every entry produced by :func:`evaluate_delta_at`."""
    check_module_dims(alg, mod)
    n = f.degree + 1
    out = T.zeros((alg.L_dim,) * (2 * n + 1) + (mod.dim,))
    for args in itertools.product(range(alg.L_dim), repeat=2 * n + 1):
        out[args] = evaluate_delta_at(alg, mod, f, args)
    return Cochain(n, out)


# --- matrices and cohomology ----------------------------------------------------


def _chunks(total: int, size: int):
    for start in range(0, total, size):
        yield start, min(total, start + size)


def _delta_packed(alg, mod, space: CochainSpaceBasis, out_packing: _Packing) -> np.ndarray:
    """Rows: delta of each basis vector of ``space`` in packed output coordinates."""
    n = space.degree + 1
    psi_n, alpha_is_id = _delta_prepare(alg, mod, n)
    B = space.packed_matrix
    arrays = [B, psi_n, alg.alpha, alg.bracket]
    # every output entry sums at most (dim L)^(2n+1) * dim M products
    reach = max(alg.L_dim, mod.dim, 2)
    machine = T.int_backend(arrays, degree=2 * n + 2, dtype=np.float64, dim=reach)
    if machine is not None:
        arrays = machine
    B, psi_n, al, br = arrays
    rows = T.zeros((space.dim, out_packing.size))
    per = max(1, out_packing.L_dim ** (2 * n + 1) * out_packing.M_dim)
    chunk = max(1, (4_000_000 if machine is not None else 200_000) // per)
    for a, b in _chunks(space.dim, chunk):
        F = space._packing.to_full(B[a:b])
        D = out_packing.from_full(_delta_core(F, psi_n, al, br, n, alpha_is_id))
        rows[a:b] = T.from_machine(D) if machine is not None else T.normalize(D)
    return rows


def delta_matrix(alg: HLR3Algebra, mod: LeftModule, n: int) -> np.ndarray:
    """Matrix of delta: C^{n-1} -> C^n in the cochain-space bases (n >= 1).

    Every image is re-checked for membership in C^n; a violation raises
    :class:`ConventionFault`.
    """
    _check_degree(n)
    if n < 1:
        raise DegreeError("delta_matrix needs n >= 1 (delta maps C^{n-1} -> C^n)")
    src = _cochain_space(alg, mod, n - 1)
    dst = _cochain_space(alg, mod, n)
    rows = _delta_packed(alg, mod, src, dst._packing)
    cons = dst._constraints.rows()
    out = T.zeros((dst.dim, src.dim))
    for j in range(src.dim):
        vec = rows[j]
        for row in cons:
            if sum(v * vec[k] for k, v in row.items()) != 0:
                raise ConventionFault(
                    f"delta of basis cochain {j} of C^{n - 1} is not in C^{n}", witness=j
                )
        out[:, j] = vec[dst.free]
    return out


def cocycle_space(alg: HLR3Algebra, mod: LeftModule, n: int) -> SubspaceBasis:
    """Z^n in C^n-basis coordinates: the kernel of delta into degree n + 1.

    delta is evaluated only at packed degree-(n+1) argument tuples, so no
    basis of C^{n+1} is needed (and n + 1 may exceed the degree bound).
    """
    _check_degree(n)
    space = _cochain_space(alg, mod, n)
    out_pk = _Packing(alg.L_dim, mod.dim, n + 1)
    rows = _delta_packed(alg, mod, space, out_pk)
    ech = Echelon(space.dim)
    for col in rows.T:
        r = {j: v for j, v in enumerate(col) if v != 0}
        if r:
            ech.insert(r)
            if ech.rank == space.dim:
                break
    vecs = []
    for sv in ech.kernel_vectors():
        v = [0] * space.dim
        for k, x in sv.items():
            v[k] = x
        vecs.append(tuple(v))
    return SubspaceBasis(space.dim, tuple(vecs))


def coboundary_space(alg: HLR3Algebra, mod: LeftModule, n: int) -> SubspaceBasis:
    """B^n in C^n-basis coordinates (zero for n = 0)."""
    _check_degree(n)
    dim = _cochain_space(alg, mod, n).dim
    if n == 0:
        return SubspaceBasis(dim, ())
    m = delta_matrix(alg, mod, n)
    return SubspaceBasis.from_vectors(dim, [m[:, j] for j in range(m.shape[1])])


def cocycle_basis(alg: HLR3Algebra, mod: LeftModule, n: int) -> list:
    """Z^n as a list of cochains."""
    space = _cochain_space(alg, mod, n)
    return [space.cochain(v) for v in cocycle_space(alg, mod, n).vectors]


@dataclass(frozen=True)
class CohomologyDims:
    """Unpacks as ``(dim Z, dim B, dim H)``; ``dim_C`` is carried along."""

    dim_Z: int
    dim_B: int
    dim_H: int
    dim_C: int

    def __iter__(self):
        return iter((self.dim_Z, self.dim_B, self.dim_H))

    def to_dict(self) -> dict:
        return {"dimC": self.dim_C, "dimZ": self.dim_Z, "dimB": self.dim_B, "dimH": self.dim_H}


def cohomology_dim(alg: HLR3Algebra, mod: LeftModule, n: int) -> CohomologyDims:
    Z = cocycle_space(alg, mod, n)
    B = coboundary_space(alg, mod, n)
    try:
        h = quotient_dim(B, Z)
    except ContainmentError as err:
        raise ConventionFault(f"B^{n} is not contained in Z^{n} (delta o delta != 0)", err.witness) from None
    return CohomologyDims(Z.dim, B.dim, h, _cochain_space(alg, mod, n).dim)


# --- literal cocycle conditions ---------------------------------------------------


def _literal_0(alg, mod, nu: np.ndarray) -> np.ndarray:
    E = T.einsum
    psi, br = mod.psi, alg.bracket
    return T.normalize(
        E("xyok,zk->xyzo", psi, nu)
        + E("xzok,yk->xyzo", psi, nu)
        + E("yzok,xk->xyzo", psi, nu)
        - E("xyzl,lo->xyzo", br, nu)
    )


def _literal_1(alg, mod, w: np.ndarray) -> np.ndarray:
    E = T.einsum
    psi, br, al = mod.psi, alg.bracket, alg.alpha
    aw = E("qy,rz,pqro->pyzo", al, al, w)  # w(p, alpha y, alpha z)
    apsi = E("py,qz,pqok->yzok", al, al, psi)  # psi(alpha y, alpha z)
    t = E("xuvp,pyzo->xyzuvo", br, aw)
    t = t + E("yuvp,pzxo->xyzuvo", br, aw)
    t = t + E("qx,ry,zuvp,qrpo->xyzuvo", al, al, br, w)
    t = t - E("xyzp,puvo->xyzuvo", br, aw)
    t = t + E("yzok,xuvk->xyzuvo", apsi, w)
    t = t + E("zxok,yuvk->xyzuvo", apsi, w)
    t = t + E("xyok,zuvk->xyzuvo", apsi, w)
    t = t - E("uvok,xyzk->xyzuvo", apsi, w)
    return T.normalize(t)


def check_0cocycle_literal(alg: HLR3Algebra, mod: LeftModule, nu: Cochain) -> bool:
    """psi(x,y)nu(z) + psi(x,z)nu(y) + psi(y,z)nu(x) - nu([x,y,z]) = 0 on all basis triples."""
    if nu.degree != 0:
        raise DegreeError("expected a degree 0 cochain")
    return T.is_zero(_literal_0(alg, mod, nu.values))


def check_1cocycle_literal(alg: HLR3Algebra, mod: LeftModule, omega: Cochain) -> bool:
    """The displayed eight-term 1-cocycle identity on all basis quintuples."""
    if omega.degree != 1:
        raise DegreeError("expected a degree 1 cochain")
    return T.is_zero(_literal_1(alg, mod, omega.values))


def literal_cocycle_report(alg: HLR3Algebra, mod: LeftModule, f: Cochain) -> dict:
    """Literal verdict next to the canonical one (delta f = 0)."""
    literal = {0: check_0cocycle_literal, 1: check_1cocycle_literal}.get(f.degree)
    if literal is None:
        raise DegreeError("literal cocycle conditions exist in degrees 0 and 1 only")
    lit = literal(alg, mod, f)
    canon = delta(alg, mod, f).is_zero()
    return {"degree": f.degree, "literal": lit, "canonical": canon, "agree": lit == canon}
