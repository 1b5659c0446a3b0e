"""Exact rational linear algebra.

Scalars are Python ``int`` or :class:`fractions.Fraction`; a Fraction whose
denominator is 1 is always collapsed to ``int`` so integer-only data stays on
the fast path.  Dense matrices are 2-d numpy arrays of ``dtype=object``.

Elimination is done on sparse rows (``dict`` column -> value) and keeps the
echelon form fully reduced as rows are inserted, so the same engine serves
``rref``, ``kernel``, ``solve`` and the large sparse systems assembled by the
cohomology code.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ContainmentError",
    "Echelon",
    "SubspaceBasis",
    "as_matrix",
    "as_vector",
    "exact",
    "format_rational",
    "kernel",
    "left_inverse",
    "parse_rational",
    "quotient_dim",
    "rank",
    "rref",
    "solve",
    "to_exact_array",
]


class ContainmentError(ValueError):
    """Raised when a subspace is not contained in another one."""

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


def exact(x):
    """Return ``x`` as an exact scalar (``int`` when integral, else ``Fraction``)."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, Rational):
        return exact(Fraction(x.numerator, x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


def parse_rational(text: str):
    """Parse ``"p/q"`` or ``"p"``.  Raises ``ValueError`` on malformed input."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return exact(Fraction(p, q))


def format_rational(x) -> str:
    x = exact(x)
    if isinstance(x, int):
        return str(x)
    return f"{x.numerator}/{x.denominator}"


_exact_vec = np.frompyfunc(exact, 1, 1)


def to_exact_array(data, shape=None) -> np.ndarray:
    """Object array of exact scalars from nested sequences, strings allowed."""
    arr = np.array(data, dtype=object)
    if arr.size:
        arr = _exact_vec(arr).astype(object)
    if shape is not None:
        arr = arr.reshape(shape)
    return arr


def as_matrix(m) -> np.ndarray:
    arr = to_exact_array(m)
    if arr.ndim != 2:
        if arr.size == 0:
            return np.zeros((0, 0), dtype=object)
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    return arr


def as_vector(v) -> np.ndarray:
    arr = to_exact_array(v)
    if arr.ndim != 1:
        raise ValueError(f"expected a vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class SubspaceBasis:
    """Linearly independent vectors spanning a subspace of Q^ambient_dim."""

    ambient_dim: int
    vectors: tuple

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        """Basis vectors as the columns of an ``ambient_dim x dim`` matrix."""
        out = np.zeros((self.ambient_dim, self.dim), dtype=object)
        out[:, :] = 0
        for j, v in enumerate(self.vectors):
            out[:, j] = v
        return out

    def contains(self, v) -> bool:
        v = as_vector(v)
        if not self.dim:
            return not any(x != 0 for x in v)
        return solve(self.matrix(), v) is not None

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors: Iterable) -> "SubspaceBasis":
        """Independent subset spanning the same space (column order kept)."""
        vecs = [as_vector(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError("vector length does not match ambient dimension")
        ech = Echelon(ambient_dim)
        keep = []
        for v in vecs:
            if ech.insert(_sparse(v)):
                keep.append(tuple(v))
        return cls(ambient_dim, tuple(keep))


def _sparse(v) -> dict:
    return {i: exact(x) for i, x in enumerate(v) if x != 0}


class Echelon:
    """Incrementally maintained reduced row echelon form over Q.

    Rows are sparse dicts.  ``pivots`` maps pivot column -> normalized row
    (pivot entry 1, zero in every other pivot column).
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        row = dict(row)
        for c in [c for c in row if c in self.pivots]:
            coef = row.get(c, 0)
            if coef == 0:
                continue
            for k, val in self.pivots[c].items():
                nv = row.get(k, 0) - coef * val
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = exact(nv)
        return row

    def insert(self, row: dict) -> bool:
        """Add a row; return True when it raised the rank."""
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        inv = Fraction(1) / r[p]
        r = {k: exact(v * inv) for k, v in r.items()}
        for c, prow in self.pivots.items():
            coef = prow.get(p, 0)
            if coef == 0:
                continue
            for k, val in r.items():
                nv = prow.get(k, 0) - coef * val
                if nv == 0:
                    prow.pop(k, None)
                else:
                    prow[k] = exact(nv)
        self.pivots[p] = r
        return True

    def rows(self) -> list[dict]:
        return [self.pivots[c] for c in sorted(self.pivots)]

    def kernel_vectors(self) -> list[dict]:
        """Null space of the row space, one sparse vector per free column."""
        free = [c for c in range(self.ncols) if c not in self.pivots]
        out = []
        for f in free:
            vec = {f: 1}
            for p, prow in self.pivots.items():
                val = prow.get(f, 0)
                if val != 0:
                    vec[p] = exact(-val)
            out.append(vec)
        return out


def _echelon_of(m: np.ndarray) -> Echelon:
    ech = Echelon(m.shape[1])
    for row in m:
        if ech.rank == m.shape[1]:
            break
        ech.insert(_sparse(row))
    return ech


def _dense(rows: Sequence[dict], ncols: int) -> np.ndarray:
    out = np.empty((len(rows), ncols), dtype=object)
    out[...] = 0
    for i, r in enumerate(rows):
        for k, v in r.items():
            out[i, k] = v
    return out


def rref(m) -> tuple[np.ndarray, int]:
    """Reduced row echelon form (same shape as ``m``) and rank."""
    m = as_matrix(m)
    ech = _echelon_of(m)
    rows = ech.rows()
    out = _dense(rows, m.shape[1])
    pad = np.empty((m.shape[0] - len(rows), m.shape[1]), dtype=object)
    pad[...] = 0
    return np.vstack([out, pad]) if len(pad) else out, ech.rank


def rank(m) -> int:
    m = as_matrix(m)
    return _echelon_of(m).rank if m.size else 0


def kernel(m) -> SubspaceBasis:
    """Basis of the right null space, ordered by free column."""
    m = as_matrix(m)
    ncols = m.shape[1]
    ech = _echelon_of(m)
    vecs = []
    for sv in ech.kernel_vectors():
        v = [0] * ncols
        for k, x in sv.items():
            v[k] = x
        vecs.append(tuple(v))
    return SubspaceBasis(ncols, tuple(vecs))


def solve(m, b):
    """Particular solution of ``m x = b`` (free variables zero) or ``None``."""
    m = as_matrix(m)
    b = as_vector(b)
    if len(b) != m.shape[0]:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {m.shape[0]} rows")
    ncols = m.shape[1]
    ech = Echelon(ncols + 1)
    for row, rhs in zip(m, b):
        r = _sparse(row)
        if rhs != 0:
            r[ncols] = exact(rhs)
        ech.insert(r)
    if ncols in ech.pivots:
        return None
    x = np.empty(ncols, dtype=object)
    x[:] = 0
    for p, prow in ech.pivots.items():
        x[p] = prow.get(ncols, 0)
    return x


def left_inverse(k) -> np.ndarray:
    """Matrix ``P`` with ``P @ k = I`` for ``k`` of full column rank."""
    k = as_matrix(k)
    n, d = k.shape
    ech = _echelon_of(k.T.copy())
    if ech.rank != d:
        raise ValueError("matrix does not have full column rank")
    rows = sorted(ech.pivots)
    sub = k[rows, :]
    inv = np.empty((d, d), dtype=object)
    for j in range(d):
        e = [0] * d
        e[j] = 1
        inv[:, j] = solve(sub, e)
    out = np.empty((d, n), dtype=object)
    out[...] = 0
    out[:, rows] = inv
    return out


def quotient_dim(sub: SubspaceBasis, inside: SubspaceBasis) -> int:
    """``dim(inside) - dim(sub)`` after checking ``span(sub) <= span(inside)``."""
    if sub.ambient_dim != inside.ambient_dim:
        raise ValueError("ambient dimensions differ")
    ech = Echelon(inside.ambient_dim)
    for v in inside.vectors:
        ech.insert(_sparse(v))
    for v in sub.vectors:
        if ech.reduce(_sparse(v)):
            raise ContainmentError("subspace is not contained in the target space", tuple(v))
    return inside.dim - sub.dim
