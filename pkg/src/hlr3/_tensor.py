"""Small helpers for exact dense tensors stored as numpy object arrays."""

from __future__ import annotations

import numpy as np

from .exact_linalg import exact, to_exact_array

_INT64_BUDGET = 2**62
_FLOAT_BUDGET = 2**52


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out[...] = 0
    return out


def identity(n: int) -> np.ndarray:
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = 1
    return out


def einsum(subscripts, *operands):
    return np.einsum(subscripts, *operands, optimize=True)


def matpow(m: np.ndarray, k: int) -> np.ndarray:
    out = identity(m.shape[0]).astype(m.dtype)
    for _ in range(k):
        out = out.dot(m)
    return out


def is_zero(t: np.ndarray) -> bool:
    return not np.any(t != 0)


def normalize(t: np.ndarray) -> np.ndarray:
    """Object array with every entry collapsed through :func:`exact`."""
    if t.dtype != object:
        return t.astype(object)
    if t.size == 0:
        return t
    return np.frompyfunc(exact, 1, 1)(t).astype(object)


def int_backend(arrays, degree: int = 5, dtype=np.int64, dim: int | None = None):
    """Machine-integer copies of ``arrays`` when every entry is a small integer.

    ``degree`` bounds the polynomial degree of the expressions that will be
    evaluated; the check guarantees no overflow for such expressions.  With
    ``dtype=np.float64`` the bound is 2**52, so every intermediate is an
    exactly representable integer and BLAS can be used.  Returns ``None``
    when the object path must be used.  ``dim`` overrides the contraction
    length, which is otherwise taken as the largest axis.
    """
    bound = 1
    inferred = 1
    for a in arrays:
        if a.size == 0:
            continue
        inferred = max(inferred, *a.shape)
        for x in a.flat:
            if not isinstance(x, (int, np.integer)):
                return None
            if abs(x) > bound:
                bound = abs(int(x))
    dim = inferred if dim is None else dim
    budget = _FLOAT_BUDGET if dtype == np.float64 else _INT64_BUDGET
    if 16 * (bound * dim) ** degree * dim >= budget:
        return None
    return [np.asarray(a, dtype=dtype) if a.size else a.astype(dtype) for a in arrays]


def from_machine(t: np.ndarray) -> np.ndarray:
    """Object array of Python ints from an int64 or integral float64 array."""
    if t.dtype == np.float64:
        t = np.rint(t).astype(np.int64)
    return t.astype(object)


def first_mismatch(lhs: np.ndarray, rhs: np.ndarray):
    """Lexicographically first index where ``lhs != rhs``, or ``None``."""
    diff = np.asarray(lhs != rhs)
    if not diff.any():
        return None
    return tuple(int(i) for i in np.argwhere(diff)[0])


def as_object(t: np.ndarray) -> np.ndarray:
    if t.dtype == object:
        return t
    return to_exact_array(t.tolist()) if t.ndim else to_exact_array(t.item())
