import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hlr3 import _tensor as T
from hlr3.exact_linalg import (
    ContainmentError,
    SubspaceBasis,
    exact,
    format_rational,
    kernel,
    left_inverse,
    parse_rational,
    quotient_dim,
    rank,
    rref,
    solve,
)

rationals = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


def matrices(max_rows=6, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def obj(rows):
    return T.normalize(np.array(rows, dtype=object))


def test_parse_and_format_rationals():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("-4/2") == -2 and isinstance(parse_rational("-4/2"), int)
    assert format_rational(Fraction(-3, 9)) == "-1/3"
    assert format_rational(7) == "7"
    for bad in ("1/0", "", "x", "1.5", "1/2/3"):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_exact_collapses_integral_fractions():
    assert exact(Fraction(4, 2)) == 2 and type(exact(Fraction(4, 2))) is int
    with pytest.raises(TypeError):
        exact(0.5)


def test_rref_small_example():
    r, k = rref(obj([[2, 4], [1, 2]]))
    assert k == 1
    assert r.tolist() == [[1, 2], [0, 0]]


def test_kernel_of_identity_and_zero():
    assert kernel(T.identity(3)).dim == 0
    assert kernel(T.zeros((2, 3))).dim == 3


def test_solve_inconsistent_returns_none():
    assert solve(obj([[1, 1], [1, 1]]), obj([1, 2])) is None
    x = solve(obj([[1, 1], [1, -1]]), obj([3, 1]))
    assert x.tolist() == [2, 1]


def test_left_inverse_and_quotient_dim():
    k = obj([[1, 0], [0, 1], [1, 1]])
    assert (left_inverse(k).dot(k) == T.identity(2)).all()
    a = SubspaceBasis.from_vectors(3, [obj([1, 0, 0])])
    b = SubspaceBasis.from_vectors(3, [obj([1, 0, 0]), obj([0, 1, 0])])
    assert quotient_dim(a, b) == 1
    with pytest.raises(ContainmentError):
        quotient_dim(b, a)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_sympy_and_kernel_annihilates(rows):
    m = obj(rows)
    r = rank(m)
    assert r == sympy.Matrix(rows).rank()
    K = kernel(m)
    assert r + K.dim == m.shape[1]
    for v in K.vectors:
        assert T.is_zero(m.dot(np.asarray(v, dtype=object)))


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rref_idempotent(rows):
    r1, k1 = rref(obj(rows))
    r2, k2 = rref(r1)
    assert k1 == k2 and (r1 == r2).all()


@settings(max_examples=100, deadline=None)
@given(matrices(), st.data())
def test_solve_recovers_consistent_systems(rows, data):
    m = obj(rows)
    x0 = obj(data.draw(st.lists(rationals, min_size=m.shape[1], max_size=m.shape[1])))
    b = T.normalize(m.dot(x0))
    x = solve(m, b)
    assert x is not None and (T.normalize(m.dot(x)) == b).all()


def test_random_integer_matrices_rank_nullity():
    rng = random.Random(9)
    for _ in range(200):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        m = obj([[rng.randint(-2, 2) for _ in range(c)] for _ in range(r)])
        assert rank(m) + kernel(m).dim == c
