import random

import numpy as np
import pytest

from hlr3 import _tensor as T
from hlr3.algebra import verify_all
from hlr3.cohomology import (
    Cochain,
    CochainError,
    coboundary_space,
    cochain_space,
    cocycle_basis,
    cohomology_dim,
    delta,
)
from hlr3.extensions import (
    ExtensionError,
    Section,
    automorphism_space,
    build_extension,
    canonical_section,
    find_equivalence,
    nu_morphism,
    section_to_cocycle,
    transport,
)
from hlr3.modules import adjoint_module, base_module


@pytest.fixture(scope="module")
def ad(F2):
    return adjoint_module(F2)


@pytest.fixture(scope="module")
def Z1(F2, ad):
    return cocycle_basis(F2, ad, 1)


def _is_coboundary(F2, ad, w):
    return coboundary_space(F2, ad, 1).contains(cochain_space(F2, ad, 1).coordinates(w))


def test_every_basis_cocycle_gives_a_valid_extension(F2, ad, Z1):
    assert len(Z1) == 13
    for w in Z1:
        ext = build_extension(F2, ad, w)
        assert ext.valid, ext.report


def test_canonical_section_recovers_the_cocycle(F2, ad, Z1):
    tau = canonical_section(F2, ad)
    for w in Z1:
        sc = section_to_cocycle(build_extension(F2, ad, w), tau)
        assert sc.omega == w
        assert np.array_equal(sc.psi, ad.psi)


def test_other_section_shifts_by_a_coboundary(F2, ad, Z1):
    # tau(x) = x + nu(x) changes omega by delta nu
    rng = random.Random(4)
    C0 = cochain_space(F2, ad, 0)
    nu = C0.cochain([rng.randint(-2, 2) for _ in range(C0.dim)])
    tau = canonical_section(F2, ad).tau.copy()
    tau[4:, :] = nu.values.T
    ext = build_extension(F2, ad, Z1[1])
    sc = section_to_cocycle(ext, Section(tau))
    assert sc.omega - Z1[1] == delta(F2, ad, nu)


def test_bad_section_is_rejected(F2, ad, Z1):
    tau = T.zeros((8, 4))
    tau[:4, :] = T.identity(4)
    tau[0, 1] = 1  # proj o tau != id
    with pytest.raises(ExtensionError):
        section_to_cocycle(build_extension(F2, ad, Z1[0]), Section(tau))


def test_equivalence_of_cohomologous_cocycles(F2, ad, Z1):
    rng = random.Random(0)
    C0 = cochain_space(F2, ad, 0)
    for w in Z1:
        nu0 = C0.cochain([rng.randint(-2, 2) for _ in range(C0.dim)])
        extA = build_extension(F2, ad, w)
        extB = build_extension(F2, ad, w + delta(F2, ad, nu0))
        nu = find_equivalence(extA, extB)
        assert nu is not None
        assert delta(F2, ad, nu) == delta(F2, ad, nu0)
        # F_nu carries extB onto extA
        assert transport(extB.total, nu_morphism(extB, nu)) == extA.total


def test_equivalence_exists_exactly_for_coboundary_differences(F2, ad, Z1):
    zero = build_extension(F2, ad, Cochain.zero(1, 4, 4))
    for w in Z1:
        found = find_equivalence(zero, build_extension(F2, ad, w)) is not None
        assert found == _is_coboundary(F2, ad, w)


def test_non_cohomologous_pair(F2, ad, Z1):
    assert cohomology_dim(F2, ad, 1).dim_H == 9
    w = next(z for z in Z1 if not _is_coboundary(F2, ad, z))
    # w and 2w differ by w, which is not a coboundary
    assert find_equivalence(build_extension(F2, ad, w), build_extension(F2, ad, w.scale(2))) is None


def test_automorphisms_match_degree_zero_cocycles(F2, ad, Z1):
    z0 = cohomology_dim(F2, ad, 0).dim_Z
    for w in (Cochain.zero(1, 4, 4), Z1[0]):
        ext = build_extension(F2, ad, w)
        auts = automorphism_space(ext)
        assert auts.dim == z0 == 12
        for v in auts.vectors:
            nu = Cochain(0, np.array(v, dtype=object).reshape(4, 4))
            assert transport(ext.total, nu_morphism(ext, nu)) == ext.total


def test_non_cocycle_gives_an_invalid_extension(F2, ad):
    C1 = cochain_space(F2, ad, 1)
    w = next(c for c in C1.basis if not delta(F2, ad, c).is_zero())
    ext = build_extension(F2, ad, w)
    assert not ext.valid
    assert not verify_all(ext.total).passed


def test_omega_must_be_a_cochain(F2, ad):
    v = T.zeros((4, 4, 4, 4))
    v[0, 1, 2, 0] = 1
    with pytest.raises(CochainError):
        build_extension(F2, ad, Cochain(1, v))


def test_different_fibers_are_refused(F2, ad, Z1):
    a = build_extension(F2, ad, Z1[0])
    b = build_extension(F2, base_module(F2), Cochain.zero(1, 4, 1))
    with pytest.raises(ExtensionError):
        find_equivalence(a, b)
