"""Golden fixtures F1-F4: builders and the committed JSON files.

F1  abelian, L = Q^3 over A = Q.
F2  L = Q^4 over A = Q with [e1, e2, e3] = e4 (all other independent triples 0).
F3  F2 Yau-twisted by alpha = -id.
F4  semidirect product L x A of F2 (x) Q[t]/(t^2) with anchor rho(e1, e2) = d/dt.
"""

from __future__ import annotations

import itertools
from importlib import resources

import numpy as np

from .. import _tensor as T
from ..algebra import CommAlgebra, HLR3Algebra, verify_all

NAMES = ("F1", "F2", "F3", "F4")


def _perm_sign(p) -> int:
    return int(round(np.linalg.det(np.eye(len(p))[list(p)])))


def build_F1() -> HLR3Algebra:
    return HLR3Algebra.untwisted_over_q(T.zeros((3,) * 4), name="F1")


def build_F2() -> HLR3Algebra:
    b = T.zeros((4,) * 4)
    for p in itertools.permutations(range(3)):
        b[p[0], p[1], p[2], 3] = _perm_sign(p)
    return HLR3Algebra.untwisted_over_q(b, name="F2")


def build_F3() -> HLR3Algebra:
    from ..constructions import yau_twist

    return yau_twist(build_F2(), T.identity(1), T.normalize(-T.identity(4)), name="F3")


def F4_anchor() -> np.ndarray:
    """rho(e1, e2) = -rho(e2, e1) = the derivation t -> t of the dual numbers."""
    rho = T.zeros((4, 4, 2, 2))
    rho[0, 1, 1, 1] = 1
    rho[1, 0, 1, 1] = -1
    return rho


def build_F4() -> HLR3Algebra:
    from ..constructions import semidirect_product, tensor_extension

    ext = tensor_extension(build_F2(), CommAlgebra.dual_numbers(), F4_anchor(), name="F2_dual")
    return semidirect_product(ext, name="F4")


BUILDERS = {"F1": build_F1, "F2": build_F2, "F3": build_F3, "F4": build_F4}


def build(name: str) -> HLR3Algebra:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}") from None


def certificate(alg: HLR3Algebra) -> dict:
    rep = verify_all(alg)
    return {"verify_all": "pass" if rep.passed else "fail", "conditions": len(rep.conditions)}


def path(name: str):
    if name not in BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
    return resources.files(__name__).joinpath(f"{name}.json")


def text(name: str) -> str:
    return path(name).read_text()


def load(name: str) -> HLR3Algebra:
    from ..io import loads

    return loads(text(name)).data
