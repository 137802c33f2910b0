"""Shared fixtures and hypothesis strategies."""
import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from akgeo.algebra import InvariantAlgebra, InvariantForm
from akgeo.families import kodaira_thurston, nakamura

small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def two_step_nilpotent(draw, dim=None):
    """Brackets of the first ``r`` vectors land in the span of the rest."""
    dim = dim or draw(st.sampled_from([4, 6]))
    r = draw(st.integers(min_value=2, max_value=dim - 1))
    consts = []
    for i, j in itertools.combinations(range(r), 2):
        for k in range(r, dim):
            v = draw(small_ints)
            if v:
                consts.append((i, j, k, v))
    return InvariantAlgebra.from_constants(dim, consts)


@st.composite
def diagonal_semidirect(draw, dim=None):
    """``E_1`` acts diagonally on an abelian ideal spanned by the others."""
    dim = dim or draw(st.sampled_from([4, 6]))
    consts = []
    for k in range(1, dim):
        v = draw(small_ints)
        if v:
            consts.append((0, k, k, v))
    return InvariantAlgebra.from_constants(dim, consts)


jacobi_algebras = st.one_of(two_step_nilpotent(), diagonal_semidirect())


@st.composite
def sparse_forms(draw, dim, degree=None, tag="E"):
    degree = draw(st.integers(0, min(4, dim))) if degree is None else degree
    keys = list(itertools.combinations(range(dim), degree))
    chosen = draw(st.lists(st.sampled_from(keys), min_size=0, max_size=4, unique=True))
    coeffs = draw(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                           min_size=len(chosen), max_size=len(chosen)))
    return InvariantForm.from_terms(dict(zip(chosen, coeffs)), degree, dim, tag)


# strategies for the Nakamura parameter domain, kept well inside the discs
coord = st.floats(min_value=-0.6, max_value=0.6, allow_nan=False)
t_params = st.tuples(coord, coord, coord, coord)


@pytest.fixture(scope="session")
def kt2():
    return kodaira_thurston(2.0)


@pytest.fixture(scope="session")
def nak0():
    return nakamura((0.0, 0.0, 0.0, 0.0))


def flat_torus_doc(dim=4):
    J = np.zeros((dim, dim))
    for k in range(dim // 2):
        J[2 * k + 1, 2 * k], J[2 * k, 2 * k + 1] = 1, -1
    return {"name": "flat torus", "dim": dim, "structure": [], "J": J.tolist(), "metric": np.eye(dim).tolist()}
