import importlib
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from akgeo.errors import DomainError, InvariantViolation, OracleDisagreement
from akgeo.families import DEFAULT_ZETA, NakamuraDeformation, nakamura
from akgeo.plurigenus import (
    EllipticOperatorSymbol,
    ModeGrid,
    analytic_modes,
    brute_force_modes,
    dbar_canonical_coefficient,
    discriminant,
    discriminant_from_coefficients,
    ellipticity_check,
    expected_dbar_canonical,
    first_order_mode_solutions,
    kodaira_dimension,
    mode_equation,
    plurigenus,
    resonant_powers,
)

from conftest import t_params

GRID = list(itertools.product((-0.3, 0.0, 0.3), repeat=4))
ZETA = DEFAULT_ZETA
DELTA_01 = 0.2 / (0.01 - 1)


# -- mode equation ------------------------------------------------------------------

def test_mode_equation_at_origin():
    eq = mode_equation((0, 0, 0, 0), 1)
    # the leading coefficient carries beta itself, which is -1 here
    assert (eq.quad_s, eq.cross, eq.quad_x, eq.rhs) == pytest.approx((-1 / ZETA**2, 0, -1, 0))


def test_mode_equation_rhs_on_t4_axis():
    eq1 = mode_equation((0, 0, 0, 0.1), 1)
    assert eq1.rhs == pytest.approx(DELTA_01**2 / math.pi**2)
    eq2 = mode_equation((0, 0, 0, 0.1), 2)
    assert eq2.rhs == pytest.approx(4 * eq1.rhs)


def test_mode_equation_rejects_bad_input():
    with pytest.raises(ValueError):
        mode_equation((0, 0, 0, 0), 0)
    with pytest.raises(DomainError):
        mode_equation((0, 0, 1, 0), 1)


def test_mode_residual_is_the_relation():
    eq = mode_equation((0.1, 0.2, 0.0, 0.3), 2)
    n, mp = 3, -5
    lhs = eq.beta / ZETA**2 * mp**2 - 2 * eq.alpha / ZETA * n * mp - eq.gamma * n**2
    rhs = -eq.beta * (2 * eq.delta) ** 2 / math.pi**2
    assert eq.residual(n, mp) == pytest.approx(lhs - rhs)


# -- discriminant --------------------------------------------------------------------

def test_discriminant_examples():
    eq0 = mode_equation((0, 0, 0, 0), 1)
    assert discriminant(eq0, 0) == 0
    assert discriminant(eq0, 1) == pytest.approx(-4 / ZETA**2)
    eq = mode_equation((0, 0, 0, 0.1), 1)
    assert discriminant(eq, 0) == pytest.approx(-(4 / ZETA**2) * DELTA_01**2 / math.pi**2)
    assert discriminant(eq, 0) < 0


@pytest.mark.parametrize("t", GRID[::4])
def test_discriminant_sign_over_grid(t):
    ns = np.arange(-1000, 1001)
    for m in (1, 3):
        eq = mode_equation(t, m)
        closed = np.array([discriminant(eq, int(n)) for n in ns])
        raw = np.array([discriminant_from_coefficients(eq, int(n)) for n in ns])
        assert np.allclose(closed, raw, rtol=1e-10, atol=1e-12)
        assert np.all(closed <= 0)
        zero = closed == 0
        if t[3] == 0:
            assert zero.sum() == 1 and zero[1000]
        else:
            assert not zero.any()


@settings(max_examples=50, deadline=None)
@given(t_params, st.integers(1, 10), st.integers(-1000, 1000))
def test_discriminant_identity_random(t, m, n):
    eq = mode_equation(t, m)
    a, b = discriminant(eq, n), discriminant_from_coefficients(eq, n)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


# -- mode search ---------------------------------------------------------------------

def test_brute_force_examples():
    assert brute_force_modes(mode_equation((0.1, 0.1, 0.2, 0.0), 1), 1000) == [(0, 0)]
    assert brute_force_modes(mode_equation((0, 0, 0, 0.1), 1), 1000) == []
    assert brute_force_modes(mode_equation((0, 0, 0, 0), 1), 10) == [(0, 0)]


def test_brute_force_is_a_plain_search():
    eq = mode_equation((0.3, -0.3, 0.0, 0.3), 2)
    N = 40
    a, b, c = abs(eq.quad_s), abs(eq.cross), abs(eq.quad_x)
    found = [(n, mp) for n in range(-N, N + 1) for mp in range(-N, N + 1)
             if abs(eq.residual(n, mp)) <= 1e-9 * (a * mp * mp + b * abs(n * mp) + c * n * n + abs(eq.rhs))]
    assert brute_force_modes(eq, N) == found


def test_mode_grid_guards():
    eq1 = mode_equation((0, 0, 0, 0.1), 1)
    grid = ModeGrid(eq1, 50)
    with pytest.raises(ValueError):
        grid.solutions(mode_equation((0, 0, 0, 0.1), 3))
    with pytest.raises(ValueError):
        grid.solutions(mode_equation((0.1, 0, 0, 0.1), 1))
    with pytest.raises(ValueError):
        ModeGrid(eq1, 0)


@pytest.mark.parametrize("t", GRID[::5])
def test_oracle_agrees_with_analytic(t):
    for m in (1, 2, 5):
        eq = mode_equation(t, m)
        assert brute_force_modes(eq, 300) == analytic_modes(eq)


def test_oracle_disagreement_is_raised(monkeypatch):
    pg = importlib.import_module("akgeo.plurigenus")
    monkeypatch.setattr(pg, "analytic_modes", lambda eq: [(1, 1)])
    with pytest.raises(OracleDisagreement):
        plurigenus((0, 0, 0, 0), 1, bound=20)


# -- plurigenera and Kodaira dimension ----------------------------------------------------

@pytest.mark.parametrize(
    "t, expected",
    [((0.1, 0.1, 0.2, 0.0), 1), ((0.0, 0.0, 0.0, 0.1), 0), ((0.0, 0.0, 0.0, 0.0), 1)],
)
def test_plurigenus_examples(t, expected):
    for m in (1, 2, 7):
        assert plurigenus(t, m, bound=200) == expected


def test_kodaira_dimension_examples():
    assert kodaira_dimension((0.1, 0.1, 0.1, 0.0), 10).kappa == 0
    assert kodaira_dimension((0.1, 0.1, 0.1, 0.05), 10).kappa == -math.inf
    res = kodaira_dimension((0, 0, 0, 0), 10)
    assert res.kappa == 0 and set(res.per_m.values()) == {1}
    assert res.evidence["mode_bound"] == 1000
    assert all(ev["modes"] == [(0, 0)] for ev in res.evidence["powers"].values())


def test_kodaira_dimension_needs_a_power():
    with pytest.raises(ValueError):
        kodaira_dimension((0, 0, 0, 0), 0)


@settings(max_examples=10, deadline=None)
@given(t_params)
def test_phase_follows_t4(t):
    res = kodaira_dimension(t, 4, bound=200)
    assert len(set(res.per_m.values())) == 1
    on_axis = abs(NakamuraDeformation(t).delta) <= 1e-12
    assert res.kappa == (0.0 if on_axis else -math.inf)


@pytest.mark.parametrize("t4", [1e-9, 1e-6, 1e-4])
def test_tiny_t4_counts_as_off_axis(t4):
    # the right-hand side is ~ t4^2, far below 1e-9 times the quadratic coefficients,
    # yet (0, 0) must still be rejected by the search
    assert plurigenus((0, 0, 0, t4), 1, bound=1000) == 0


def test_t4_below_threshold_counts_as_on_axis():
    assert plurigenus((0, 0, 0, 1e-14), 1, bound=50) == 1


# -- resonance diagnostic --------------------------------------------------------------------

def test_resonance_produces_first_order_solution():
    # choose t4 so that delta * zeta / (2 pi) = -1: exp(i delta s) is periodic and solves the first-order equation
    target = -2 * math.pi / ZETA
    # delta = 2 t4 / (t4^2 - 1) = target  =>  target t4^2 - 2 t4 - target = 0
    t4 = (2 - math.sqrt(4 + 4 * target * target)) / (2 * target)
    t = (0.0, 0.0, 0.0, t4)
    d = NakamuraDeformation(t)
    assert d.delta == pytest.approx(target)
    assert resonant_powers(t, 3) == [1, 2, 3]
    assert first_order_mode_solutions(t, 1, bound=10) == [(0, -1)]
    # the quadratic relation still reports no modes, so P_1 stays 0
    assert plurigenus(t, 1, bound=100) == 0


def test_no_resonance_on_grid():
    for t in GRID:
        assert resonant_powers(t, 10) == []


# -- dbar of the canonical bundle -------------------------------------------------------------

@pytest.mark.parametrize("t", [(0, 0, 0, 0), (0, 0, 0, 0.1), (0.2, -0.1, 0.3, 0.25)])
def test_dbar_canonical_closed_form(t):
    spec = nakamura(t)
    eta = dbar_canonical_coefficient(spec, 1)
    assert (eta - expected_dbar_canonical(t, 1)).norm() < 1e-10
    assert (dbar_canonical_coefficient(spec, 3) - 3 * eta).norm() < 1e-12


def test_dbar_canonical_vanishes_on_axis():
    assert dbar_canonical_coefficient(nakamura((0.3, 0.1, -0.2, 0.0)), 4).is_zero(1e-12)


def test_dbar_canonical_needs_a_nakamura_spec():
    from akgeo.families import kodaira_thurston

    with pytest.raises(ValueError):
        dbar_canonical_coefficient(kodaira_thurston(1.0), 1)
    with pytest.raises(ValueError):
        dbar_canonical_coefficient(nakamura((0, 0, 0, 0)), 0)


# -- ellipticity -------------------------------------------------------------------------------------

def test_symbol_at_origin_is_diagonal():
    sym = EllipticOperatorSymbol(0.0, -1.0, (0.0,))
    s = 0.4
    assert np.allclose(sym.closed_form(s), np.diag([math.exp(-2 * s), math.exp(2 * s), math.exp(-2 * s), math.exp(2 * s)]))


def test_block_determinant():
    d = NakamuraDeformation((0, 0, 0.1, 0.1))
    sym = EllipticOperatorSymbol(d.delta, d.lam, ())
    for s in np.linspace(0, ZETA, 5):
        assert sym.block_determinant(s) == pytest.approx(1 / d.lam**2)


@pytest.mark.parametrize("t", GRID[::6] + [(0, 0, 0.1, 0.1)])
def test_ellipticity(t):
    verdict = ellipticity_check(t, 16)
    assert verdict.elliptic and verdict.min_eigenvalue > 1e-10
    assert verdict.path_gap < 1e-12 and verdict.samples == 16


def test_ellipticity_rejects_bad_input():
    with pytest.raises(ValueError):
        ellipticity_check((0, 0, 0, 0), 1)
    with pytest.raises(DomainError):
        ellipticity_check((0, 0, 0.8, 0.8), 16)
