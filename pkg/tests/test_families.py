import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from akgeo.algebra import InvariantForm, exterior_derivative, wedge
from akgeo.errors import DomainError, InvariantViolation
from akgeo.families import (
    DEFAULT_ZETA,
    ExpectedResults,
    NakamuraDeformation,
    deformation_coefficients,
    deformation_of,
    expected_dbar_phi2,
    expected_kodaira,
    expected_nakamura,
    in_domain,
    kodaira_surface_dimension,
    kodaira_thurston,
    kodaira_thurston_coordinate,
    nakamura,
)
from akgeo.hermitian import dbar, form_type_parts
from akgeo.report import PipelineOptions, run_pipeline

from conftest import t_params

GRID = [t for t in itertools.product((-0.3, 0.0, 0.3), repeat=4)]


def test_default_zeta():
    assert DEFAULT_ZETA == pytest.approx(math.log((3 + math.sqrt(5)) / 2))
    # the hyperbolic matrix [[2, 1], [1, 1]] has eigenvalue exp(zeta)
    assert math.exp(DEFAULT_ZETA) == pytest.approx(max(np.linalg.eigvalsh([[2, 1], [1, 1]])))


# -- Kodaira-Thurston ----------------------------------------------------------------

def test_kodaira_spec_shape():
    spec = kodaira_thurston(1.0)
    assert spec.algebra.structure == {(1, 2, 3): 1.0}
    E = np.eye(4)
    assert np.allclose(spec.J.matrix @ E[0], E[1]) and np.allclose(spec.J.matrix @ E[2], E[3])
    assert exterior_derivative(spec.metric.omega, spec.algebra).is_zero()


def test_kodaira_dE4_scales_with_a():
    spec = kodaira_thurston(4.0)
    d4 = exterior_derivative(InvariantForm.basis(3, dim=4), spec.algebra)
    assert d4.allclose(-4.0 * InvariantForm.basis(1, 2, dim=4))


@pytest.mark.parametrize("a", [0, -1, float("nan"), float("inf")])
def test_kodaira_rejects_bad_a(a):
    with pytest.raises(DomainError):
        kodaira_thurston(a)


def test_coordinate_presentation_lands_on_orthonormal_one():
    a = 4.0
    coord = kodaira_thurston_coordinate(a)
    moved = coord.in_frame(coord.adapted_frame)
    ortho = kodaira_thurston(a)
    assert np.allclose(moved.algebra.tensor, ortho.algebra.tensor)
    assert np.allclose(moved.J.matrix, ortho.J.matrix)
    assert np.allclose(moved.metric.g, np.eye(4))


def test_expected_kodaira_values():
    ex = expected_kodaira(2.0)
    assert ex.scal_real == pytest.approx(-0.5)
    assert np.allclose(ex.ricci_real, np.diag([0, 0, -1.5, 1.0]))
    assert np.allclose(ex.ricci_complex, 0)
    assert ex.frame_tag == "E"
    assert set(ex.items()) >= {"nijenhuis", "theta", "psi", "psi11", "curvature_real", "connection_real"}


def test_expected_tables_must_be_finite():
    with pytest.raises(InvariantViolation):
        ExpectedResults("E", {}, scal_real=float("nan"))


def test_kodaira_surface_dimension_lookup():
    assert kodaira_surface_dimension("rational_multiple_of_pi") == 0
    assert kodaira_surface_dimension("irrational_multiple_of_pi") == -math.inf
    with pytest.raises(ValueError):
        kodaira_surface_dimension("unknown")


# -- deformation coefficients ----------------------------------------------------------

def test_coefficients_at_origin():
    assert deformation_coefficients((0, 0, 0, 0)) == pytest.approx((0, -1, 1, 0, -1, 1))


def test_delta_on_t4_axis():
    delta = deformation_coefficients((0, 0, 0, 0.1))[3]
    assert delta == pytest.approx(0.2 / (0.01 - 1))
    assert delta == pytest.approx(-0.2020202020202)


def test_domain_boundary():
    with pytest.raises(DomainError):
        deformation_coefficients((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        deformation_coefficients((0.0, 0.0, 0.6, 0.8))
    with pytest.raises(DomainError):
        deformation_coefficients((0.0, 0.0, 0.0))
    assert not in_domain((0.0, 0.0, 0.0, float("nan")))
    assert in_domain((0.7, 0.7, -0.7, 0.7))


@settings(max_examples=60, deadline=None)
@given(t_params)
def test_coefficient_identities(t):
    al, be, ga, de, la, mu = deformation_coefficients(t)
    assert abs(-al * al - be * ga - 1) < 1e-12
    assert abs(-de * de - la * mu - 1) < 1e-12
    assert be < 0 < ga and la < 0 < mu


# -- Nakamura spec ----------------------------------------------------------------------------

def test_base_nakamura_structure():
    d = NakamuraDeformation((0, 0, 0, 0))
    J0 = d.J_closed_form()
    std = np.zeros((6, 6))
    std[0, 1], std[1, 0] = -1, 1
    std[2, 3], std[3, 2] = -1, 1
    std[4, 5], std[5, 4] = -1, 1
    assert np.allclose(J0, std)
    assert np.allclose(d.J_conjugated(), std)


@pytest.mark.parametrize("t", GRID[::7] + [(0.1, 0.2, 0.0, 0.0)])
def test_dual_path_complex_structure(t):
    d = NakamuraDeformation(t)
    assert np.abs(d.J_conjugated() - d.J_closed_form()).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(t_params)
def test_omega_compatibility(t):
    spec = nakamura(t)
    Jm = spec.J.matrix
    w = spec.metric.omega.to_matrix()
    assert np.allclose(Jm.T @ w @ Jm, w, atol=1e-12)
    assert np.allclose(Jm @ Jm, -np.eye(6), atol=1e-12)
    assert exterior_derivative(spec.metric.omega, spec.algebra).is_zero()


def test_nakamura_domain_violation():
    with pytest.raises(DomainError):
        nakamura((0.9, 0.9, 0, 0))


def test_deformation_of_round_trip():
    spec = nakamura((0.1, -0.2, 0.05, 0.3), zeta=1.3)
    d = deformation_of(spec)
    assert d.t == (0.1, -0.2, 0.05, 0.3) and d.zeta == 1.3
    with pytest.raises(ValueError):
        deformation_of(kodaira_thurston(1.0))


def test_expected_nakamura_theta_at_t4_point():
    t = (0.0, 0.0, 0.0, 0.2)
    ex = expected_nakamura(t)
    de = 0.4 / (0.04 - 1)
    # theta^3_3 = (sqrt2 / 2) delta (alpha + i) Phi^1 + c.c. part; Phi^1 = (E'^1 + i E'^2)/sqrt2
    coeff_phi1 = ex.theta[2, 2] @ np.array([1, -1j, 0, 0, 0, 0]) / math.sqrt(2)
    assert coeff_phi1 == pytest.approx(math.sqrt(2) / 2 * de * 1j)


def test_expected_nakamura_at_origin():
    ex = expected_nakamura((0, 0, 0, 0))
    # theta^1_2 = -(sqrt2/2) Phi^2
    phi2 = np.array([0, 0, 1, 1j, 0, 0]) / math.sqrt(2)
    assert np.allclose(ex.theta[0, 1], -math.sqrt(2) / 2 * phi2)
    assert np.allclose(ex.ricci_complex, 0)


@settings(max_examples=15, deadline=None)
@given(t_params)
def test_pipeline_matches_nakamura_tables(t):
    rep = run_pipeline(nakamura(t), PipelineOptions(plurigenus=False))
    ex = expected_nakamura(t)
    assert np.abs(rep.theta - ex.theta).max() < 1e-9
    assert np.abs(rep.real_torsion - ex.real_torsion).max() < 1e-9
    assert np.abs(rep.complex_torsion - ex.complex_torsion).max() < 1e-9
    assert np.abs(rep.psi - ex.psi)[ex.psi_mask].max() < 1e-9
    assert np.abs(rep.ricci_complex).max() < 1e-9


def test_psi13_has_no_phi1_phi2bar_term():
    # the tabulated Psi^1_3 carries a Phi^1 ^ conj(Phi^2) term; the recomputed form
    # has Phi^1 ^ conj(Phi^3) instead, which is what the index pattern suggests
    t = (0.1, 0.2, 0.1, 0.2)
    rep = run_pipeline(nakamura(t), PipelineOptions(plurigenus=False))
    s = 1 / math.sqrt(2)
    z = [s * np.array(v) for v in ([1, -1j, 0, 0, 0, 0], [0, 0, 1, -1j, 0, 0], [0, 0, 0, 0, 1, -1j])]
    psi13 = rep.psi[0, 2]
    assert abs(z[0] @ psi13 @ z[1].conj()) < 1e-12
    assert abs(z[0] @ psi13 @ z[2].conj()) > 0.1


# -- dbar of the deformed coframe -------------------------------------------------------------------

@pytest.mark.parametrize("t", [(0.0, 0.0, 0.0, 0.0), (0.1, 0.2, -0.1, 0.3), (-0.3, 0.3, 0.3, -0.3)])
def test_dbar_phi2(t):
    d = NakamuraDeformation(t)
    spec = nakamura(t)
    phi = d.deformed_coframe()
    got = dbar(phi[1], spec.algebra, spec.J)
    assert (got - expected_dbar_phi2(d)).norm() < 1e-10


def test_deformed_coframe_is_type_10():
    t = (0.2, -0.1, 0.3, 0.1)
    spec = nakamura(t)
    for f in NakamuraDeformation(t).deformed_coframe():
        assert form_type_parts(f, spec.J)[(0, 1)].is_zero(1e-12)


def test_dbar_phi1_and_phi3():
    t = (0.1, 0.0, 0.2, 0.3)
    d = NakamuraDeformation(t)
    spec = nakamura(t)
    phi = d.deformed_coframe()
    assert dbar(phi[0], spec.algebra, spec.J).is_zero(1e-12)
    want = 0.5 * ((1 - 1j * d.delta) * wedge(phi[0], phi[2].conj()) - 1j * d.delta * wedge(phi[0].conj(), phi[2]))
    assert (dbar(phi[2], spec.algebra, spec.J) - want).norm() < 1e-10
