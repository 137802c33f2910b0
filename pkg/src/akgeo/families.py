"""Constructors and closed-form expectations for two model families.

* ``kodaira_thurston(a)``: the Kodaira-Thurston nilmanifold with the
  non-integrable structure ``J_a``, presented in its orthonormal frame where
  the only bracket is ``[E2, E3] = a E4``.
* ``nakamura(t)``: a completely solvable Nakamura solvmanifold with the
  four-parameter almost Kähler deformation ``J_t``.

Expected tables are closed-form expressions evaluated at the requested
parameters; nothing is tabulated per sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from akgeo.algebra import FrameChange, InvariantAlgebra, InvariantForm, wedge
from akgeo.errors import DomainError, InvariantViolation
from akgeo.hermitian import (
    AlmostComplexStructure,
    AlmostHermitianSpec,
    MetricData,
    standard_complex_structure,
)

DEFAULT_ZETA = math.log((3 + math.sqrt(5)) / 2)
DOMAIN_MARGIN = 1e-9
IDENTITY_TOL = 1e-12
SQRT2 = math.sqrt(2.0)


def _antisym(dim: int, entries: Mapping[tuple[int, int], complex]) -> np.ndarray:
    """Dense antisymmetric matrix from 1-based ``(i, j): value`` pairs."""
    m = np.zeros((dim, dim), dtype=complex)
    for (i, j), v in entries.items():
        m[i - 1, j - 1] += v
        m[j - 1, i - 1] -= v
    return m


def _wedge_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Component matrix of ``p ^ q`` for covectors p, q."""
    return np.outer(p, q) - np.outer(q, p)


# -- Kodaira-Thurston ---------------------------------------------------------

def _check_a(a: float) -> float:
    a = float(a)
    if not math.isfinite(a) or a <= 0:
        raise DomainError(f"g_a is a Riemannian metric only for a > 0, got a = {a}")
    return a


def kodaira_thurston(a: float) -> AlmostHermitianSpec:
    """Orthonormal-frame presentation of ``X_a``: ``[E2, E3] = a E4`` and standard J."""
    a = _check_a(a)
    alg = InvariantAlgebra.from_constants(4, {(1, 2, 3): a})
    J = AlmostComplexStructure(standard_complex_structure(4))
    metric = MetricData.from_metric(np.eye(4), J)
    return AlmostHermitianSpec(
        alg, J, metric, name=f"kodaira_thurston(a={a:g})", family="kodaira_thurston",
        params={"a": a}, adapted_frame=FrameChange.identity(4, "E"),
    )


def kodaira_thurston_coordinate(a: float) -> AlmostHermitianSpec:
    """``X_a`` in the coordinate frame ``e``: ``[e2, e3] = e4``,
    ``J_a e3 = e4 / a``, ``omega = e12 + e34`` and ``g = omega(., J .)``.

    The attached adapted frame rescales ``e3`` by ``sqrt(a)`` and ``e4`` by
    ``1/sqrt(a)``, which lands on :func:`kodaira_thurston`.
    """
    a = _check_a(a)
    alg = InvariantAlgebra.from_constants(4, {(1, 2, 3): 1}, frame_tag="e")
    Jm = np.zeros((4, 4))
    Jm[1, 0], Jm[0, 1] = 1.0, -1.0
    Jm[3, 2], Jm[2, 3] = 1.0 / a, -a
    J = AlmostComplexStructure(Jm, "e")
    omega = InvariantForm.from_terms({(0, 1): 1.0, (2, 3): 1.0}, 2, 4, "e")
    metric = MetricData.from_symplectic(omega, J)
    fc = FrameChange(np.diag([1.0, 1.0, math.sqrt(a), 1.0 / math.sqrt(a)]), "e", "E")
    return AlmostHermitianSpec(
        alg, J, metric, name=f"kodaira_thurston_coordinate(a={a:g})", family="kodaira_thurston",
        params={"a": a}, adapted_frame=fc,
    )


def kodaira_surface_dimension(a_class: str) -> float:
    """Kodaira dimension of ``(M, J_a)`` from the arithmetic class of ``a``.

    Whether a float is a rational multiple of pi cannot be decided, so the
    caller passes ``"rational_multiple_of_pi"`` or ``"irrational_multiple_of_pi"``.
    """
    table = {"rational_multiple_of_pi": 0.0, "irrational_multiple_of_pi": -math.inf}
    try:
        return table[a_class]
    except KeyError:
        raise ValueError(f"a_class must be one of {sorted(table)}, got {a_class!r}") from None


# -- Nakamura deformation ------------------------------------------------------

def deformation_coefficients(t: Sequence[float]) -> tuple[float, float, float, float, float, float]:
    """``(alpha, beta, gamma, delta, lambda, mu)`` for the parameter ``t``.

    Raises:
        DomainError: if ``t1^2 + t2^2`` or ``t3^2 + t4^2`` is not below
            ``1 - 1e-9``.
    """
    t1, t2, t3, t4 = _check_t(t)
    d12 = t1 * t1 + t2 * t2 - 1.0
    d34 = t3 * t3 + t4 * t4 - 1.0
    alpha = 2 * t2 / d12
    beta = ((1 - t1) ** 2 + t2 * t2) / d12
    gamma = -((1 + t1) ** 2 + t2 * t2) / d12
    delta = 2 * t4 / d34
    lam = ((1 - t3) ** 2 + t4 * t4) / d34
    mu = -((1 + t3) ** 2 + t4 * t4) / d34
    r1 = abs(-alpha * alpha - beta * gamma - 1.0)
    r2 = abs(-delta * delta - lam * mu - 1.0)
    if max(r1, r2) >= IDENTITY_TOL:
        raise InvariantViolation(f"coefficient identities fail (residuals {r1:.2e}, {r2:.2e})", max(r1, r2))
    return alpha, beta, gamma, delta, lam, mu


def _check_t(t: Sequence[float]) -> tuple[float, float, float, float]:
    vals = tuple(float(x) for x in t)
    if len(vals) != 4:
        raise DomainError(f"t must have four components, got {len(vals)}")
    if not all(math.isfinite(x) for x in vals):
        raise DomainError(f"t must be finite, got {vals}")
    t1, t2, t3, t4 = vals
    if t1 * t1 + t2 * t2 >= 1 - DOMAIN_MARGIN or t3 * t3 + t4 * t4 >= 1 - DOMAIN_MARGIN:
        raise DomainError(f"t = {vals} outside the domain t1^2+t2^2 < 1, t3^2+t4^2 < 1")
    return vals


def in_domain(t: Sequence[float]) -> bool:
    try:
        _check_t(t)
    except DomainError:
        return False
    return True


@dataclass(frozen=True)
class NakamuraDeformation:
    """A parameter point ``t`` with its derived coefficients."""

    t: tuple[float, float, float, float]
    zeta: float = DEFAULT_ZETA
    alpha: float = field(init=False)
    beta: float = field(init=False)
    gamma: float = field(init=False)
    delta: float = field(init=False)
    lam: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        t = _check_t(self.t)
        if not (math.isfinite(self.zeta) and self.zeta > 0):
            raise DomainError(f"zeta must be positive, got {self.zeta}")
        object.__setattr__(self, "t", t)
        for name, v in zip(("alpha", "beta", "gamma", "delta", "lam", "mu"), deformation_coefficients(t)):
            object.__setattr__(self, name, v)
        if self.beta >= 0:
            raise InvariantViolation(f"beta must be negative on the domain, got {self.beta}")

    @property
    def coefficients(self) -> tuple[float, float, float, float, float, float]:
        return self.alpha, self.beta, self.gamma, self.delta, self.lam, self.mu

    @property
    def on_t4_axis(self) -> bool:
        return self.t[3] == 0.0

    def L(self) -> np.ndarray:
        """The endomorphism ``L_t`` (columns are images of ``E_j``)."""
        t1, t2, t3, t4 = self.t
        L = np.zeros((6, 6))
        L[:2, 0] = (-t1, -t2)
        L[:2, 1] = (-t2, t1)
        L[2, 2] = L[3, 3] = 1.0
        L[4:, 4] = (-t3, -t4)
        L[4:, 5] = (-t4, t3)
        return L

    def J_conjugated(self) -> np.ndarray:
        """``(I + L_t) J (I + L_t)^{-1}``."""
        IL = np.eye(6) + self.L()
        if abs(np.linalg.det(IL)) < 1e-12:
            raise InvariantViolation("I + L_t is singular")
        return IL @ standard_complex_structure(6) @ np.linalg.inv(IL)

    def J_closed_form(self) -> np.ndarray:
        a, b, g, d, l, m = self.coefficients
        J = np.zeros((6, 6))
        J[0, :2] = (a, b)
        J[1, :2] = (g, -a)
        J[2, 3], J[3, 2] = -1.0, 1.0
        J[4, 4:] = (d, l)
        J[5, 4:] = (m, -d)
        return J

    def adapted_frame_matrix(self) -> np.ndarray:
        """Columns are the g_t-orthonormal vectors ``E'_1..E'_6`` over ``E``."""
        a, _, g, d, _, m = self.coefficients
        sg, sm = math.sqrt(g), math.sqrt(m)
        M = np.zeros((6, 6))
        M[0, 0] = 1 / sg
        M[0, 1], M[1, 1] = a / sg, sg
        M[2, 2] = M[3, 3] = 1.0
        M[4, 4] = 1 / sm
        M[4, 5], M[5, 5] = d / sm, sm
        return M

    def deformed_coframe(self) -> tuple[InvariantForm, InvariantForm, InvariantForm]:
        """The (1,0)-coframe ``Phi_t^1, Phi_t^2, Phi_t^3`` over ``E``."""
        a, b, _, d, l, _ = self.coefficients
        rows = np.zeros((3, 6), dtype=complex)
        rows[0, :2] = (1 - 1j * a, -1j * b)
        rows[1, 2:4] = (1, 1j)
        rows[2, 4:] = (1 - 1j * d, -1j * l)
        return tuple(InvariantForm.from_covector(r, "E") for r in rows)


NAKAMURA_CONSTANTS = {(0, 2, 2): -1, (0, 3, 3): 1, (0, 4, 4): -1, (0, 5, 5): 1}


def nakamura_algebra() -> InvariantAlgebra:
    """``dE^3 = E^13, dE^4 = -E^14, dE^5 = E^15, dE^6 = -E^16``."""
    return InvariantAlgebra.from_constants(6, NAKAMURA_CONSTANTS)


def nakamura_symplectic_form() -> InvariantForm:
    return InvariantForm.from_terms({(0, 1): 1.0, (2, 3): 1.0, (4, 5): 1.0}, 2, 6, "E")


def nakamura(t: Sequence[float] = (0.0, 0.0, 0.0, 0.0), zeta: float = DEFAULT_ZETA) -> AlmostHermitianSpec:
    """The almost Kähler structure ``(g_t, J_t, omega)`` on the Nakamura manifold.

    ``J_t`` is built by conjugation with ``I + L_t`` and compared against the
    closed-form matrix; the two must agree to 1e-12.  The attached adapted
    frame (target tag ``"E'"``) is orthonormal for ``g_t`` with ``J_t`` in
    standard form.
    """
    defo = t if isinstance(t, NakamuraDeformation) else NakamuraDeformation(tuple(t), zeta)
    Jc, Jf = defo.J_conjugated(), defo.J_closed_form()
    gap = float(np.abs(Jc - Jf).max())
    if gap >= IDENTITY_TOL:
        raise InvariantViolation(f"J_t constructions disagree by {gap:.3e}", gap)
    J = AlmostComplexStructure(Jf)
    metric = MetricData.from_symplectic(nakamura_symplectic_form(), J)
    fc = FrameChange(defo.adapted_frame_matrix(), "E", "E'")
    params = {"t1": defo.t[0], "t2": defo.t[1], "t3": defo.t[2], "t4": defo.t[3], "zeta": defo.zeta}
    name = "nakamura(t=(" + ", ".join(f"{x:g}" for x in defo.t) + "))"
    return AlmostHermitianSpec(nakamura_algebra(), J, metric, name=name, family="nakamura", params=params, adapted_frame=fc)


def deformation_of(spec: AlmostHermitianSpec) -> NakamuraDeformation:
    if spec.family != "nakamura":
        raise ValueError(f"spec {spec.name!r} is not a Nakamura point")
    p = spec.params
    return NakamuraDeformation((p["t1"], p["t2"], p["t3"], p["t4"]), p.get("zeta", DEFAULT_ZETA))


# -- expected tables -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExpectedResults:
    """Closed-form expectations, all expressed in the adapted frame ``frame_tag``.

    Array layouts follow the pipeline: ``nijenhuis[a, b, k]``,
    ``*_gamma[i, j, k] = E^k(nabla_i E_j)``, ``connection_real[i, j, a]`` =
    coefficient of ``E^a`` in ``omega^i_j``, ``curvature_real[i, j, a, b] =
    Omega^i_j(E_a, E_b)``, ``real_torsion[a, b, k]``, ``complex_torsion[i, a, b]``,
    ``theta[i, j, a]``, ``psi[i, j, a, b]`` and ``psi11[i, j, k, l]``.
    ``psi_mask[i, j]`` marks which curvature forms are tabulated.
    """

    frame_tag: str
    params: Mapping[str, float]
    nijenhuis: np.ndarray | None = None
    levi_civita_gamma: np.ndarray | None = None
    canonical_gamma: np.ndarray | None = None
    connection_real: np.ndarray | None = None
    curvature_real: np.ndarray | None = None
    real_torsion: np.ndarray | None = None
    complex_torsion: np.ndarray | None = None
    theta: np.ndarray | None = None
    psi: np.ndarray | None = None
    psi_mask: np.ndarray | None = None
    psi11: np.ndarray | None = None
    ricci_real: np.ndarray | None = None
    scal_real: float | None = None
    ricci_complex: np.ndarray | None = None
    scal_complex: float | None = None

    def __post_init__(self):
        for name in self.items():
            value = getattr(self, name)
            if not np.all(np.isfinite(np.asarray(value))):
                raise InvariantViolation(f"expected entry {name!r} is not finite")

    def items(self) -> list[str]:
        skip = {"frame_tag", "params", "psi_mask"}
        return [n for n in self.__dataclass_fields__ if n not in skip and getattr(self, n) is not None]


def _unitary_rows(dim: int) -> np.ndarray:
    """Rows ``z^k = (E^{2k-1} + i E^{2k}) / sqrt(2)`` over an adapted frame."""
    Z = np.zeros((dim // 2, dim), dtype=complex)
    for k in range(dim // 2):
        Z[k, 2 * k], Z[k, 2 * k + 1] = 1 / SQRT2, 1j / SQRT2
    return Z


def _unitary_vectors(dim: int) -> np.ndarray:
    Zv = np.zeros((dim, dim // 2), dtype=complex)
    for k in range(dim // 2):
        Zv[2 * k, k], Zv[2 * k + 1, k] = 1 / SQRT2, -1j / SQRT2
    return Zv


def _psi11(psi: np.ndarray) -> np.ndarray:
    Zv = _unitary_vectors(psi.shape[-1])
    return np.einsum("ijab,ak,bl->ijkl", psi, Zv, Zv.conj())


def expected_kodaira(a: float) -> ExpectedResults:
    """Tables for ``X_a`` in its orthonormal frame ``E``."""
    a = _check_a(a)
    n = 4
    # Nijenhuis tensor, N[a, b, k]
    N = np.zeros((n, n, n))
    for (i, j), (k, v) in {(1, 3): (3, a), (1, 4): (4, -a), (2, 3): (4, -a), (2, 4): (3, -a)}.items():
        N[i - 1, j - 1, k - 1] = v
        N[j - 1, i - 1, k - 1] = -v

    # g(nabla_i E_j, E_k) for the Levi-Civita connection (orthonormal frame)
    lc = np.zeros((n, n, n))
    for (i, j, k), v in {
        (2, 3, 4): a / 2, (2, 4, 3): -a / 2, (4, 2, 3): -a / 2,
        (4, 3, 2): a / 2, (3, 4, 2): a / 2, (3, 2, 4): -a / 2,
    }.items():
        lc[i - 1, j - 1, k - 1] = v

    # nabla^c_{E_i} E_j = sum_k gamma[i, j, k] E_k
    can = np.zeros((n, n, n))
    for (i, j, k), v in {
        (2, 3, 4): a / 2, (2, 4, 3): -a / 2,
        (3, 1, 3): -a / 4, (3, 2, 4): -a / 4, (3, 3, 1): a / 4, (3, 4, 2): a / 4,
        (4, 1, 4): a / 4, (4, 2, 3): -a / 4, (4, 3, 2): a / 4, (4, 4, 1): -a / 4,
    }.items():
        can[i - 1, j - 1, k - 1] = v

    # real connection matrix omega^i_j as covectors over E
    q = a / 4
    E = np.eye(n)
    conn = np.zeros((n, n, n))
    conn[0, 2], conn[0, 3] = q * E[2], -q * E[3]
    conn[1, 2], conn[1, 3] = q * E[3], q * E[2]
    conn[2, 0], conn[2, 1], conn[2, 3] = -q * E[2], -q * E[3], -2 * q * E[1]
    conn[3, 0], conn[3, 1], conn[3, 2] = q * E[3], -q * E[2], 2 * q * E[1]

    # real curvature matrix Omega, in units of a^2/8
    e23, e24, e34 = (_antisym(n, {p: 1.0}).real for p in ((2, 3), (2, 4), (3, 4)))
    Om = np.zeros((n, n, n, n))
    Om[0, 1], Om[0, 2], Om[0, 3] = -e34, e24, 3 * e23
    Om[1, 0], Om[1, 2], Om[1, 3] = e34, -3 * e23, e24
    Om[2, 0], Om[2, 1], Om[2, 3] = -e24, 3 * e23, e34
    Om[3, 0], Om[3, 1], Om[3, 2] = -3 * e23, -e24, -e34
    Om *= a * a / 8

    # real torsion T[a, b, k]
    T = np.zeros((n, n, n))
    T[:, :, 2] = (a / 4) * _antisym(n, {(1, 3): 1.0, (2, 4): -1.0}).real
    T[:, :, 3] = -(a / 4) * _antisym(n, {(2, 3): 1.0, (1, 4): 1.0}).real

    Z = _unitary_rows(n)
    z1, z2 = Z
    th = np.zeros((2, 2, n), dtype=complex)
    f = SQRT2 * a / 4
    th[0, 1] = f * z2
    th[1, 0] = -f * z2.conj()
    th[1, 1] = f * (z1 - z1.conj())

    w = _wedge_rows
    z1b, z2b = z1.conj(), z2.conj()
    s = a * a / 8
    psi = np.zeros((2, 2, n, n), dtype=complex)
    psi[0, 0] = -s * w(z2, z2b)
    psi[0, 1] = s * (-2 * w(z1, z2) - w(z1, z2b) - 2 * w(z2, z1b) + w(z1b, z2b))
    psi[1, 0] = s * (-w(z1, z2) - 2 * w(z1, z2b) - w(z2, z1b) + 2 * w(z1b, z2b))
    psi[1, 1] = s * w(z2, z2b)

    psi11 = np.zeros((2, 2, 2, 2), dtype=complex)
    for (i, j, k, l), v in {
        (1, 1, 2, 2): -s, (1, 2, 1, 2): -s, (1, 2, 2, 1): -2 * s,
        (2, 1, 1, 2): -2 * s, (2, 1, 2, 1): -s, (2, 2, 2, 2): s,
    }.items():
        psi11[i - 1, j - 1, k - 1, l - 1] = v

    return ExpectedResults(
        frame_tag="E",
        params={"a": a},
        nijenhuis=N,
        levi_civita_gamma=lc,
        canonical_gamma=can,
        connection_real=conn,
        curvature_real=Om,
        real_torsion=T,
        complex_torsion=np.einsum("ik,abk->iab", Z, T),
        theta=th,
        psi=psi,
        psi_mask=np.ones((2, 2), dtype=bool),
        psi11=psi11,
        ricci_real=np.diag([0.0, 0.0, -3 * a * a / 8, a * a / 4]),
        scal_real=-a * a / 8,
        ricci_complex=np.zeros((2, 2), dtype=complex),
        scal_complex=0.0,
    )


def expected_nakamura(t: Sequence[float] | NakamuraDeformation, zeta: float = DEFAULT_ZETA) -> ExpectedResults:
    """Tables for ``Y_t`` in the orthonormal frame ``E'``.

    ``Psi^1_3`` (and its conjugate ``Psi^3_1``) is masked out: recomputation
    from the connection forms is treated as authoritative there.
    """
    defo = t if isinstance(t, NakamuraDeformation) else NakamuraDeformation(tuple(t), zeta)
    al, _, ga, de, _, _ = defo.coefficients
    n = 6
    Phi = _unitary_rows(n)
    Phib = Phi.conj()
    f = SQRT2 / (2 * math.sqrt(ga))

    th = np.zeros((3, 3, n), dtype=complex)
    th[0, 1] = -f * (1 + 1j * al) * Phi[1]
    th[0, 2] = -f * (1 + 1j * al) * (1 - 1j * de) * Phi[2]
    th[2, 2] = f * (al + 1j) * de * Phi[0] - f * (al - 1j) * de * Phib[0]
    for i, j in ((0, 1), (0, 2)):
        th[j, i] = -th[i, j].conj()

    h = 1 / (2 * math.sqrt(ga))
    T = np.zeros((n, n, n))
    T[:, :, 2] = h * _antisym(n, {(1, 3): 1, (1, 4): al, (2, 3): al, (2, 4): -1}).real
    T[:, :, 3] = h * _antisym(n, {(1, 3): al, (1, 4): -1, (2, 3): -1, (2, 4): -al}).real
    p, r = 1 - al * de, al + de
    T[:, :, 4] = h * _antisym(n, {(1, 5): p, (1, 6): r, (2, 5): r, (2, 6): -p}).real
    T[:, :, 5] = h * _antisym(n, {(1, 5): r, (1, 6): -p, (2, 5): -p, (2, 6): -r}).real

    w = _wedge_rows
    cT = np.zeros((3, n, n), dtype=complex)
    cT[1] = f * (1 + 1j * al) * w(Phib[0], Phib[1])
    cT[2] = f * (1 + 1j * al) * (1 + 1j * de) * w(Phib[0], Phib[2])

    k = 1 / (2 * ga)
    A, B = 1 + al * al, 1 + de * de
    psi = np.zeros((3, 3, n, n), dtype=complex)
    psi[0, 0] = -k * A * w(Phi[1], Phib[1]) - k * A * B * w(Phi[2], Phib[2])
    psi[0, 1] = -k * A * w(Phi[0], Phib[1]) - k * (1 + 1j * al) ** 2 * w(Phib[0], Phib[1])
    psi[1, 1] = k * A * w(Phi[1], Phib[1])
    psi[1, 2] = k * A * (1 - 1j * de) * w(Phi[2], Phib[1])
    psi[2, 2] = k * A * B * w(Phi[2], Phib[2])
    mask = np.ones((3, 3), dtype=bool)
    mask[0, 2] = mask[2, 0] = False
    for i, j in ((0, 1), (1, 2)):
        psi[j, i] = -psi[i, j].conj()

    return ExpectedResults(
        frame_tag="E'",
        params={"t1": defo.t[0], "t2": defo.t[1], "t3": defo.t[2], "t4": defo.t[3], "zeta": defo.zeta},
        real_torsion=T,
        complex_torsion=cT,
        theta=th,
        psi=psi,
        psi_mask=mask,
        ricci_complex=np.zeros((3, 3), dtype=complex),
        scal_complex=0.0,
    )


def expected_dbar_phi2(defo: NakamuraDeformation) -> InvariantForm:
    """``(1/2) Phi_t^1 ^ conj(Phi_t^2)`` over ``E``."""
    phi = defo.deformed_coframe()
    return 0.5 * wedge(phi[0], phi[1].conj())


__all__ = [
    "DEFAULT_ZETA",
    "NAKAMURA_CONSTANTS",
    "ExpectedResults",
    "NakamuraDeformation",
    "deformation_coefficients",
    "deformation_of",
    "expected_dbar_phi2",
    "expected_kodaira",
    "expected_nakamura",
    "in_domain",
    "kodaira_surface_dimension",
    "kodaira_thurston",
    "kodaira_thurston_coordinate",
    "nakamura",
    "nakamura_algebra",
    "nakamura_symplectic_form",
]
