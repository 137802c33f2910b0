"""Plurigenera and Kodaira dimension along the Nakamura deformation.

A section ``f (Phi_t^{123})^{(x) m}`` of the m-th pluricanonical bundle is
``dbar``-closed iff ``f`` is annihilated by ``conj(V_2)`` and ``conj(V_3)``
and satisfies a first-order equation in ``conj(V_1)``.  The first two force
``f = f(s, x)``; the remaining condition reduces, mode by mode, to the
integer quadratic relation

    (beta / zeta^2) m'^2 - 2 (alpha / zeta) n m' - gamma n^2 = -beta (m delta)^2 / pi^2

for a Fourier mode ``exp(2 pi i (n x + m' s / zeta))``.  Its discriminant in
``m'`` is ``-(4 / zeta^2) (n^2 + beta^2 (m delta)^2 / pi^2)``, so a mode
exists only for ``n = 0`` and ``delta = 0``, and then only ``m' = 0``.

``plurigenus`` decides ``P_m`` from that sign argument and cross-checks it
against an exhaustive integer search; any disagreement raises
:class:`~akgeo.errors.OracleDisagreement`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from akgeo.algebra import InvariantForm, exterior_derivative, wedge
from akgeo.errors import InvariantViolation, OracleDisagreement
from akgeo.families import DEFAULT_ZETA, NakamuraDeformation, deformation_of
from akgeo.hermitian import AlmostHermitianSpec, form_type_parts

DELTA_ZERO = 1e-12
DEFAULT_MODE_BOUND = 1000
MODE_TOL = 1e-9
SYMBOL_MARGIN = 1e-10
RESONANCE_TOL = 1e-9


def _deformation(t, zeta: float = DEFAULT_ZETA) -> NakamuraDeformation:
    if isinstance(t, NakamuraDeformation):
        return t
    return NakamuraDeformation(tuple(t), zeta)


@dataclass(frozen=True)
class ModeEquation:
    """Integer relation ``quad_s m'^2 + cross n m' + quad_x n^2 = rhs``."""

    m_power: int
    quad_s: float
    cross: float
    quad_x: float
    rhs: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    zeta: float

    def __post_init__(self):
        if self.m_power < 1:
            raise ValueError(f"m must be a positive integer, got {self.m_power}")
        vals = (self.quad_s, self.cross, self.quad_x, self.rhs)
        if not all(math.isfinite(v) for v in vals):
            raise InvariantViolation("mode equation has non-finite coefficients")
        if self.quad_s == 0:
            raise InvariantViolation("leading coefficient vanishes (beta = 0)")

    @property
    def scale(self) -> float:
        return max(abs(self.quad_s), abs(self.cross), abs(self.quad_x), abs(self.rhs))

    def residual(self, n, mp):
        """Left minus right side at integer mode(s) ``(n, m')``."""
        n = np.asarray(n, dtype=float)
        mp = np.asarray(mp, dtype=float)
        return self.quad_s * mp * mp + self.cross * n * mp + self.quad_x * n * n - self.rhs


def mode_equation(t, m: int = 1, zeta: float = DEFAULT_ZETA) -> ModeEquation:
    """Fourier relation for the m-th pluricanonical bundle (``delta -> m delta``).

    ``|delta| <= 1e-12`` is treated as the ``t4 = 0`` locus: the right-hand
    side is then exactly zero, so the search and the sign test see the same
    relation.
    """
    d = _deformation(t, zeta)
    delta = 0.0 if abs(d.delta) <= DELTA_ZERO else d.delta
    md = m * delta
    return ModeEquation(
        m_power=int(m),
        quad_s=d.beta / d.zeta**2,
        cross=-2 * d.alpha / d.zeta,
        quad_x=-d.gamma,
        rhs=-d.beta * md * md / math.pi**2,
        alpha=d.alpha,
        beta=d.beta,
        gamma=d.gamma,
        delta=delta,
        zeta=d.zeta,
    )


def discriminant(eq: ModeEquation, n: int) -> float:
    """Discriminant in ``m'`` of the relation at fixed ``n``, in closed form."""
    md = eq.m_power * eq.delta
    return -(4 / eq.zeta**2) * (n * n + eq.beta**2 * md * md / math.pi**2)


def discriminant_from_coefficients(eq: ModeEquation, n: int) -> float:
    """``b^2 - 4ac`` with ``a = quad_s``, ``b = cross n``, ``c = quad_x n^2 - rhs``."""
    b = eq.cross * n
    c = eq.quad_x * n * n - eq.rhs
    return b * b - 4 * eq.quad_s * c


@lru_cache(maxsize=2)
def _quadratic_grid(a: float, b: float, c: float, bound: int) -> np.ndarray:
    """``q[n + bound, m' + bound] = a m'^2 + b n m' + c n^2`` (read-only, cached)."""
    r = np.arange(-bound, bound + 1, dtype=float)
    q = np.add.outer(c * r * r, a * r * r)
    q += np.multiply.outer(b * r, r)
    q.setflags(write=False)
    return q


class ModeGrid:
    """Left-hand side of the relation on ``|n|, |m'| <= bound``.

    The quadratic form does not depend on the power ``m`` (only the right
    side does), so one grid serves every power at a given ``t``.  Passing
    the right-hand sides that will be queried lets the grid keep only the
    entries inside that band; the search stays exhaustive.
    """

    def __init__(self, eq: ModeEquation, bound: int = DEFAULT_MODE_BOUND, rhs_values: Sequence[float] | None = None):
        if bound < 1:
            raise ValueError(f"mode bound must be >= 1, got {bound}")
        self.bound = int(bound)
        self._coeffs = (eq.quad_s, eq.cross, eq.quad_x)
        q = _quadratic_grid(eq.quad_s, eq.cross, eq.quad_x, self.bound)
        rhs = [eq.rhs] if rhs_values is None else list(rhs_values)
        # no entry's own tolerance can exceed this (|n|, |m'| <= bound)
        k = abs(eq.quad_s) + abs(eq.cross) + abs(eq.quad_x)
        slack = MODE_TOL * (k * self.bound**2 + max(abs(v) for v in rhs))
        self._window = (min(rhs), max(rhs))
        rows, cols = np.nonzero((q >= self._window[0] - slack) & (q <= self._window[1] + slack))
        self._n = rows - self.bound
        self._mp = cols - self.bound
        self._q = q[rows, cols]

    def solutions(self, eq: ModeEquation) -> list[tuple[int, int]]:
        """Modes whose residual is within 1e-9 of the size of their own terms."""
        if (eq.quad_s, eq.cross, eq.quad_x) != self._coeffs:
            raise ValueError("grid was built for a different quadratic form")
        if not self._window[0] <= eq.rhs <= self._window[1]:
            raise ValueError(f"right-hand side {eq.rhs} outside the band this grid was built for")
        n, mp = self._n.astype(float), self._mp.astype(float)
        size = abs(eq.quad_s) * mp * mp + abs(eq.cross * n * mp) + abs(eq.quad_x) * n * n + abs(eq.rhs)
        hit = np.abs(self._q - eq.rhs) <= MODE_TOL * size
        return sorted(zip(self._n[hit].tolist(), self._mp[hit].tolist()))


def brute_force_modes(eq: ModeEquation, bound: int = DEFAULT_MODE_BOUND) -> list[tuple[int, int]]:
    """All integer ``(n, m')`` with ``|n|, |m'| <= bound`` solving the relation.

    A pair counts as a solution when the residual is at most ``1e-9`` times
    ``|a| m'^2 + |b n m'| + |c| n^2 + |rhs|``, the size of the terms being
    compared.  At ``(0, 0)`` this makes the test exact, so a tiny nonzero
    right-hand side is never mistaken for zero.
    """
    return ModeGrid(eq, bound).solutions(eq)


def analytic_modes(eq: ModeEquation) -> list[tuple[int, int]]:
    """Solutions predicted by the discriminant argument."""
    if abs(eq.delta) <= DELTA_ZERO:
        return [(0, 0)]
    return []


def plurigenus(t, m: int, zeta: float = DEFAULT_ZETA, bound: int = DEFAULT_MODE_BOUND, grid: ModeGrid | None = None) -> int:
    """``P_m(N, J_t)`` in {0, 1}.

    Raises:
        OracleDisagreement: if the exhaustive mode search disagrees with the
            discriminant classification.
    """
    d = _deformation(t, zeta)
    eq = mode_equation(d, m)
    analytic = analytic_modes(eq)
    found = (grid or ModeGrid(eq, bound)).solutions(eq)
    if found != analytic:
        raise OracleDisagreement(
            f"mode search at t={d.t}, m={m} found {found[:5]} but the discriminant test predicts {analytic}"
        )
    if abs(d.delta) <= DELTA_ZERO:
        return 1
    return 0


@dataclass(frozen=True)
class PlurigenusResult:
    """Plurigenera for ``m = 1..m_max`` and the resulting Kodaira dimension.

    ``evidence`` records, per power, the discriminant at ``n = 0`` (its
    largest value) and the modes found by the search, plus the powers
    flagged by :func:`resonant_powers`.
    """

    t: tuple[float, float, float, float]
    per_m: dict[int, int]
    kappa: float
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = set(self.per_m.values())
        if not vals <= {0, 1}:
            raise InvariantViolation(f"plurigenera must lie in {{0, 1}}, got {sorted(vals)}")
        expect = -math.inf if vals == {0} else 0.0
        if self.kappa != expect:
            raise InvariantViolation(f"kappa {self.kappa} inconsistent with plurigenera {self.per_m}")


def kodaira_dimension(t, m_max: int = 10, zeta: float = DEFAULT_ZETA, bound: int = DEFAULT_MODE_BOUND) -> PlurigenusResult:
    """``kappa^{J_t}``: 0 if some ``P_m = 1`` (they are then bounded by 1), else ``-inf``."""
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    d = _deformation(t, zeta)
    eqs = {m: mode_equation(d, m) for m in range(1, m_max + 1)}
    grid = ModeGrid(eqs[1], bound, [e.rhs for e in eqs.values()])
    per_m, evidence = {}, {"mode_bound": bound, "powers": {}}
    for m in range(1, m_max + 1):
        eq = eqs[m]
        per_m[m] = plurigenus(d, m, grid=grid)
        # the discriminant is largest at n = 0
        evidence["powers"][m] = {"discriminant_n0": discriminant(eq, 0), "modes": grid.solutions(eq)}
    evidence["resonant_powers"] = resonant_powers(d, m_max)
    kappa = 0.0 if any(per_m.values()) else -math.inf
    return PlurigenusResult(d.t, per_m, kappa, evidence)


def resonant_powers(t, m_max: int = 10, zeta: float = DEFAULT_ZETA, tol: float = RESONANCE_TOL) -> list[int]:
    """Powers ``m`` where ``m delta zeta / (2 pi)`` is a nonzero integer.

    At such powers the first-order equation ``conj(V_1) f = i (m delta / 2) f``
    has the periodic solution ``f = exp(i m delta s)``, which is not captured
    by the quadratic mode relation.  This is a diagnostic only; floats cannot
    certify that ``delta zeta / (2 pi)`` is rational, so the result never
    changes :func:`plurigenus`.
    """
    d = _deformation(t, zeta)
    out = []
    for m in range(1, m_max + 1):
        x = m * d.delta * d.zeta / (2 * math.pi)
        k = round(x)
        if k != 0 and abs(x - k) <= tol:
            out.append(m)
    return out


def first_order_mode_solutions(t, m: int, bound: int = DEFAULT_MODE_BOUND, zeta: float = DEFAULT_ZETA) -> list[tuple[int, int]]:
    """Modes ``(n, m')`` solving ``conj(V_1) f = i (m delta / 2) f`` directly.

    With ``conj(V_1) = (E_1 - (alpha/beta) E_2 - (i/beta) E_2) / 2`` acting on
    ``exp(2 pi i (n x + m' s / zeta))`` the real part forces ``n = 0`` and
    the imaginary part ``2 pi m' / zeta = m delta``.
    """
    d = _deformation(t, zeta)
    mp = np.arange(-bound, bound + 1)
    out = []
    for n in (0,):
        lhs = 0.5 * (2j * np.pi * mp / d.zeta - 2j * np.pi * n * d.alpha / d.beta + 2 * np.pi * n / d.beta)
        res = np.abs(lhs - 0.5j * m * d.delta)
        out.extend((n, int(k)) for k in mp[res <= RESONANCE_TOL * max(1.0, abs(m * d.delta))])
    return out


# -- the canonical bundle -------------------------------------------------------

def _coframe_and_duals(d: NakamuraDeformation):
    phi = d.deformed_coframe()
    rows = np.array([p.to_vector() for p in phi])
    F = np.vstack([rows, rows.conj()])
    duals = np.linalg.inv(F)  # column k is V_k, column 3 + k is conj(V_k)
    return phi, duals


def dbar_canonical_coefficient(spec: AlmostHermitianSpec, m: int = 1) -> InvariantForm:
    """The (0,1)-form ``eta`` with ``dbar (Phi_t^{123})^{(x) m} = eta (x) (Phi_t^{123})^{(x) m}``.

    Computed generically: ``d`` of the top (3,0)-form through the structure
    constants, then its (3,1) part, then ``eta(conj V_k)`` read off by
    evaluation on ``(conj V_k, V_1, V_2, V_3)``.  Leibniz on tensor powers
    multiplies the result by ``m``.

    Raises:
        InvariantViolation: if ``dbar Phi^{123}`` is not of the form
            ``eta ^ Phi^{123}``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    d = deformation_of(spec)
    if spec.algebra.frame_tag != "E":
        raise InvariantViolation("expected the Nakamura spec in its structure frame E")
    phi, duals = _coframe_and_duals(d)
    top = wedge(wedge(phi[0], phi[1]), phi[2])
    J = spec.J
    db = form_type_parts(exterior_derivative(top, spec.algebra), J)[(3, 1)]
    V = [duals[:, k] for k in range(3)]
    coeffs = [db(duals[:, 3 + k], *V) for k in range(3)]
    eta = InvariantForm.zero(1, 6, "E")
    for k, c in enumerate(coeffs):
        eta = eta + c * phi[k].conj()
    gap = (wedge(eta, top) - db).norm()
    if gap > 1e-10 * max(1.0, db.norm()):
        raise InvariantViolation(f"dbar of the canonical generator is not decomposable (residual {gap:.3e})", gap)
    return m * eta


def expected_dbar_canonical(t, m: int = 1, zeta: float = DEFAULT_ZETA) -> InvariantForm:
    """Closed form ``-m (i delta / 2) conj(Phi_t^1)``."""
    d = _deformation(t, zeta)
    return (-m * 0.5j * d.delta) * d.deformed_coframe()[0].conj()


# -- ellipticity -----------------------------------------------------------------

@dataclass(frozen=True)
class EllipticOperatorSymbol:
    """Principal symbol of ``4 (V_2 conj V_2 + V_3 conj V_3)`` in ``(y1, y2, y3, y4)``."""

    delta: float
    lam: float
    samples: tuple[float, ...]

    def closed_form(self, s: float) -> np.ndarray:
        a = math.exp(-2 * s)
        b = math.exp(2 * s)
        sym = np.zeros((4, 4))
        sym[0, 0], sym[1, 1] = a, b
        sym[2, 2] = a
        sym[3, 3] = (1 + self.delta**2) * b / self.lam**2
        sym[2, 3] = sym[3, 2] = -self.delta / self.lam
        return sym

    @staticmethod
    def from_vector_fields(duals: np.ndarray, s: float) -> np.ndarray:
        """``4 Re(v v^*)`` summed over ``V_2, V_3`` after ``E_3..E_6 -> d/dy``."""
        # E_3 = e^{-s} d/dy1, E_4 = e^{s} d/dy2, E_5 = e^{-s} d/dy3, E_6 = e^{s} d/dy4
        scale = np.array([math.exp(-s), math.exp(s), math.exp(-s), math.exp(s)])
        sym = np.zeros((4, 4))
        for k in (1, 2):
            v = duals[2:, k] * scale
            sym += 4 * np.real(np.outer(v, v.conj()))
        return sym

    def block_determinant(self, s: float) -> float:
        sym = self.closed_form(s)
        return float(np.linalg.det(sym[2:, 2:]))


@dataclass(frozen=True)
class EllipticityVerdict:
    elliptic: bool
    min_eigenvalue: float
    path_gap: float
    block_det_gap: float
    samples: int


def ellipticity_check(t, sample_count: int = 16, zeta: float = DEFAULT_ZETA) -> EllipticityVerdict:
    """Positive definiteness of the symbol at ``sample_count`` points of ``[0, zeta]``.

    The symbol is assembled twice, from the (1,0)-frame dual to ``Phi_t`` and
    from its closed form; the (y3, y4)-block determinant is also compared with
    ``1 / lambda^2``.

    Raises:
        InvariantViolation: if the symbol fails to be positive definite with
            margin 1e-10, or the two constructions disagree.
    """
    if sample_count < 2:
        raise ValueError(f"need at least two samples, got {sample_count}")
    d = _deformation(t, zeta)
    _, duals = _coframe_and_duals(d)
    sym = EllipticOperatorSymbol(d.delta, d.lam, tuple(np.linspace(0.0, d.zeta, sample_count)))
    lo, gap, det_gap = math.inf, 0.0, 0.0
    for s in sym.samples:
        a = sym.closed_form(s)
        b = sym.from_vector_fields(duals, s)
        gap = max(gap, float(np.abs(a - b).max()))
        det_gap = max(det_gap, abs(sym.block_determinant(s) - 1 / d.lam**2))
        lo = min(lo, float(np.linalg.eigvalsh(a).min()))
    ok = lo > SYMBOL_MARGIN
    if not ok:
        raise InvariantViolation(f"principal symbol not positive definite (min eigenvalue {lo:.3e})", lo)
    if gap > 1e-10 or det_gap > 1e-10:
        raise InvariantViolation(f"symbol constructions disagree ({gap:.3e}, {det_gap:.3e})", max(gap, det_gap))
    return EllipticityVerdict(ok, lo, gap, det_gap, sample_count)


__all__ = [
    "ModeEquation",
    "ModeGrid",
    "PlurigenusResult",
    "EllipticOperatorSymbol",
    "EllipticityVerdict",
    "mode_equation",
    "discriminant",
    "discriminant_from_coefficients",
    "brute_force_modes",
    "analytic_modes",
    "plurigenus",
    "kodaira_dimension",
    "resonant_powers",
    "first_order_mode_solutions",
    "dbar_canonical_coefficient",
    "expected_dbar_canonical",
    "ellipticity_check",
]
