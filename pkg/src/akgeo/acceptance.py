"""Reproduction checks for the closed-form results, one function per criterion.

Each ``criterion_*`` returns a :class:`CriterionResult`.  Pipeline runs and
the Kodaira-dimension sweep are cached so that criteria sharing inputs do
not recompute them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from akgeo.algebra import InvariantForm, exterior_derivative
from akgeo.errors import AkgeoError, OracleDisagreement
from akgeo.families import (
    NakamuraDeformation,
    expected_dbar_phi2,
    expected_kodaira,
    expected_nakamura,
    in_domain,
    kodaira_thurston,
    kodaira_thurston_coordinate,
    nakamura,
)
from akgeo.hermitian import dbar
from akgeo.plurigenus import analytic_modes, ellipticity_check, kodaira_dimension, mode_equation
from akgeo.report import PipelineOptions, Report, run_pipeline

KT_VALUES = (0.5, 1.0, 2.0, 3.14159)
GRID = tuple(itertools.product((-0.3, 0.0, 0.3), repeat=4))
RANDOM_POINTS = 20
SEED = 20240607
M_MAX = 10
MODE_BOUND = 1000


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str


def format_result(r: CriterionResult) -> str:
    return f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.number}: {r.name}: {r.detail}"


_NO_PLURI = PipelineOptions(plurigenus=False)


@lru_cache(maxsize=None)
def kt_report(a: float) -> Report:
    return run_pipeline(kodaira_thurston(a), _NO_PLURI)


@lru_cache(maxsize=None)
def nakamura_report(t: tuple[float, ...]) -> Report:
    return run_pipeline(nakamura(t), _NO_PLURI)


def grid_points() -> list[tuple[float, ...]]:
    return [t for t in GRID if in_domain(t)]


@lru_cache(maxsize=1)
def random_points() -> tuple[tuple[float, ...], ...]:
    """Uniform draws from the domain (two open unit discs).

    Every other draw is projected onto ``t4 = 0`` so both phases appear.
    """
    rng = np.random.default_rng(SEED)
    pts = []
    while len(pts) < RANDOM_POINTS:
        t = rng.uniform(-1, 1, 4)
        if len(pts) % 2 == 1:
            t[3] = 0.0
        t = tuple(float(x) for x in t)
        if in_domain(t):
            pts.append(t)
    return tuple(pts)


@dataclass(frozen=True)
class SweepEntry:
    t: tuple[float, ...]
    kappa: float | None
    per_m: dict
    modes: dict
    error: str | None


@lru_cache(maxsize=1)
def phase_sweep() -> tuple[SweepEntry, ...]:
    out = []
    for t in grid_points() + list(random_points()):
        try:
            res = kodaira_dimension(t, M_MAX, bound=MODE_BOUND)
            modes = {m: ev["modes"] for m, ev in res.evidence["powers"].items()}
            out.append(SweepEntry(t, res.kappa, res.per_m, modes, None))
        except OracleDisagreement as exc:
            out.append(SweepEntry(t, None, {}, {}, str(exc)))
    return tuple(out)


def _max_abs(x) -> float:
    return float(np.abs(np.asarray(x)).max(initial=0.0))


def criterion_1() -> CriterionResult:
    worst = max(abs(kt_report(a).scal_real - (-a * a / 8)) for a in KT_VALUES)
    return CriterionResult(1, "Kodaira-Thurston real scalar curvature -a^2/8", worst < 1e-9, f"max error {worst:.2e}")


def criterion_2() -> CriterionResult:
    worst = max(
        _max_abs(kt_report(a).ricci_real - np.diag([0, 0, -3 * a * a / 8, a * a / 4])) for a in KT_VALUES
    )
    return CriterionResult(2, "Kodaira-Thurston real Ricci diag(0,0,-3a^2/8,a^2/4)", worst < 1e-9, f"max error {worst:.2e}")


def criterion_3() -> CriterionResult:
    ric = max(_max_abs(kt_report(a).ricci_complex) for a in KT_VALUES)
    coeff = max(_max_abs(kt_report(a).psi11 - expected_kodaira(a).psi11) for a in KT_VALUES)
    spot = max(
        max(abs(kt_report(a).psi11[0, 0, 1, 1] + a * a / 8), abs(kt_report(a).psi11[1, 1, 1, 1] - a * a / 8))
        for a in KT_VALUES
    )
    ok = ric < 1e-9 and coeff < 1e-9 and spot < 1e-9
    return CriterionResult(3, "Kodaira-Thurston complex Ricci vanishes", ok,
                           f"max|R_kl| {ric:.2e}, coefficient error {coeff:.2e}")


def criterion_4() -> CriterionResult:
    worst = 0.0
    for a in KT_VALUES:
        r, e = kt_report(a), expected_kodaira(a)
        for name in ("connection_real", "curvature_real", "theta", "psi"):
            worst = max(worst, _max_abs(getattr(r, name) - getattr(e, name)))
    return CriterionResult(4, "Kodaira-Thurston connection and curvature matrices", worst < 1e-10,
                           f"max entry error {worst:.2e}")


def criterion_5() -> CriterionResult:
    ric, th = 0.0, 0.0
    pts = grid_points()
    for t in pts:
        r = nakamura_report(t)
        ric = max(ric, _max_abs(r.ricci_complex))
        th = max(th, _max_abs(r.theta - expected_nakamura(t).theta))
    ok = ric < 1e-8 and th < 1e-9
    return CriterionResult(5, "Nakamura Ricci-flatness over the grid", ok,
                           f"{len(pts)} points, max|R_kl| {ric:.2e}, theta error {th:.2e}")


def criterion_6() -> CriterionResult:
    sweep = phase_sweep()
    bad = []
    for e in sweep:
        if e.error is not None:
            bad.append(e.t)
            continue
        want = 0.0 if e.t[3] == 0.0 else -math.inf
        if e.kappa != want or len(set(e.per_m.values())) != 1:
            bad.append(e.t)
    return CriterionResult(6, "Kodaira dimension is 0 exactly on t4 = 0", not bad,
                           f"{len(sweep)} points, {len(bad)} wrong" + (f", first {bad[0]}" if bad else ""))


def criterion_7() -> CriterionResult:
    """The sweep's modes come from the exhaustive search over ``|n|, |m'| <= 1000``."""
    checked, bad = 0, []
    for e in phase_sweep():
        if e.error is not None:
            bad.append((e.t, e.error))
            continue
        for m in range(1, M_MAX + 1):
            if e.modes[m] != analytic_modes(mode_equation(e.t, m)):
                bad.append((e.t, m))
            checked += 1
    return CriterionResult(7, "brute-force modes agree with the discriminant classification", not bad,
                           f"{checked} (t, m) pairs, {len(bad)} disagreements")


def _d_squared(alg) -> float:
    worst = 0.0
    for deg in (0, 1, 2, 3):
        if deg > alg.dim:
            break
        for idx in itertools.combinations(range(alg.dim), deg):
            f = InvariantForm.basis(*idx, dim=alg.dim, frame_tag=alg.frame_tag)
            worst = max(worst, exterior_derivative(exterior_derivative(f, alg), alg).norm())
    return worst


def criterion_8() -> CriterionResult:
    parts = {}
    reports = [kt_report(a) for a in KT_VALUES] + [nakamura_report(t) for t in grid_points()]
    reports.append(run_pipeline(kodaira_thurston_coordinate(2.0), _NO_PLURI))
    specs = [kodaira_thurston(1.0), nakamura((0.1, -0.2, 0.3, 0.4))]
    parts["d^2"] = max(_d_squared(s.algebra) for s in specs)
    parts["torsion"] = max(max(r.residuals["torsion_vs_nijenhuis"], r.residuals["torsion_vs_brackets"]) for r in reports)
    parts["skew"] = max(max(r.residuals["theta_skew_hermitian"], r.residuals["psi_skew_hermitian"]) for r in reports)
    parts["parallel"] = max(max(r.residuals["canonical_metric"], r.residuals["canonical_complex"]) for r in reports)
    ident = path = dbar2 = 0.0
    for t in grid_points():
        d = NakamuraDeformation(t)
        ident = max(ident, abs(-d.alpha**2 - d.beta * d.gamma - 1), abs(-d.delta**2 - d.lam * d.mu - 1))
        path = max(path, _max_abs(d.J_conjugated() - d.J_closed_form()))
        spec = nakamura(t)
        phi2 = d.deformed_coframe()[1]
        dbar2 = max(dbar2, (dbar(phi2, spec.algebra, spec.J) - expected_dbar_phi2(d)).norm())
    parts["identities"], parts["dual_path"], parts["dbar_phi2"] = ident, path, dbar2
    limits = {"d^2": 1e-12, "torsion": 1e-9, "skew": 1e-10, "parallel": 1e-10,
              "identities": 1e-12, "dual_path": 1e-12, "dbar_phi2": 1e-10}
    ok = all(parts[k] < limits[k] for k in limits)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in parts.items())
    return CriterionResult(8, "structural identities", ok, detail)


def criterion_9() -> CriterionResult:
    lo, failures = math.inf, 0
    for t in grid_points():
        try:
            lo = min(lo, ellipticity_check(t, 16).min_eigenvalue)
        except AkgeoError:
            failures += 1
    ok = failures == 0 and lo > 1e-10
    return CriterionResult(9, "principal symbol positive definite", ok,
                           f"min eigenvalue {lo:.3e} over {len(grid_points())} points x 16 samples")


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9)


def run_all() -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        try:
            out.append(fn())
        except Exception as exc:  # a crash is a failure, not an abort
            num = int(fn.__name__.rsplit("_", 1)[1])
            out.append(CriterionResult(num, fn.__name__, False, f"raised {type(exc).__name__}: {exc}"))
    return out
