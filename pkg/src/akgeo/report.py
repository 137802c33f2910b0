"""Spec files, the end-to-end pipeline, reports and verification.

A spec file is a JSON document.  Either it names a built-in family::

    {"family": "kodaira_thurston", "a": 2}
    {"family": "nakamura", "t": [0, 0, 0, 0.1], "zeta": 0.96}

or it spells the structure out (indices are 1-based)::

    {
      "name": "flat torus",
      "dim": 4,
      "structure": [[2, 3, 4, 1.0]],
      "J": [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
      "metric": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
      "frame_change": null,
      "params": {}
    }

``symplectic`` (a list of ``[i, j, value]`` triples) may replace ``metric``;
the metric is then ``g(X, Y) = omega(X, JY)``.  ``frame_change`` holds the
columns of an orthonormal J-adapted frame over the input frame.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from akgeo.algebra import FrameChange, InvariantAlgebra, InvariantForm, validate_algebra
from akgeo.errors import AkgeoError, FrameMismatchError, InvariantViolation, PipelineError, SpecError
from akgeo.families import (
    DEFAULT_ZETA,
    ExpectedResults,
    expected_kodaira,
    expected_nakamura,
    kodaira_thurston,
    nakamura,
)
from akgeo.hermitian import (
    AlmostComplexStructure,
    AlmostHermitianSpec,
    MetricData,
    adapted_orthonormal_frame,
    canonical_connection,
    check_adapted_frame,
    classify,
    connection_forms,
    curvature,
    holomorphic_torsion_from_brackets,
    holomorphic_torsion_from_nijenhuis,
    levi_civita,
    nijenhuis_tensor,
    psi11_from_operator,
    real_curvature,
    torsion_forms,
    unitary_frame,
)

DEFAULT_TOL = 1e-9
SIG_DIGITS = 12
CHOP = 1e-13
FAMILIES = ("kodaira_thurston", "nakamura")


def default_tolerance() -> float:
    """``AKGEO_TOL`` if set, else 1e-9."""
    raw = os.environ.get("AKGEO_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise SpecError(f"AKGEO_TOL must be a number, got {raw!r}", field="AKGEO_TOL") from None
    if not (tol > 0 and math.isfinite(tol)):
        raise SpecError(f"AKGEO_TOL must be positive, got {raw!r}", field="AKGEO_TOL")
    return tol


# -- loading -----------------------------------------------------------------------

def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _matrix(value: Any, dim: int, key: str, text: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise SpecError("expected a numeric matrix", field=key, line=_line_of(text, key)) from None
    if arr.shape == (dim * dim,):
        arr = arr.reshape(dim, dim)
    if arr.shape != (dim, dim):
        raise SpecError(f"expected a {dim}x{dim} matrix, got shape {arr.shape}", field=key, line=_line_of(text, key))
    if not np.all(np.isfinite(arr)):
        raise SpecError("matrix entries must be finite", field=key, line=_line_of(text, key))
    return arr


def _triples(value: Any, width: int, dim: int, key: str, text: str) -> list[tuple]:
    if not isinstance(value, list):
        raise SpecError("expected a list of index/value entries", field=key, line=_line_of(text, key))
    out = []
    for pos, entry in enumerate(value):
        where = f"{key}[{pos}]"
        if not isinstance(entry, list) or len(entry) != width:
            raise SpecError(f"entry must have {width} items", field=where, line=_line_of(text, key))
        *idx, v = entry
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise SpecError("indices must be integers", field=where, line=_line_of(text, key))
        if not all(1 <= i <= dim for i in idx):
            raise SpecError(f"index out of range 1..{dim}", field=where, line=_line_of(text, key))
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise SpecError("value must be a finite number", field=where, line=_line_of(text, key))
        out.append((*(i - 1 for i in idx), v))
    return out


def parse_spec(text: str, source: str = "<string>") -> AlmostHermitianSpec:
    """Parse and validate a spec document (see the module docstring)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}: invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise SpecError(f"{source}: top level must be an object", line=1)
    params = doc.get("params") or {}
    if not isinstance(params, dict):
        raise SpecError("params must be an object", field="params", line=_line_of(text, "params"))

    def param(key: str, default=None):
        if key in doc:
            return doc[key]
        return params.get(key, default)

    family = doc.get("family")
    try:
        if family is not None:
            if family not in FAMILIES:
                raise SpecError(f"unknown family {family!r}; expected one of {FAMILIES}", field="family",
                                line=_line_of(text, "family"))
            if family == "kodaira_thurston":
                a = param("a")
                if not isinstance(a, (int, float)) or isinstance(a, bool):
                    raise SpecError("kodaira_thurston needs a numeric parameter 'a'", field="a", line=_line_of(text, "a"))
                return kodaira_thurston(a)
            t = param("t")
            if not isinstance(t, list) or len(t) != 4 or not all(isinstance(x, (int, float)) for x in t):
                raise SpecError("nakamura needs 't' as a list of four numbers", field="t", line=_line_of(text, "t"))
            zeta = param("zeta", DEFAULT_ZETA)
            return nakamura(t, zeta)
        return _parse_general(doc, params, text)
    except SpecError:
        raise
    except AkgeoError as exc:
        residual = getattr(exc, "residual", None)
        extra = f" (residual {residual:.3e})" if residual is not None else ""
        raise SpecError(f"{source}: {exc}{extra}") from exc


def _parse_general(doc: Mapping, params: Mapping, text: str) -> AlmostHermitianSpec:
    for key in ("dim", "J"):
        if key not in doc:
            raise SpecError("missing required field", field=key)
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim <= 0 or dim % 2:
        raise SpecError(f"dim must be a positive even integer, got {dim!r}", field="dim", line=_line_of(text, "dim"))
    consts = _triples(doc.get("structure", []), 4, dim, "structure", text)
    for i, j, _, _ in consts:
        if i == j:
            raise SpecError("bracket of a vector with itself", field="structure", line=_line_of(text, "structure"))
    alg = InvariantAlgebra.from_constants(dim, consts)
    diag = validate_algebra(alg)
    if not diag.passed:
        raise SpecError(f"structure constants violate the Jacobi identity (residual {diag.jacobi_residual:.3e})",
                        field="structure", line=_line_of(text, "structure"))
    Jm = _matrix(doc["J"], dim, "J", text)
    try:
        J = AlmostComplexStructure(Jm)
    except InvariantViolation as exc:
        raise SpecError(f"{exc}", field="J", line=_line_of(text, "J")) from None
    if ("metric" in doc) == ("symplectic" in doc):
        raise SpecError("give exactly one of 'metric' and 'symplectic'", field="metric")
    try:
        if "metric" in doc:
            metric = MetricData.from_metric(_matrix(doc["metric"], dim, "metric", text), J)
        else:
            entries = _triples(doc["symplectic"], 3, dim, "symplectic", text)
            omega = InvariantForm.from_terms({(i, j): v for i, j, v in entries}, 2, dim)
            metric = MetricData.from_symplectic(omega, J)
    except InvariantViolation as exc:
        key = "metric" if "metric" in doc else "symplectic"
        raise SpecError(f"{exc}", field=key, line=_line_of(text, key)) from None
    fc = None
    if doc.get("frame_change") is not None:
        M = _matrix(doc["frame_change"], dim, "frame_change", text)
        try:
            fc = FrameChange(M, "E", "E'")
        except InvariantViolation as exc:
            raise SpecError(f"{exc}", field="frame_change", line=_line_of(text, "frame_change")) from None
    clean = {k: float(v) for k, v in params.items() if isinstance(v, (int, float)) and not isinstance(v, bool)}
    try:
        return AlmostHermitianSpec(alg, J, metric, name=str(doc.get("name", "")), family=None, params=clean, adapted_frame=fc)
    except InvariantViolation as exc:
        raise SpecError(f"{exc}", field="frame_change" if fc is not None else "metric") from None


def load_spec(path: str | os.PathLike) -> AlmostHermitianSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {p}: {exc.strerror}") from None
    return parse_spec(text, str(p))


# -- pipeline --------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineOptions:
    tol: float = DEFAULT_TOL
    plurigenus: bool = True
    m_max: int = 10
    mode_bound: int = 1000
    ellipticity_samples: int = 16


@dataclass(frozen=True, eq=False)
class Report:
    """Everything the pipeline computes for one spec, in the adapted frame."""

    name: str
    family: str | None
    params: Mapping[str, float]
    frame_tag: str
    classification: Mapping[str, Any]
    nijenhuis: np.ndarray
    levi_civita_gamma: np.ndarray
    canonical_gamma: np.ndarray
    connection_real: np.ndarray
    theta: np.ndarray
    real_torsion: np.ndarray
    complex_torsion: np.ndarray
    psi: np.ndarray
    psi11: np.ndarray
    curvature_real: np.ndarray
    ricci_real: np.ndarray
    scal_real: float
    ricci_real_full: np.ndarray
    scal_real_full: float
    ricci_complex: np.ndarray
    scal_complex: float
    residuals: Mapping[str, float]
    plurigenus: Mapping[str, Any] | None = None
    verification: "VerificationResult | None" = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "family": self.family,
            "params": dict(sorted(self.params.items())),
            "frame": self.frame_tag,
            "classification": dict(self.classification),
        }
        for key in ARRAY_FIELDS:
            out[key] = getattr(self, key)
        for key in ("scal_real", "scal_real_full", "scal_complex"):
            out[key] = getattr(self, key)
        out["residuals"] = dict(self.residuals)
        if self.plurigenus is not None:
            out["plurigenus"] = dict(self.plurigenus)
        if self.verification is not None:
            out["verification"] = self.verification.to_dict()
        return jsonable(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_text(self) -> str:
        return format_text(self)


ARRAY_FIELDS = (
    "nijenhuis",
    "levi_civita_gamma",
    "canonical_gamma",
    "connection_real",
    "theta",
    "real_torsion",
    "complex_torsion",
    "psi",
    "psi11",
    "curvature_real",
    "ricci_real",
    "ricci_real_full",
    "ricci_complex",
)


def working_frame(spec: AlmostHermitianSpec) -> tuple[AlmostHermitianSpec, FrameChange]:
    """The spec in an orthonormal J-adapted frame, plus the change used."""
    if spec.adapted_frame is not None:
        fc = spec.adapted_frame
    else:
        ident = FrameChange.identity(spec.dim, spec.algebra.frame_tag)
        try:
            check_adapted_frame(ident, spec.metric, spec.J)
            fc = ident
        except InvariantViolation:
            fc = adapted_orthonormal_frame(spec.metric, spec.J)
    if fc.source == fc.target and np.array_equal(fc.matrix, np.eye(spec.dim)):
        return spec, fc
    return spec.in_frame(fc), fc


def _stage(name: str, fn: Callable, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except Exception as exc:  # tag anything raised inside a stage
        raise PipelineError(name, exc) from exc


def run_pipeline(spec: AlmostHermitianSpec, options: PipelineOptions | None = None) -> Report:
    """classify, Levi-Civita, canonical connection, unitary frame, theta,
    torsion, curvature (complex and real), Ricci and scalars, and for
    Nakamura points the plurigenus block.

    Raises:
        PipelineError: wrapping whatever a stage raised, tagged with the stage.
    """
    opts = options or PipelineOptions()
    cls = _stage("classify", classify, spec.J, spec.metric, spec.algebra)
    work, fc = _stage("frame", working_frame, spec)
    alg, J, metric = work.algebra, work.J, work.metric
    lc = _stage("levi_civita", levi_civita, metric, alg)
    can = _stage("canonical", canonical_connection, lc, J)
    cf = _stage("unitary_frame", unitary_frame, metric, J, FrameChange.identity(work.dim, alg.frame_tag))
    theta = _stage("connection_forms", connection_forms, can, cf, J)
    tors = _stage("torsion", torsion_forms, theta, cf, alg)
    hol_n = _stage("torsion", holomorphic_torsion_from_nijenhuis, J, alg, cf)
    hol_b = _stage("torsion", holomorphic_torsion_from_brackets, J, alg, cf)
    curv = _stage("curvature", curvature, theta, alg, cf)
    psi11_op = _stage("curvature", psi11_from_operator, can, alg, cf)
    real = _stage("real_curvature", real_curvature, can, alg, metric)

    residuals = {
        "levi_civita_metric": lc.metric_residual(metric.g),
        "levi_civita_torsion": float(np.abs(lc.torsion_tensor(alg)).max()),
        "canonical_metric": can.metric_residual(metric.g),
        "canonical_complex": can.complex_residual(J.matrix),
        "theta_skew_hermitian": theta.skew_hermitian_residual(),
        "psi_skew_hermitian": curv.skew_hermitian_residual(),
        "torsion_vs_nijenhuis": max((a - b).norm() for a, b in zip(tors, hol_n)),
        "torsion_vs_brackets": max((a - b).norm() for a, b in zip(tors, hol_b)),
        "psi11_two_paths": float(np.abs(curv.psi11 - psi11_op).max()),
        "scal_complex_two_paths": abs(curv.scal_complex - curv.scal_from_components()),
    }
    plur = None
    if opts.plurigenus and spec.family == "nakamura":
        plur = _stage("plurigenus", plurigenus_block, spec, opts)
    conn_real = np.array([[f.to_vector().real for f in row] for row in can.connection_forms()])
    return Report(
        name=spec.name,
        family=spec.family,
        params=dict(spec.params),
        frame_tag=alg.frame_tag,
        classification={
            "integrable": cls.integrable,
            "almost_kahler": cls.almost_kahler,
            "quasi_kahler": cls.quasi_kahler,
            "label": cls.label,
            "nijenhuis_norm": cls.nijenhuis_norm,
            "domega_norm": cls.domega_norm,
        },
        nijenhuis=nijenhuis_tensor(J, alg),
        levi_civita_gamma=lc.gamma,
        canonical_gamma=can.gamma,
        connection_real=conn_real,
        theta=theta.as_array(),
        real_torsion=can.torsion_tensor(alg),
        complex_torsion=np.array([f.to_matrix() for f in tors]),
        psi=curv.psi_array(),
        psi11=curv.psi11,
        curvature_real=real.real_components,
        ricci_real=real.ricci_real,
        scal_real=real.scal_real,
        ricci_real_full=real.ricci_real_full,
        scal_real_full=real.scal_real_full,
        ricci_complex=curv.ricci_complex,
        scal_complex=curv.scal_complex,
        residuals=residuals,
        plurigenus=plur,
    )


def plurigenus_block(spec: AlmostHermitianSpec, opts: PipelineOptions) -> dict:
    from akgeo.families import deformation_of
    from akgeo.plurigenus import dbar_canonical_coefficient, ellipticity_check, expected_dbar_canonical, kodaira_dimension

    d = deformation_of(spec)
    res = kodaira_dimension(d, opts.m_max, bound=opts.mode_bound)
    ell = ellipticity_check(d, opts.ellipticity_samples)
    eta = dbar_canonical_coefficient(spec, 1)
    return {
        "delta": d.delta,
        "plurigenera": {str(m): p for m, p in res.per_m.items()},
        "kappa": res.kappa,
        "mode_bound": opts.mode_bound,
        "modes": {str(m): [list(s) for s in ev["modes"]] for m, ev in res.evidence["powers"].items()},
        "resonant_powers": res.evidence["resonant_powers"],
        "elliptic": ell.elliptic,
        "symbol_min_eigenvalue": ell.min_eigenvalue,
        "dbar_canonical_eta": eta.to_vector(),
        "dbar_canonical_residual": (eta - expected_dbar_canonical(d, 1)).norm(),
    }


# -- verification ------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationItem:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tol)


@dataclass(frozen=True)
class VerificationResult:
    items: tuple[VerificationItem, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    @property
    def max_residual(self) -> float:
        return max((i.residual for i in self.items), default=0.0)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "items": [{"name": i.name, "residual": i.residual, "passed": i.passed} for i in self.items],
        }


def expected_for(spec: AlmostHermitianSpec) -> ExpectedResults | None:
    if spec.family == "kodaira_thurston":
        return expected_kodaira(spec.params["a"])
    if spec.family == "nakamura":
        p = spec.params
        return expected_nakamura((p["t1"], p["t2"], p["t3"], p["t4"]), p.get("zeta", DEFAULT_ZETA))
    return None


def verify(report: Report, expected: ExpectedResults, tol: float = DEFAULT_TOL) -> VerificationResult:
    """Per-item max-abs residual of ``report`` against ``expected``.

    Raises:
        FrameMismatchError: if the two live in different frames.
        ValueError: on a shape mismatch.
    """
    if expected.frame_tag != report.frame_tag:
        raise FrameMismatchError(f"expected values in frame {expected.frame_tag!r}, report in {report.frame_tag!r}")
    items = []
    for name in expected.items():
        want = np.asarray(getattr(expected, name))
        got = np.asarray(getattr(report, name))
        if want.shape != got.shape:
            raise ValueError(f"{name}: expected shape {want.shape}, report has {got.shape}")
        diff = np.abs(got - want)
        if name == "psi" and expected.psi_mask is not None:
            diff = diff[expected.psi_mask]
        items.append(VerificationItem(name, float(diff.max(initial=0.0)), tol))
    return VerificationResult(tuple(items), tol)


def analyze(spec: AlmostHermitianSpec, options: PipelineOptions | None = None) -> Report:
    """Run the pipeline and attach verification when closed forms exist."""
    opts = options or PipelineOptions()
    report = run_pipeline(spec, opts)
    expected = expected_for(spec)
    if expected is None:
        return report
    return dataclasses.replace(report, verification=verify(report, expected, opts.tol))


# -- serialisation -------------------------------------------------------------------

def _num(x: float) -> float | str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if abs(x) < CHOP:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0


def jsonable(obj: Any) -> Any:
    """Round floats to 12 significant digits, complex to ``[re, im]``, +-inf to strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def _fmt(x: complex) -> str:
    x = complex(x)
    re_, im = (0.0 if abs(v) < CHOP else v for v in (x.real, x.imag))
    if im == 0:
        return f"{re_:.6g}"
    if re_ == 0:
        return f"{im:.6g}i"
    return f"{re_:.6g}{im:+.6g}i"


def _matrix_text(m: np.ndarray, indent: str = "  ") -> list[str]:
    cells = [[_fmt(v) for v in row] for row in np.atleast_2d(m)]
    width = max((len(c) for row in cells for c in row), default=1)
    return [indent + " ".join(c.rjust(width) for c in row) for row in cells]


def _form_text(vec: np.ndarray, labels: list[str]) -> str:
    terms = [f"({_fmt(v)}){lbl}" for v, lbl in zip(vec, labels) if abs(v) >= CHOP]
    return " + ".join(terms) if terms else "0"


def _two_form_text(mat: np.ndarray, labels: list[str]) -> str:
    n = mat.shape[0]
    terms = [
        f"({_fmt(mat[i, j])}){labels[i]}^{labels[j]}"
        for i in range(n) for j in range(i + 1, n) if abs(mat[i, j]) >= CHOP
    ]
    return " + ".join(terms) if terms else "0"


def format_text(r: Report) -> str:
    dim = r.nijenhuis.shape[0]
    n = dim // 2
    co = [f"{r.frame_tag}^{i + 1}" for i in range(dim)]
    lines = [f"== {r.name or 'unnamed spec'} ==", f"frame: {r.frame_tag}"]
    if r.params:
        lines.append("params: " + ", ".join(f"{k}={v:g}" for k, v in sorted(r.params.items())))
    c = r.classification
    lines.append(f"classification: {c['label']} (integrable={c['integrable']}, almost_kahler={c['almost_kahler']}, "
                 f"quasi_kahler={c['quasi_kahler']})")
    lines.append("")
    lines.append("Nijenhuis tensor N(E_a, E_b):")
    for a in range(dim):
        for b in range(a + 1, dim):
            v = r.nijenhuis[a, b]
            if np.abs(v).max() >= CHOP:
                lines.append(f"  N({r.frame_tag}{a + 1}, {r.frame_tag}{b + 1}) = "
                             + _form_text(v, [f"{r.frame_tag}{k + 1}" for k in range(dim)]))
    lines.append("")
    lines.append("real connection forms omega^i_j (canonical):")
    for i in range(dim):
        for j in range(dim):
            if np.abs(r.connection_real[i, j]).max() >= CHOP:
                lines.append(f"  omega^{i + 1}_{j + 1} = " + _form_text(r.connection_real[i, j], co))
    lines.append("")
    lines.append("complex connection forms theta^i_j (unitary frame):")
    for i in range(n):
        for j in range(n):
            lines.append(f"  theta^{i + 1}_{j + 1} = " + _form_text(r.theta[i, j], co))
    lines.append("")
    lines.append("torsion forms Theta^i:")
    for i in range(n):
        lines.append(f"  Theta^{i + 1} = " + _two_form_text(r.complex_torsion[i], co))
    lines.append("")
    lines.append("curvature forms Psi^i_j:")
    for i in range(n):
        for j in range(n):
            lines.append(f"  Psi^{i + 1}_{j + 1} = " + _two_form_text(r.psi[i, j], co))
    lines.append("")
    lines.append("nonzero R^i_{j k lbar}:")
    for idx in zip(*np.nonzero(np.abs(r.psi11) >= CHOP)):
        i, j, k, l = (x + 1 for x in idx)
        lines.append(f"  R^{i}_{{{j}{k}{l}bar}} = {_fmt(r.psi11[idx])}")
    lines.append("")
    lines.append("real Ricci (component-table trace):")
    lines += _matrix_text(r.ricci_real)
    lines.append(f"real scalar curvature: {_fmt(r.scal_real)}")
    lines.append(f"real scalar curvature (full antisymmetric trace): {_fmt(r.scal_real_full)}")
    lines.append("complex Ricci R_{k lbar}:")
    lines += _matrix_text(r.ricci_complex)
    lines.append(f"complex scalar curvature: {_fmt(r.scal_complex)}")
    lines.append("")
    lines.append("residuals:")
    for k, v in r.residuals.items():
        lines.append(f"  {k}: {v:.3e}")
    if r.plurigenus is not None:
        p = r.plurigenus
        lines.append("")
        lines.append(f"plurigenera (delta = {_fmt(p['delta'])}):")
        lines.append("  " + ", ".join(f"P_{m}={v}" for m, v in p["plurigenera"].items()))
        kappa = "-inf" if p["kappa"] == -math.inf else f"{p['kappa']:g}"
        lines.append(f"  kappa = {kappa}")
        if p["resonant_powers"]:
            lines.append(f"  note: first-order resonance at powers {p['resonant_powers']}")
        lines.append(f"  elliptic symbol: {p['elliptic']} (min eigenvalue {p['symbol_min_eigenvalue']:.6g})")
    if r.verification is not None:
        v = r.verification
        lines.append("")
        lines.append(f"verification (tol {v.tol:g}): {'PASS' if v.passed else 'FAIL'}")
        for item in v.items:
            lines.append(f"  {'ok  ' if item.passed else 'FAIL'} {item.name}: residual {item.residual:.3e}")
    return "\n".join(lines) + "\n"


__all__ = [
    "DEFAULT_TOL",
    "PipelineOptions",
    "Report",
    "VerificationItem",
    "VerificationResult",
    "analyze",
    "default_tolerance",
    "expected_for",
    "jsonable",
    "load_spec",
    "parse_spec",
    "run_pipeline",
    "verify",
    "working_frame",
]
