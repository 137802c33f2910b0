"""Almost-Hermitian geometry of invariant structures.

Everything here acts on constant-coefficient data in a global frame: an
almost complex structure is a matrix ``J`` with ``J E_j = sum_i J[i, j] E_i``,
a metric is a Gram matrix ``g[i, j] = g(E_i, E_j)`` and a connection is the
array ``gamma[i, j, k] = E^k(nabla_{E_i} E_j)``.

The canonical connection is ``D_X Y = (nabla_X Y - J nabla_X JY) / 2`` built
from the Levi-Civita connection.  Complex quantities (connection forms,
torsion forms, curvature forms) are expressed in an ``h``-unitary frame
``z_k = (E'_{2k-1} - i E'_{2k}) / sqrt(2)`` of ``T^{1,0}`` coming from an
orthonormal J-adapted real frame ``E'``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from akgeo.algebra import (
    FrameChange,
    InvariantAlgebra,
    InvariantForm,
    VectorValuedForm,
    _contract,
    change_frame,
    exterior_derivative,
    wedge,
)
from akgeo.errors import FrameMismatchError, InvariantViolation

FRAME_TOL = 1e-12
CONNECTION_TOL = 1e-10
COMPOSITE_TOL = 1e-9
POSITIVITY_BOUND = 1e-10

SQRT1_2 = math.sqrt(0.5)


def standard_complex_structure(dim: int) -> np.ndarray:
    """Block-diagonal J with ``J E_{2k-1} = E_{2k}`` (1-based)."""
    J = np.zeros((dim, dim))
    for k in range(0, dim, 2):
        J[k + 1, k] = 1.0
        J[k, k + 1] = -1.0
    return J


@dataclass(frozen=True, eq=False)
class AlmostComplexStructure:
    matrix: np.ndarray
    frame_tag: str = "E"

    def __post_init__(self):
        J = np.array(self.matrix, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1] or J.shape[0] % 2:
            raise InvariantViolation(f"J must be a square matrix of even size, got shape {J.shape}")
        residual = float(np.abs(J @ J + np.eye(len(J))).max())
        if residual >= FRAME_TOL:
            raise InvariantViolation(f"J^2 + I has residual {residual:.3e}", residual)
        J.setflags(write=False)
        object.__setattr__(self, "matrix", J)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def p10(self) -> np.ndarray:
        """Projection onto T^{1,0}: ``(I - iJ) / 2``."""
        return 0.5 * (np.eye(self.dim) - 1j * self.matrix)

    @property
    def p01(self) -> np.ndarray:
        return 0.5 * (np.eye(self.dim) + 1j * self.matrix)

    def in_frame(self, fc: FrameChange) -> "AlmostComplexStructure":
        if fc.source != self.frame_tag:
            raise FrameMismatchError(f"J in frame {self.frame_tag!r}, change from {fc.source!r}")
        return AlmostComplexStructure(np.real_if_close(fc.inverse @ self.matrix @ fc.matrix).real, fc.target)

    def holomorphic_coframe(self) -> np.ndarray:
        """Rows spanning the (1,0)-covectors, i.e. ``zeta J = i zeta``."""
        # rows of (I - iJ) satisfy the eigen-relation; orth() picks a basis
        basis = scipy.linalg.orth((np.eye(self.dim) - 1j * self.matrix).T)
        return basis.T


@dataclass(frozen=True, eq=False)
class MetricData:
    """Riemannian metric with its fundamental 2-form ``omega(X, Y) = g(JX, Y)``."""

    g: np.ndarray
    omega: InvariantForm
    frame_tag: str = "E"

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        asym = float(np.abs(g - g.T).max())
        if asym > FRAME_TOL:
            raise InvariantViolation(f"metric is not symmetric (residual {asym:.3e})", asym)
        low = float(np.linalg.eigvalsh(g).min())
        if low <= POSITIVITY_BOUND:
            raise InvariantViolation(f"metric is not positive definite (smallest eigenvalue {low:.3e})", low)
        if self.omega.frame_tag != self.frame_tag:
            raise FrameMismatchError("omega and g live in different frames")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @classmethod
    def from_metric(cls, g: np.ndarray, J: AlmostComplexStructure) -> "MetricData":
        g = np.asarray(g, dtype=float)
        omega = InvariantForm.from_matrix(J.matrix.T @ g, J.frame_tag)
        return cls(g, omega, J.frame_tag)

    @classmethod
    def from_symplectic(cls, omega: InvariantForm | np.ndarray, J: AlmostComplexStructure) -> "MetricData":
        """Metric ``g(X, Y) = omega(X, JY)``."""
        if isinstance(omega, np.ndarray):
            omega = InvariantForm.from_matrix(omega, J.frame_tag)
        w = omega.to_matrix().real
        return cls(w @ J.matrix, omega, J.frame_tag)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def compatibility_residual(self, J: AlmostComplexStructure) -> float:
        """max |omega(X,Y) - g(JX,Y)| and |g(JX,JY) - g(X,Y)| over frame pairs."""
        w = self.omega.to_matrix()
        r1 = np.abs(w - J.matrix.T @ self.g).max()
        r2 = np.abs(J.matrix.T @ self.g @ J.matrix - self.g).max()
        return float(max(r1, r2))

    def hermitian(self, z: np.ndarray, w: np.ndarray) -> complex:
        """``h(Z, W) = g_C(Z, conj W)``."""
        return complex(np.asarray(z) @ self.g @ np.conj(w))

    def in_frame(self, fc: FrameChange) -> "MetricData":
        g = np.real_if_close(fc.matrix.T @ self.g @ fc.matrix).real
        return MetricData(g, change_frame(self.omega, fc), fc.target)


@dataclass(frozen=True, eq=False)
class AlmostHermitianSpec:
    """An almost-Hermitian structure on an invariant frame: one point in a family.

    ``adapted_frame`` (optional) is a change to an orthonormal frame in which
    J takes the standard block form.
    """

    algebra: InvariantAlgebra
    J: AlmostComplexStructure
    metric: MetricData
    name: str = ""
    family: str | None = None
    params: Mapping[str, float] = field(default_factory=dict)
    adapted_frame: FrameChange | None = None

    def __post_init__(self):
        tags = {self.algebra.frame_tag, self.J.frame_tag, self.metric.frame_tag}
        if len(tags) != 1:
            raise FrameMismatchError(f"spec components live in different frames: {sorted(tags)}")
        if not (self.algebra.dim == self.J.dim == self.metric.dim):
            raise InvariantViolation("algebra, J and metric dimensions differ")
        residual = self.metric.compatibility_residual(self.J)
        if residual >= FRAME_TOL:
            raise InvariantViolation(f"(g, J, omega) not compatible, residual {residual:.3e}", residual)
        if self.adapted_frame is not None:
            check_adapted_frame(self.adapted_frame, self.metric, self.J)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def n(self) -> int:
        return self.algebra.dim // 2

    def in_frame(self, fc: FrameChange) -> "AlmostHermitianSpec":
        """Re-express the whole structure in the frame ``fc.target``."""
        return AlmostHermitianSpec(
            change_frame(self.algebra, fc),
            self.J.in_frame(fc),
            self.metric.in_frame(fc),
            self.name,
            self.family,
            dict(self.params),
            None,
        )


def check_adapted_frame(fc: FrameChange, metric: MetricData, J: AlmostComplexStructure) -> None:
    """Raise unless ``fc`` is g-orthonormal with J in standard block form."""
    M = fc.matrix
    ortho = float(np.abs(M.T @ metric.g @ M - np.eye(len(M))).max())
    if ortho >= FRAME_TOL:
        raise InvariantViolation(f"adapted frame is not orthonormal (residual {ortho:.3e})", ortho)
    block = float(np.abs(fc.inverse @ J.matrix @ M - standard_complex_structure(len(M))).max())
    if block >= FRAME_TOL:
        raise InvariantViolation(f"J is not in standard form on the adapted frame (residual {block:.3e})", block)


def adapted_orthonormal_frame(metric: MetricData, J: AlmostComplexStructure, target: str | None = None) -> FrameChange:
    """Gram-Schmidt in input order, pairing each new vector ``v`` with ``Jv``."""
    g, Jm = metric.g, J.matrix
    dim = metric.dim
    cols: list[np.ndarray] = []
    for k in range(dim):
        if len(cols) == dim:
            break
        v = np.eye(dim)[k]
        for c in cols:
            v = v - (c @ g @ v) * c
        norm = math.sqrt(max(v @ g @ v, 0.0))
        if norm < 1e-8:
            continue
        v = v / norm
        cols.extend([v, Jm @ v])
    fc = FrameChange(np.column_stack(cols), metric.frame_tag, target or metric.frame_tag + "'")
    check_adapted_frame(fc, metric, J)
    return fc


# -- Nijenhuis tensor and classification ------------------------------------

def nijenhuis_tensor(J: AlmostComplexStructure, alg: InvariantAlgebra) -> np.ndarray:
    """``N[a, b, :]`` = components of ``N(E_a, E_b)``."""
    if J.frame_tag != alg.frame_tag:
        raise FrameMismatchError(f"J in {J.frame_tag!r}, algebra in {alg.frame_tag!r}")
    c, Jm = alg.tensor, J.matrix
    # br[a,b] = [E_a, E_b]; JX for X = E_a is column a of J
    br = c
    br_JJ = np.einsum("ia,jb,ijk->abk", Jm, Jm, c)
    br_JX = np.einsum("ia,ibk->abk", Jm, c)
    br_XJ = np.einsum("jb,ajk->abk", Jm, c)
    return br_JJ - np.einsum("lk,abk->abl", Jm, br_JX + br_XJ) - br


def nijenhuis(J: AlmostComplexStructure, alg: InvariantAlgebra) -> VectorValuedForm:
    """``N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]`` as a TM-valued 2-form."""
    return VectorValuedForm.from_tensor(nijenhuis_tensor(J, alg), alg.frame_tag, alg.frame_tag)


@dataclass(frozen=True)
class Classification:
    integrable: bool
    almost_kahler: bool
    quasi_kahler: bool
    nijenhuis_norm: float
    domega_norm: float
    quasi_kahler_residual: float

    @property
    def label(self) -> str:
        if self.integrable and self.almost_kahler:
            return "kahler"
        if self.almost_kahler:
            return "almost_kahler"
        if self.quasi_kahler:
            return "quasi_kahler"
        return "integrable" if self.integrable else "none"


def classify(J: AlmostComplexStructure, metric: MetricData, alg: InvariantAlgebra) -> Classification:
    """Integrability, almost-Kähler and quasi-Kähler flags.

    The quasi-Kähler test is Gauduchon's criterion
    ``(nabla_JX J) Y = -J (nabla_X J) Y`` for the Levi-Civita connection.
    """
    residual = metric.compatibility_residual(J)
    if residual >= FRAME_TOL:
        raise InvariantViolation(f"incompatible (g, J, omega): residual {residual:.3e}", residual)
    N = nijenhuis_tensor(J, alg)
    scale = max(1.0, float(np.abs(alg.tensor).max(initial=0.0)))
    n_norm = float(np.abs(N).max(initial=0.0))
    domega = exterior_derivative(metric.omega, alg).norm()
    lc = levi_civita(metric, alg)
    A = lc.operators
    nablaJ = np.array([A[i] @ J.matrix - J.matrix @ A[i] for i in range(alg.dim)])
    # (nabla J)_{J E_i} = sum_m J[m, i] (nabla J)_{E_m}
    nablaJ_J = np.einsum("mi,mkl->ikl", J.matrix, nablaJ)
    qk = float(np.abs(nablaJ_J + np.einsum("kl,ilj->ikj", J.matrix, nablaJ)).max(initial=0.0))
    result = Classification(
        integrable=n_norm <= FRAME_TOL * scale,
        almost_kahler=domega <= FRAME_TOL * scale,
        quasi_kahler=qk < CONNECTION_TOL * scale,
        nijenhuis_norm=n_norm,
        domega_norm=domega,
        quasi_kahler_residual=qk,
    )
    if result.almost_kahler and not result.quasi_kahler:
        raise InvariantViolation(f"almost Kähler but quasi-Kähler test failed (residual {qk:.3e})", qk)
    return result


# -- real connections ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealConnection:
    """Invariant linear connection, ``gamma[i, j, k] = E^k(nabla_{E_i} E_j)``."""

    gamma: np.ndarray
    frame_tag: str = "E"
    kind: str = "levi_civita"

    def __post_init__(self):
        if self.kind not in ("levi_civita", "canonical"):
            raise ValueError(f"unknown connection kind {self.kind!r}")
        gamma = np.array(self.gamma)
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    @property
    def operators(self) -> np.ndarray:
        """``A[i]`` is the matrix of ``nabla_{E_i}`` on constant vectors."""
        return np.transpose(self.gamma, (0, 2, 1))

    def covariant(self, x: Sequence[complex], y: Sequence[complex]) -> np.ndarray:
        """``nabla_X Y`` for constant-coefficient (possibly complex) X, Y."""
        return np.einsum("i,ikj,j->k", np.asarray(x), self.operators, np.asarray(y))

    def connection_forms(self) -> tuple[tuple[InvariantForm, ...], ...]:
        """Real connection matrix ``omega^k_j = sum_i gamma[i, j, k] E^i``."""
        n = self.dim
        return tuple(
            tuple(InvariantForm.from_covector(self.gamma[:, j, k], self.frame_tag) for j in range(n)) for k in range(n)
        )

    def metric_residual(self, g: np.ndarray) -> float:
        A = self.operators
        return float(max(np.abs(A[i].T @ g + g @ A[i]).max() for i in range(self.dim)))

    def complex_residual(self, J: np.ndarray) -> float:
        A = self.operators
        return float(max(np.abs(A[i] @ J - J @ A[i]).max() for i in range(self.dim)))

    def torsion_tensor(self, alg: InvariantAlgebra) -> np.ndarray:
        """``T[a, b, :]`` = components of ``nabla_a E_b - nabla_b E_a - [E_a, E_b]``."""
        return self.gamma - np.transpose(self.gamma, (1, 0, 2)) - alg.tensor

    def curvature_operator(self, alg: InvariantAlgebra) -> np.ndarray:
        """``R[a, b]`` = matrix of ``[nabla_a, nabla_b] - nabla_[E_a,E_b]``."""
        A = self.operators
        comm = np.einsum("akl,blm->abkm", A, A) - np.einsum("bkl,alm->abkm", A, A)
        return comm - np.einsum("abm,mkl->abkl", alg.tensor, A)


def levi_civita(metric: MetricData, alg: InvariantAlgebra) -> RealConnection:
    """Koszul formula for an invariant metric.

    In an orthonormal frame this is
    ``g(nabla_i E_j, E_k) = (g([E_i,E_j],E_k) - g([E_j,E_k],E_i) - g([E_i,E_k],E_j)) / 2``;
    for a general constant Gram matrix the same expression is raised with
    ``g^{-1}``.
    """
    if metric.frame_tag != alg.frame_tag:
        raise FrameMismatchError(f"metric in {metric.frame_tag!r}, algebra in {alg.frame_tag!r}")
    g, c = metric.g, alg.tensor
    low = np.einsum("ijl,lk->ijk", c, g)  # g([E_i,E_j], E_k)
    koszul = 0.5 * (low - np.einsum("jki->ijk", low) - np.einsum("ikj->ijk", low))
    gamma = np.einsum("kl,ijl->ijk", np.linalg.inv(g), koszul)
    if not np.iscomplexobj(c):
        gamma = gamma.real
    return RealConnection(gamma, alg.frame_tag, "levi_civita")


def canonical_connection(lc: RealConnection, J: AlmostComplexStructure) -> RealConnection:
    """``D_X Y = (nabla_X Y - J nabla_X (JY)) / 2``."""
    if lc.kind != "levi_civita":
        raise InvariantViolation("canonical_connection expects the Levi-Civita connection")
    if lc.frame_tag != J.frame_tag:
        raise FrameMismatchError(f"connection in {lc.frame_tag!r}, J in {J.frame_tag!r}")
    Jm = J.matrix
    A = lc.operators
    D = np.array([0.5 * (A[i] - Jm @ A[i] @ Jm) for i in range(lc.dim)])
    return RealConnection(np.transpose(D, (0, 2, 1)), lc.frame_tag, "canonical")


# -- complex frames -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComplexFrameData:
    """Unitary (1,0)-frame: ``vectors[:, k]`` is z_k and ``coframe[k]`` is z^k,
    both as complex components over the real frame ``frame_tag``."""

    vectors: np.ndarray
    coframe: np.ndarray
    frame_tag: str = "E"
    real_frame: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def coframe_forms(self) -> tuple[InvariantForm, ...]:
        return tuple(InvariantForm.from_covector(row, self.frame_tag) for row in self.coframe)

    def conj_coframe_forms(self) -> tuple[InvariantForm, ...]:
        return tuple(InvariantForm.from_covector(row.conj(), self.frame_tag) for row in self.coframe)

    def full_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """(rows z^1..z^n, zbar^1..zbar^n; columns z_1..z_n, zbar_1..zbar_n)."""
        return (
            np.vstack([self.coframe, self.coframe.conj()]),
            np.hstack([self.vectors, self.vectors.conj()]),
        )

    def unitarity_residual(self, metric: MetricData) -> float:
        h = self.vectors.T @ metric.g @ self.vectors.conj()
        dual = self.coframe @ self.vectors
        mixed = self.coframe @ self.vectors.conj()
        return float(max(np.abs(h - np.eye(self.n)).max(), np.abs(dual - np.eye(self.n)).max(), np.abs(mixed).max()))


def unitary_frame(
    metric: MetricData, J: AlmostComplexStructure, adapted: FrameChange | None = None
) -> ComplexFrameData:
    """``z_k = (E'_{2k-1} - i E'_{2k}) / sqrt(2)`` from an orthonormal adapted frame.

    If ``adapted`` is omitted, one is built by J-paired Gram-Schmidt.
    """
    if metric.frame_tag != J.frame_tag:
        raise FrameMismatchError(f"metric in {metric.frame_tag!r}, J in {J.frame_tag!r}")
    if adapted is None:
        adapted = adapted_orthonormal_frame(metric, J)
    else:
        if adapted.source != metric.frame_tag:
            raise FrameMismatchError(f"adapted frame starts from {adapted.source!r}, not {metric.frame_tag!r}")
        check_adapted_frame(adapted, metric, J)
    M, Minv = adapted.matrix, adapted.inverse
    n = metric.dim // 2
    vectors = np.column_stack([SQRT1_2 * (M[:, 2 * k] - 1j * M[:, 2 * k + 1]) for k in range(n)])
    coframe = np.vstack([SQRT1_2 * (Minv[2 * k] + 1j * Minv[2 * k + 1]) for k in range(n)])
    cf = ComplexFrameData(vectors, coframe, metric.frame_tag, np.array(M))
    residual = cf.unitarity_residual(metric)
    if residual >= FRAME_TOL:
        raise InvariantViolation(f"frame is not h-unitary (residual {residual:.3e})", residual)
    return cf


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    """``theta[i][j]`` is the 1-form with ``nabla z_j = sum_i theta^i_j z_i``."""

    theta: tuple[tuple[InvariantForm, ...], ...]

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def frame_tag(self) -> str:
        return self.theta[0][0].frame_tag

    def __getitem__(self, ij: tuple[int, int]) -> InvariantForm:
        i, j = ij
        return self.theta[i][j]

    def as_array(self) -> np.ndarray:
        """``out[i, j, a] = theta^i_j(E_a)``."""
        return np.array([[f.to_vector() for f in row] for row in self.theta])

    def skew_hermitian_residual(self) -> float:
        arr = self.as_array()
        return float(np.abs(arr + np.conj(np.transpose(arr, (1, 0, 2)))).max())


def connection_forms(conn: RealConnection, cf: ComplexFrameData, J: AlmostComplexStructure | None = None) -> ConnectionMatrix:
    """Connection 1-forms of a J-parallel connection in a unitary frame.

    Computed directly from the connection coefficients:
    ``theta^i_j(E_a) = z^i(nabla_{E_a} z_j)``.
    """
    if conn.kind != "canonical":
        raise InvariantViolation("connection_forms needs the canonical connection")
    if conn.frame_tag != cf.frame_tag:
        raise FrameMismatchError(f"connection in {conn.frame_tag!r}, frame data in {cf.frame_tag!r}")
    if J is not None:
        res = conn.complex_residual(J.matrix)
        if res >= CONNECTION_TOL:
            raise InvariantViolation(f"connection does not preserve J (residual {res:.3e})", res)
    A = conn.operators
    arr = np.einsum("ik,akl,lj->ija", cf.coframe, A, cf.vectors)
    n = cf.n
    theta = tuple(tuple(InvariantForm.from_covector(arr[i, j], cf.frame_tag) for j in range(n)) for i in range(n))
    return ConnectionMatrix(theta)


def torsion_forms(theta: ConnectionMatrix, cf: ComplexFrameData, alg: InvariantAlgebra) -> tuple[InvariantForm, ...]:
    """First structure equation ``Theta^i = dz^i + sum_j theta^i_j ^ z^j``."""
    if theta.frame_tag != alg.frame_tag or cf.frame_tag != alg.frame_tag:
        raise FrameMismatchError("theta, frame data and algebra must share a frame")
    z = cf.coframe_forms()
    out = []
    for i in range(cf.n):
        acc = exterior_derivative(z[i], alg)
        for j in range(cf.n):
            acc = acc + wedge(theta[i, j], z[j])
        out.append(acc)
    return tuple(out)


def holomorphic_torsion_from_nijenhuis(
    J: AlmostComplexStructure, alg: InvariantAlgebra, cf: ComplexFrameData
) -> tuple[InvariantForm, ...]:
    """``Theta^i = z^i(N(., .)) / 4``: the quarter-Nijenhuis route."""
    N = nijenhuis_tensor(J, alg)
    comp = 0.25 * np.einsum("ik,abk->iab", cf.coframe, N)
    return tuple(InvariantForm.from_matrix(comp[i], alg.frame_tag) for i in range(cf.n))


def holomorphic_torsion_from_brackets(
    J: AlmostComplexStructure, alg: InvariantAlgebra, cf: ComplexFrameData
) -> tuple[InvariantForm, ...]:
    """``Theta^i(X, Y) = -z^i([pi^{0,1} X, pi^{0,1} Y])`` on frame pairs."""
    P = J.p01
    br = np.einsum("ia,jb,ijk->abk", P, P, alg.tensor)
    comp = -np.einsum("ik,abk->iab", cf.coframe, br)
    return tuple(InvariantForm.from_matrix(comp[i], alg.frame_tag) for i in range(cf.n))


# -- type decomposition -------------------------------------------------------

def form_type_parts(form: InvariantForm, J: AlmostComplexStructure, holomorphic: np.ndarray | None = None) -> dict[tuple[int, int], InvariantForm]:
    """Split a complex form into its (p, q) components.

    ``holomorphic`` optionally supplies rows spanning the (1,0)-covectors;
    the split does not depend on which basis is used.
    """
    if form.frame_tag != J.frame_tag:
        raise FrameMismatchError(f"form in {form.frame_tag!r}, J in {J.frame_tag!r}")
    n = J.dim // 2
    Z = J.holomorphic_coframe() if holomorphic is None else np.asarray(holomorphic)
    F = np.vstack([Z, Z.conj()])
    Finv = np.linalg.inv(F)
    deg = form.degree
    if deg == 0:
        return {(0, 0): form}
    T = _contract(form.to_tensor(), Finv)  # components in the basis (z_a, zbar_a)
    barred = np.indices((2 * n,) * deg) >= n
    nbar = barred.sum(axis=0)
    parts = {}
    for q in range(deg + 1):
        masked = np.where(nbar == q, T, 0)
        parts[(deg - q, q)] = InvariantForm.from_tensor(_contract(masked, F), form.frame_tag)
    return parts


@dataclass(frozen=True, eq=False)
class TypeParts:
    f20: object
    f11: object
    f02: object

    def __iter__(self):
        return iter((self.f20, self.f11, self.f02))


def type_decompose(obj: InvariantForm | VectorValuedForm, J: AlmostComplexStructure) -> TypeParts:
    """(2,0), (1,1) and (0,2) parts of a 2-form.

    A TM-valued real 2-form is split by the type of the form part of its
    complex-linear extension with values in (TM, J) ~ T^{1,0}; each part is
    returned as a real TM-valued form so that the three parts sum to the
    input.  Scalar (possibly complex) forms, and forms already valued in a
    complex bundle, are split componentwise.
    """
    if obj.degree != 2:
        raise ValueError(f"type_decompose expects a 2-form, got degree {obj.degree}")
    if isinstance(obj, InvariantForm):
        parts = form_type_parts(obj, J)
        return TypeParts(parts[(2, 0)], parts[(1, 1)], parts[(0, 2)])
    if obj.value_tag != obj.frame_tag:
        split = [form_type_parts(c, J) for c in obj.components]
        return TypeParts(*(VectorValuedForm(tuple(s[pq] for s in split), obj.value_tag) for pq in ((2, 0), (1, 1), (0, 2))))
    # xi(v) = pi^{1,0} v identifies (TM, J) with T^{1,0}; its inverse is 2 Re
    P = J.p10
    T = obj.to_tensor()
    xi_T = np.einsum("kl,abl->abk", P, T)
    comps = [form_type_parts(InvariantForm.from_matrix(xi_T[..., k], obj.frame_tag), J) for k in range(obj.dim)]
    out = []
    for pq in ((2, 0), (1, 1), (0, 2)):
        arr = np.stack([c[pq].to_matrix() for c in comps], axis=-1)
        out.append(VectorValuedForm.from_tensor(2 * arr.real, obj.frame_tag, obj.value_tag))
    return TypeParts(*out)


def dbar(form: InvariantForm, alg: InvariantAlgebra, J: AlmostComplexStructure) -> InvariantForm:
    """``dbar = pi^{p, q+1} o d`` applied to each (p, q) component."""
    out = InvariantForm.zero(form.degree + 1, form.dim, form.frame_tag)
    Z = J.holomorphic_coframe()
    for (p, q), part in form_type_parts(form, J, Z).items():
        if part.is_zero():
            continue
        out = out + form_type_parts(exterior_derivative(part, alg), J, Z)[(p, q + 1)]
    return out


# -- curvature ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurvatureReport:
    """Curvature of the canonical connection, complex and real halves.

    Complex half: ``psi[i][j]`` are the curvature 2-forms, ``psi11[i, j, k, l]``
    = ``R^i_{j k lbar}``, ``ricci_complex[k, l] = sum_i R^i_{i k lbar}``.

    Real half: ``omega_real[i][j]`` are the real curvature 2-forms in an
    orthonormal frame and ``real_components[i, j, k, l] = Omega^i_j(E_k, E_l)``.
    ``ricci_real`` traces the component table ``R^i_{jkl}`` read off as the
    coefficient of ``E^k ^ E^l`` with ``k < l`` (entries with ``k >= l`` are
    not part of the table): ``R_ij = sum_{k<j} R^k_{ikj}``.  ``ricci_real_full``
    is the trace ``sum_k Omega^k_i(E_k, E_j)`` of the antisymmetric tensor.
    The two agree only when the curvature has the pair symmetries of a
    torsion-free connection, so both are kept.
    """

    psi: tuple[tuple[InvariantForm, ...], ...] | None = None
    psi11: np.ndarray | None = None
    ricci_complex: np.ndarray | None = None
    scal_complex: float | None = None
    omega_real: tuple[tuple[InvariantForm, ...], ...] | None = None
    real_components: np.ndarray | None = None
    ricci_real: np.ndarray | None = None
    scal_real: float | None = None
    ricci_real_full: np.ndarray | None = None
    scal_real_full: float | None = None

    def merged(self, other: "CurvatureReport") -> "CurvatureReport":
        kw = {}
        for name in self.__dataclass_fields__:
            mine = getattr(self, name)
            kw[name] = mine if mine is not None else getattr(other, name)
        return CurvatureReport(**kw)

    def psi_array(self) -> np.ndarray:
        """``out[i, j, a, b] = Psi^i_j(E_a, E_b)``."""
        return np.array([[f.to_matrix() for f in row] for row in self.psi])

    def skew_hermitian_residual(self) -> float:
        arr = self.psi_array()
        return float(np.abs(arr + np.conj(np.transpose(arr, (1, 0, 2, 3)))).max())

    def scal_from_components(self) -> float:
        """``sum_{i,k} R^i_{i k kbar}`` read straight from ``psi11``."""
        total = 0j
        n = self.psi11.shape[0]
        for i in range(n):
            for k in range(n):
                total += self.psi11[i, i, k, k]
        return float(total.real)


def curvature(theta: ConnectionMatrix, alg: InvariantAlgebra, cf: ComplexFrameData) -> CurvatureReport:
    """Second structure equation ``Psi = d theta + theta ^ theta`` and its traces."""
    if theta.frame_tag != alg.frame_tag or cf.frame_tag != alg.frame_tag:
        raise FrameMismatchError("theta, frame data and algebra must share a frame")
    n = theta.n
    psi = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = exterior_derivative(theta[i, j], alg)
            for k in range(n):
                acc = acc + wedge(theta[i, k], theta[k, j])
            row.append(acc)
        psi.append(tuple(row))
    psi = tuple(psi)
    arr = np.array([[f.to_matrix() for f in row] for row in psi])
    psi11 = np.einsum("ijab,ak,bl->ijkl", arr, cf.vectors, cf.vectors.conj())
    ricci = np.einsum("iikl->kl", psi11)
    scal = np.trace(ricci)
    if abs(scal.imag) > CONNECTION_TOL * max(1.0, abs(scal)):
        raise InvariantViolation(f"complex scalar curvature has imaginary part {scal.imag:.3e}", abs(scal.imag))
    return CurvatureReport(psi=psi, psi11=psi11, ricci_complex=ricci, scal_complex=float(scal.real))


def psi11_from_operator(conn: RealConnection, alg: InvariantAlgebra, cf: ComplexFrameData) -> np.ndarray:
    """``R^i_{j k lbar} = z^i(R(z_k, zbar_l) z_j)`` from the curvature operator."""
    R = conn.curvature_operator(alg)
    Rc = np.einsum("abij,ak,bl->klij", R, cf.vectors, cf.vectors.conj())
    return np.einsum("ip,klpq,qj->ijkl", cf.coframe, Rc, cf.vectors)


def real_curvature(conn: RealConnection, alg: InvariantAlgebra, metric: MetricData) -> CurvatureReport:
    """``Omega = d omega + omega ^ omega`` in an orthonormal frame, with Ricci traces."""
    if conn.kind != "canonical":
        raise InvariantViolation("real_curvature expects the canonical connection")
    if not (conn.frame_tag == alg.frame_tag == metric.frame_tag):
        raise FrameMismatchError("connection, algebra and metric must share a frame")
    ortho = float(np.abs(metric.g - np.eye(metric.dim)).max())
    if ortho >= FRAME_TOL:
        raise InvariantViolation(
            f"real curvature components need an orthonormal frame (g - I residual {ortho:.3e})", ortho
        )
    w = conn.connection_forms()
    n = conn.dim
    omega = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = exterior_derivative(w[i][j], alg)
            for k in range(n):
                acc = acc + wedge(w[i][k], w[k][j])
            row.append(acc)
        omega.append(tuple(row))
    omega = tuple(omega)
    comps = np.array([[f.to_matrix().real for f in row] for row in omega])
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    table = np.where(upper[None, None], comps, 0.0)
    ricci = np.einsum("kikj->ij", table)
    ricci_full = np.einsum("kikj->ij", comps)
    return CurvatureReport(
        omega_real=omega,
        real_components=comps,
        ricci_real=ricci,
        scal_real=float(np.trace(ricci)),
        ricci_real_full=ricci_full,
        scal_real_full=float(np.trace(ricci_full)),
    )


__all__ = [
    "AlmostComplexStructure",
    "MetricData",
    "AlmostHermitianSpec",
    "RealConnection",
    "ComplexFrameData",
    "ConnectionMatrix",
    "CurvatureReport",
    "Classification",
    "TypeParts",
    "standard_complex_structure",
    "adapted_orthonormal_frame",
    "check_adapted_frame",
    "nijenhuis",
    "nijenhuis_tensor",
    "classify",
    "levi_civita",
    "canonical_connection",
    "unitary_frame",
    "connection_forms",
    "torsion_forms",
    "holomorphic_torsion_from_nijenhuis",
    "holomorphic_torsion_from_brackets",
    "form_type_parts",
    "type_decompose",
    "dbar",
    "curvature",
    "psi11_from_operator",
    "real_curvature",
]
