"""Exterior calculus of left-invariant forms on a Lie group.

A Lie algebra is given by structure constants in a global frame
``E_1, ..., E_N``::

    [E_i, E_j] = sum_k c^k_ij E_k

and an invariant form is a constant-coefficient combination of wedge
monomials in the dual coframe.  Forms are evaluated with the determinant
convention, ``(E^i ^ E^j)(E_i, E_j) = 1``, and the exterior derivative on
1-forms is fixed by ``dE^k(E_i, E_j) = -E^k([E_i, E_j])``.

Indices are 0-based throughout the Python API; labels (``"E1"``...) are for
display only.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from akgeo.errors import FrameMismatchError, InvariantViolation

ZERO_TOL = 1e-13

MultiIndex = tuple[int, ...]


def sort_with_sign(idx: Sequence[int]) -> tuple[MultiIndex, int]:
    """Sort a multi-index, returning the sorted tuple and the permutation sign.

    The sign is 0 when an index repeats (the wedge monomial vanishes).
    """
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return tuple(sorted(idx)), 0
    sign = 1
    # insertion sort; each swap flips the sign
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


def _contract(tensor: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Apply ``matrix`` on every axis: out[b..] = sum T[a..] M[a,b]..."""
    out = tensor
    for _ in range(tensor.ndim):
        out = np.tensordot(out, matrix, axes=([0], [0]))
    return out


@dataclass(frozen=True, eq=False)
class InvariantForm:
    """A constant-coefficient exterior form over a labeled coframe.

    Attributes:
        degree: Form degree ``p``.
        dim: Dimension of the underlying frame.
        coeffs: Map from strictly increasing index tuples to complex
            coefficients.  Build instances through :meth:`from_terms` (or the
            other constructors) so that this invariant holds.
        frame_tag: Identifier of the coframe the coefficients refer to.
    """

    degree: int
    dim: int
    coeffs: Mapping[MultiIndex, complex]
    frame_tag: str = "E"

    @classmethod
    def from_terms(
        cls,
        terms: Mapping[Sequence[int], complex] | Iterable[tuple[Sequence[int], complex]],
        degree: int,
        dim: int,
        frame_tag: str = "E",
        tol: float = ZERO_TOL,
    ) -> "InvariantForm":
        """Canonicalize arbitrary index tuples (sorted with sign) and prune zeros."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[MultiIndex, complex] = {}
        for idx, value in items:
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} has length {len(idx)}, expected degree {degree}")
            if any(i < 0 or i >= dim for i in idx):
                raise IndexError(f"index {idx} out of range for dimension {dim}")
            key, sign = sort_with_sign(idx)
            if sign == 0:
                continue
            acc[key] = acc.get(key, 0j) + sign * complex(value)
        coeffs = {k: v for k, v in sorted(acc.items()) if abs(v) > tol}
        return cls(degree, dim, coeffs, frame_tag)

    @classmethod
    def zero(cls, degree: int, dim: int, frame_tag: str = "E") -> "InvariantForm":
        return cls(degree, dim, {}, frame_tag)

    @classmethod
    def scalar(cls, value: complex, dim: int, frame_tag: str = "E") -> "InvariantForm":
        return cls.from_terms({(): value}, 0, dim, frame_tag)

    @classmethod
    def basis(cls, *indices: int, dim: int, frame_tag: str = "E") -> "InvariantForm":
        """The monomial ``E^{i1} ^ ... ^ E^{ip}``."""
        return cls.from_terms({tuple(indices): 1.0}, len(indices), dim, frame_tag)

    @classmethod
    def from_covector(cls, vec: Sequence[complex], frame_tag: str = "E") -> "InvariantForm":
        vec = np.asarray(vec)
        return cls.from_terms({(i,): v for i, v in enumerate(vec)}, 1, len(vec), frame_tag)

    @classmethod
    def from_tensor(cls, tensor: np.ndarray, frame_tag: str = "E", tol: float = ZERO_TOL) -> "InvariantForm":
        """Read coefficients off a fully antisymmetric component array."""
        tensor = np.asarray(tensor)
        degree, dim = tensor.ndim, (tensor.shape[0] if tensor.ndim else 0)
        if degree == 0:
            raise ValueError("use InvariantForm.scalar for 0-forms")
        terms = {idx: tensor[idx] for idx in itertools.combinations(range(dim), degree)}
        return cls.from_terms(terms, degree, dim, frame_tag, tol)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, frame_tag: str = "E", tol: float = ZERO_TOL) -> "InvariantForm":
        """2-form with ``form(E_i, E_j) = matrix[i, j]`` (matrix antisymmetric)."""
        return cls.from_tensor(matrix, frame_tag, tol)

    # -- dense views --------------------------------------------------------
    def to_tensor(self) -> np.ndarray:
        """Dense array ``T[i1..ip] = form(E_i1, ..., E_ip)``."""
        out = np.zeros((self.dim,) * self.degree, dtype=complex)
        if self.degree == 0:
            out[()] = self.coeffs.get((), 0)
            return out
        perms = list(itertools.permutations(range(self.degree)))
        signs = [sort_with_sign(p)[1] for p in perms]
        for idx, value in self.coeffs.items():
            for perm, sign in zip(perms, signs):
                out[tuple(idx[p] for p in perm)] = sign * value
        return out

    def to_matrix(self) -> np.ndarray:
        if self.degree != 2:
            raise ValueError("to_matrix needs a 2-form")
        return self.to_tensor()

    def to_vector(self) -> np.ndarray:
        if self.degree != 1:
            raise ValueError("to_vector needs a 1-form")
        return self.to_tensor()

    def __call__(self, *vectors: Sequence[complex]) -> complex:
        """Evaluate on ``degree`` (complex) vectors given in the frame."""
        if len(vectors) != self.degree:
            raise ValueError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        out = self.to_tensor()
        for v in vectors:
            out = np.tensordot(np.asarray(v), out, axes=([0], [0]))
        return complex(out)

    # -- algebra ------------------------------------------------------------
    def _check_compatible(self, other: "InvariantForm") -> None:
        if self.frame_tag != other.frame_tag:
            raise FrameMismatchError(f"frame {self.frame_tag!r} vs {other.frame_tag!r}")
        if self.dim != other.dim:
            raise FrameMismatchError(f"dimension {self.dim} vs {other.dim}")

    def __add__(self, other: "InvariantForm") -> "InvariantForm":
        if not isinstance(other, InvariantForm):
            return NotImplemented
        self._check_compatible(other)
        if self.degree != other.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        terms = list(self.coeffs.items()) + list(other.coeffs.items())
        return InvariantForm.from_terms(terms, self.degree, self.dim, self.frame_tag)

    def __neg__(self) -> "InvariantForm":
        return self * -1

    def __sub__(self, other: "InvariantForm") -> "InvariantForm":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "InvariantForm":
        if isinstance(scalar, InvariantForm):
            return NotImplemented
        return InvariantForm.from_terms(
            {k: scalar * v for k, v in self.coeffs.items()}, self.degree, self.dim, self.frame_tag
        )

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "InvariantForm":
        return self * (1 / scalar)

    def __xor__(self, other: "InvariantForm") -> "InvariantForm":
        return wedge(self, other)

    def conj(self) -> "InvariantForm":
        return InvariantForm(self.degree, self.dim, {k: v.conjugate() for k, v in self.coeffs.items()}, self.frame_tag)

    def with_tag(self, frame_tag: str) -> "InvariantForm":
        return InvariantForm(self.degree, self.dim, dict(self.coeffs), frame_tag)

    def norm(self) -> float:
        """Largest coefficient magnitude."""
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return self.norm() <= tol

    def allclose(self, other: "InvariantForm", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol

    def to_string(self, labels: Sequence[str] | None = None, digits: int = 6) -> str:
        if not self.coeffs:
            return "0"
        labels = labels or [str(i + 1) for i in range(self.dim)]
        parts = []
        for idx, v in self.coeffs.items():
            mono = "^".join(f"{labels[i]}" for i in idx) if idx else "1"
            parts.append(f"({_fmt_complex(v, digits)}) {mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"InvariantForm<{self.degree}, {self.frame_tag}>[{self.to_string()}]"


def _fmt_complex(z: complex, digits: int = 6) -> str:
    z = complex(z)
    if abs(z.imag) < 10 ** -(digits + 2):
        return f"{z.real:.{digits}g}"
    if abs(z.real) < 10 ** -(digits + 2):
        return f"{z.imag:.{digits}g}j"
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}j"


def wedge(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    """Exterior product; graded commutative and associative."""
    a._check_compatible(b)
    terms: list[tuple[MultiIndex, complex]] = []
    for ia, va in a.coeffs.items():
        for ib, vb in b.coeffs.items():
            if set(ia) & set(ib):
                continue
            terms.append((ia + ib, va * vb))
    return InvariantForm.from_terms(terms, a.degree + b.degree, a.dim, a.frame_tag)


@dataclass(frozen=True, eq=False)
class VectorValuedForm:
    """A form with values in a vector space with basis ``value_tag``.

    ``components[k]`` is the form multiplying the k-th basis vector; all
    components share degree and coframe.
    """

    components: tuple[InvariantForm, ...]
    value_tag: str = "E"

    def __post_init__(self):
        if not self.components:
            raise ValueError("a vector-valued form needs at least one component")
        first = self.components[0]
        for c in self.components[1:]:
            first._check_compatible(c)
            if c.degree != first.degree:
                raise InvariantViolation("component degrees differ")

    @property
    def degree(self) -> int:
        return self.components[0].degree

    @property
    def frame_tag(self) -> str:
        return self.components[0].frame_tag

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, k: int) -> InvariantForm:
        return self.components[k]

    @classmethod
    def from_tensor(cls, tensor: np.ndarray, frame_tag: str = "E", value_tag: str = "E") -> "VectorValuedForm":
        """From an array whose last axis indexes the value basis."""
        tensor = np.asarray(tensor)
        comps = tuple(InvariantForm.from_tensor(tensor[..., k], frame_tag) for k in range(tensor.shape[-1]))
        return cls(comps, value_tag)

    def to_tensor(self) -> np.ndarray:
        return np.stack([c.to_tensor() for c in self.components], axis=-1)

    def __call__(self, *vectors) -> np.ndarray:
        return np.array([c(*vectors) for c in self.components])

    def __add__(self, other: "VectorValuedForm") -> "VectorValuedForm":
        return VectorValuedForm(tuple(a + b for a, b in zip(self.components, other.components)), self.value_tag)

    def __sub__(self, other: "VectorValuedForm") -> "VectorValuedForm":
        return VectorValuedForm(tuple(a - b for a, b in zip(self.components, other.components)), self.value_tag)

    def __mul__(self, scalar: complex) -> "VectorValuedForm":
        return VectorValuedForm(tuple(scalar * c for c in self.components), self.value_tag)

    __rmul__ = __mul__

    def norm(self) -> float:
        return max(c.norm() for c in self.components)


@dataclass(frozen=True, eq=False)
class InvariantAlgebra:
    """Real Lie algebra presented by structure constants in a global frame.

    ``structure`` maps ``(i, j, k)`` with ``i < j`` to ``c^k_ij``.  Keys with
    ``i > j`` are accepted by :meth:`from_constants` and folded in with a sign.
    Values may be ints, Fractions, floats or (after a complex frame change)
    complex numbers.
    """

    dim: int
    structure: Mapping[tuple[int, int, int], complex]
    frame_labels: tuple[str, ...] = ()
    frame_tag: str = "E"

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 2:
            raise InvariantViolation(f"dimension must be a positive even integer, got {self.dim}")
        for (i, j, k) in self.structure:
            if not all(0 <= x < self.dim for x in (i, j, k)):
                raise IndexError(f"structure key {(i, j, k)} out of range for dimension {self.dim}")
            if i >= j:
                raise InvariantViolation(f"structure key {(i, j, k)} must have i < j")
        if not self.frame_labels:
            object.__setattr__(self, "frame_labels", tuple(f"{self.frame_tag}{i + 1}" for i in range(self.dim)))
        elif len(self.frame_labels) != self.dim:
            raise ValueError("need one label per frame vector")

    @classmethod
    def from_constants(
        cls,
        dim: int,
        constants: Mapping[tuple[int, int, int], complex] | Iterable[tuple[int, int, int, complex]],
        frame_labels: Sequence[str] = (),
        frame_tag: str = "E",
    ) -> "InvariantAlgebra":
        items = constants.items() if isinstance(constants, Mapping) else (((i, j, k), v) for i, j, k, v in constants)
        acc: dict[tuple[int, int, int], complex] = {}
        for (i, j, k), v in items:
            if i == j:
                if v != 0:
                    raise InvariantViolation(f"[E_{i}, E_{i}] must vanish")
                continue
            if i > j:
                i, j, v = j, i, -v
            acc[(i, j, k)] = acc.get((i, j, k), 0) + v
        acc = {key: v for key, v in sorted(acc.items()) if v != 0}
        return cls(dim, acc, tuple(frame_labels), frame_tag)

    @classmethod
    def from_tensor(cls, c: np.ndarray, frame_labels: Sequence[str] = (), frame_tag: str = "E", tol: float = ZERO_TOL):
        dim = c.shape[0]
        consts = {}
        for i, j in itertools.combinations(range(dim), 2):
            for k in range(dim):
                v = c[i, j, k]
                if abs(v) > tol:
                    consts[(i, j, k)] = complex(v) if np.iscomplexobj(c) and abs(v.imag) > tol else float(np.real(v))
        return cls(dim, consts, tuple(frame_labels), frame_tag)

    @cached_property
    def tensor(self) -> np.ndarray:
        """Dense antisymmetric array ``c[i, j, k] = c^k_ij``."""
        complex_vals = any(isinstance(v, complex) for v in self.structure.values())
        c = np.zeros((self.dim,) * 3, dtype=complex if complex_vals else float)
        for (i, j, k), v in self.structure.items():
            c[i, j, k] = v
            c[j, i, k] = -v
        return c

    @cached_property
    def coframe_differentials(self) -> tuple[InvariantForm, ...]:
        """``dE^k = -sum_{i<j} c^k_ij E^i ^ E^j`` for each k."""
        out = []
        for k in range(self.dim):
            terms = {(i, j): -v for (i, j, kk), v in self.structure.items() if kk == k}
            out.append(InvariantForm.from_terms(terms, 2, self.dim, self.frame_tag))
        return tuple(out)

    def is_real(self) -> bool:
        return not any(isinstance(v, complex) and v.imag != 0 for v in self.structure.values())


@dataclass(frozen=True)
class AlgebraDiagnostics:
    jacobi_residual: float
    passed: bool
    exact: bool


def _is_rational(v) -> bool:
    if isinstance(v, (int, Fraction)):
        return True
    return isinstance(v, float) and v.is_integer()


def validate_algebra(alg: InvariantAlgebra, tol: float = 1e-12) -> AlgebraDiagnostics:
    """Check the Jacobi identity on every index triple.

    Integer and Fraction constants are checked in exact arithmetic (the
    verdict then requires a residual of exactly zero); anything else is
    checked in floating point against ``tol``.
    """
    n = alg.dim
    exact = all(_is_rational(v) for v in alg.structure.values())
    if exact:
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j, k), v in alg.structure.items():
            c[i][j][k] = Fraction(v)
            c[j][i][k] = -Fraction(v)
        worst = Fraction(0)
        for i, j, k in itertools.combinations(range(n), 3):
            for out in range(n):
                s = Fraction(0)
                for a, b, cc in ((i, j, k), (j, k, i), (k, i, j)):
                    for m in range(n):
                        if c[a][b][m]:
                            s += c[a][b][m] * c[m][cc][out]
                worst = max(worst, abs(s))
        return AlgebraDiagnostics(float(worst), worst == 0, True)
    c = alg.tensor
    # [[E_i,E_j],E_k] = c^m_ij c^l_mk
    dbl = np.einsum("ijm,mkl->ijkl", c, c)
    jac = dbl + np.einsum("jkil->ijkl", dbl) + np.einsum("kijl->ijkl", dbl)
    residual = float(np.abs(jac).max()) if jac.size else 0.0
    return AlgebraDiagnostics(residual, residual < tol, False)


def bracket(alg: InvariantAlgebra, x: Sequence[complex], y: Sequence[complex]) -> np.ndarray:
    """Lie bracket of two constant-coefficient vectors given in the frame."""
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != (alg.dim,) or y.shape != (alg.dim,):
        raise ValueError(f"expected vectors of length {alg.dim}, got {x.shape} and {y.shape}")
    return np.einsum("i,j,ijk->k", x, y, alg.tensor)


# -- frames -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrameChange:
    """Change from frame ``source`` to frame ``target``.

    Column ``j`` of ``matrix`` holds the components of the new vector ``F_j``
    in the old frame, so the new coframe is given by the rows of the inverse.
    """

    matrix: np.ndarray
    source: str = "E"
    target: str = "F"
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex if np.iscomplexobj(self.matrix) else float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("frame change must be a square matrix")
        if np.linalg.matrix_rank(m) < m.shape[0]:
            raise InvariantViolation("frame change matrix is singular")
        inv = np.linalg.inv(m)
        residual = float(np.abs(m @ inv - np.eye(m.shape[0])).max())
        if residual > 1e-12:
            raise InvariantViolation(f"frame change badly conditioned (M M^-1 residual {residual:.2e})", residual)
        m.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "inverse", inv)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def inverted(self) -> "FrameChange":
        return FrameChange(self.inverse, self.target, self.source)

    def then(self, other: "FrameChange") -> "FrameChange":
        """Compose: first ``self`` then ``other``."""
        if other.source != self.target:
            raise FrameMismatchError(f"cannot compose {self.target!r} -> {other.source!r}")
        return FrameChange(self.matrix @ other.matrix, self.source, other.target)

    @classmethod
    def identity(cls, dim: int, tag: str = "E") -> "FrameChange":
        return cls(np.eye(dim), tag, tag)


@dataclass(frozen=True)
class FrameRegistry:
    """Known frame changes, looked up directly or through their inverse."""

    changes: tuple[FrameChange, ...] = ()

    def register(self, fc: FrameChange) -> "FrameRegistry":
        return FrameRegistry(self.changes + (fc,))

    def find(self, source: str, target: str) -> FrameChange | None:
        for fc in self.changes:
            if fc.source == source and fc.target == target:
                return fc
            if fc.source == target and fc.target == source:
                return fc.inverted()
        return None


def change_frame(obj, fc: FrameChange):
    """Express a form, vector-valued form or algebra in the frame ``fc.target``.

    Forms transform covariantly (contract every slot with the new frame
    vectors); vector values transform with the inverse matrix; structure
    constants mix both.
    """
    if isinstance(obj, InvariantAlgebra):
        if obj.frame_tag != fc.source or obj.dim != fc.dim:
            raise FrameMismatchError(f"algebra in frame {obj.frame_tag!r}, change from {fc.source!r}")
        m, minv = fc.matrix, fc.inverse
        c = np.einsum("ia,jb,ijk,lk->abl", m, m, obj.tensor, minv)
        if not np.iscomplexobj(m) and not np.iscomplexobj(c):
            c = np.real(c)
        labels = tuple(f"{fc.target}{i + 1}" for i in range(obj.dim))
        return InvariantAlgebra.from_tensor(c, labels, fc.target)
    if isinstance(obj, InvariantForm):
        if obj.frame_tag != fc.source or obj.dim != fc.dim:
            raise FrameMismatchError(f"form in frame {obj.frame_tag!r}, change from {fc.source!r}")
        if obj.degree == 0:
            return obj.with_tag(fc.target)
        return InvariantForm.from_tensor(_contract(obj.to_tensor(), fc.matrix), fc.target)
    if isinstance(obj, VectorValuedForm):
        forms = [change_frame(c, fc) for c in obj.components]
        if obj.value_tag == fc.source:
            mixed = []
            for row in fc.inverse:
                acc = InvariantForm.zero(obj.degree, obj.dim, fc.target)
                for coef, form in zip(row, forms):
                    if coef != 0:
                        acc = acc + coef * form
                mixed.append(acc)
            return VectorValuedForm(tuple(mixed), fc.target)
        return VectorValuedForm(tuple(forms), obj.value_tag)
    raise TypeError(f"cannot change frame of {type(obj).__name__}")


def exterior_derivative(
    form: InvariantForm, alg: InvariantAlgebra, registry: FrameRegistry | None = None
) -> InvariantForm:
    """Exterior derivative of an invariant form.

    If the form lives in a different frame than ``alg``, a frame change
    between the two must be registered; otherwise :class:`FrameMismatchError`.
    """
    if form.frame_tag != alg.frame_tag:
        fc = registry.find(alg.frame_tag, form.frame_tag) if registry else None
        if fc is None:
            raise FrameMismatchError(
                f"form in frame {form.frame_tag!r} but algebra in {alg.frame_tag!r} and no registered change"
            )
        return change_frame(exterior_derivative(change_frame(form, fc.inverted()), alg), fc)
    if form.dim != alg.dim:
        raise FrameMismatchError(f"form dimension {form.dim} vs algebra dimension {alg.dim}")
    dE = alg.coframe_differentials
    out = InvariantForm.zero(form.degree + 1, form.dim, form.frame_tag)
    for idx, value in form.coeffs.items():
        for r, k in enumerate(idx):
            if not dE[k].coeffs:
                continue
            left = InvariantForm.basis(*idx[:r], dim=form.dim, frame_tag=form.frame_tag)
            right = InvariantForm.basis(*idx[r + 1:], dim=form.dim, frame_tag=form.frame_tag)
            out = out + ((-1) ** r * value) * wedge(wedge(left, dE[k]), right)
    return out


def coframe(dim: int, frame_tag: str = "E") -> tuple[InvariantForm, ...]:
    """The basis 1-forms ``E^1, ..., E^dim``."""
    return tuple(InvariantForm.basis(i, dim=dim, frame_tag=frame_tag) for i in range(dim))


def structure_equations(alg: InvariantAlgebra) -> list[str]:
    """Human-readable ``dE^k = ...`` lines."""
    return [f"d{alg.frame_labels[k]}^* = {f.to_string([lbl for lbl in alg.frame_labels])}" for k, f in enumerate(alg.coframe_differentials)]


__all__ = [
    "ZERO_TOL",
    "InvariantForm",
    "VectorValuedForm",
    "InvariantAlgebra",
    "AlgebraDiagnostics",
    "FrameChange",
    "FrameRegistry",
    "validate_algebra",
    "bracket",
    "wedge",
    "change_frame",
    "exterior_derivative",
    "coframe",
    "sort_with_sign",
    "structure_equations",
]
