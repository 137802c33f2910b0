"""Canonical-connection geometry of invariant almost-Hermitian structures.

The package is layered: :mod:`akgeo.algebra` (exterior calculus from
structure constants), :mod:`akgeo.hermitian` (connections, torsion,
curvature), :mod:`akgeo.families` (model manifolds and their closed-form
tables), :mod:`akgeo.plurigenus` (plurigenera of the Nakamura deformation)
and :mod:`akgeo.report` (spec files, the end-to-end pipeline and reports).
"""
from akgeo.algebra import (
    FrameChange,
    FrameRegistry,
    InvariantAlgebra,
    InvariantForm,
    VectorValuedForm,
    bracket,
    change_frame,
    exterior_derivative,
    validate_algebra,
    wedge,
)
from akgeo.errors import (
    AkgeoError,
    DomainError,
    FrameMismatchError,
    InvariantViolation,
    OracleDisagreement,
    PipelineError,
    SpecError,
)
from akgeo.families import (
    NakamuraDeformation,
    deformation_coefficients,
    expected_kodaira,
    expected_nakamura,
    kodaira_surface_dimension,
    kodaira_thurston,
    nakamura,
)
from akgeo.hermitian import (
    AlmostComplexStructure,
    AlmostHermitianSpec,
    MetricData,
    canonical_connection,
    classify,
    connection_forms,
    curvature,
    levi_civita,
    nijenhuis,
    real_curvature,
    torsion_forms,
    type_decompose,
    unitary_frame,
)
from akgeo.plurigenus import (
    brute_force_modes,
    discriminant,
    ellipticity_check,
    kodaira_dimension,
    mode_equation,
    plurigenus,
)

__version__ = "0.1.0"
