"""Spherical-harmonic transforms on the unit sphere and entropy-based order selection."""
from .basis import (
    BasisEvaluation,
    OpCounter,
    SphericalPoint,
    basis_matrix,
    evaluate_basis,
    lm_index,
    lm_pairs,
    n_coefficients,
    normalization_constant,
    sh_direct,
    sh_direct_all,
    sh_recursive_ladder,
)
from .entropy import (
    LevelSpectrum,
    OrderSelectionReport,
    SheCurve,
    detail_energy,
    level_energies,
    level_spectrum,
    select_order,
    she,
    she_curve,
)
from .errors import (
    BandLimitError,
    DegenerateSpectrumError,
    DomainError,
    FileFormatError,
    NoConvergenceError,
    OrderError,
    ResourceError,
    ShentropyError,
)
from .grid import SphereGrid, equiangular_grid, gauss_grid
from .legendre import (
    assoc_legendre_direct,
    assoc_legendre_recursive,
    bi_filter,
    legendre,
    recurrence_coefficients,
)
from .shapes import ShapeSpec, builtin_shapes, generate
from .transform import (
    AliasingWarning,
    CoefficientPyramid,
    SampledSphericalField,
    analyze,
    field_norm,
    parseval_check,
    real_pairs,
    reconstruct,
    reconstruct_surface,
    residual_norm,
    synthesize,
)

__version__ = "0.1.0"
