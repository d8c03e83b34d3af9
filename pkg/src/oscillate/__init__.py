"""Zero-count bounds and numeric certification for Fuchsian systems.

Pipeline: exact model (poles, residues, carpeting values) -> chart
normalization -> scalar-operator derivation -> explicit per-region zero-count
bounds -> numeric verification by analytic continuation and the argument
principle.
"""

from .exact import GaussRat, Interval, Matrix, Poly
from .model import (
    CarpetingSpec,
    CarpetValue,
    DuplicatePoles,
    FuchsianSystem,
    ResidueSumNonzero,
    SpherePoint,
    carpet_op,
    chordal_dist,
    natural_carpet,
    r_flat,
    r_sharp,
    spectral_class_check,
    validate,
)
from .reduction import (
    NormalizedChart,
    ReductionTrace,
    ScalarOperator,
    derive_scalar,
    normalize_chart,
    nu_default,
    slope,
    verify_slope_bound,
)
from .symmetry import (
    AxisSpec,
    SymmetrizedSystem,
    choose_axis,
    operator_real_on_axis,
    real_axis,
    reflect,
    symmetrize,
)
from .roots import distance_lower_bound, root_enclosures
from .paths import ArcSpec, ComplexPath
from .numerics import (
    MonodromyData,
    RegionCount,
    ToleranceUnreachable,
    ZeroOnArc,
    ZeroOnBoundary,
    count_zeros_region,
    integrate,
    monodromy,
    var_arg_measure,
)
from .bounds import (
    Annulus,
    BoundCertificate,
    Constants,
    MonodromyNotUnitModulus,
    NotFuchsianLocal,
    OnZeroLocus,
    SlitPlan,
    SpectralClassViolation,
    assemble_bound,
    build_slit_plan,
    lower_bound_away_from_zeros,
    petrov_annulus_bound,
    var_arg_bound_arc,
    var_arg_bound_small_circle,
)
from .verify import ZeroCountReport, verify_certificate
from .corpus import random_combination, random_system, spectral_corpus

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "1.0.0"
