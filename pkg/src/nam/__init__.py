"""Exact non-Archimedean measure theory on Q_p^n and its cylinder extension to c_0."""

from nam.characters import CyclotomicElement, RootOfUnity, character
from nam.errors import (
    AbsoluteContinuityViolation,
    AdmissibilityError,
    EnumerationCapError,
    ModeMismatchError,
    NamError,
    PrimeMismatchError,
    ResolutionError,
    SchemaError,
    SingularMatrixError,
)
from nam.kakutani import (
    Equivalent,
    GeometricTail,
    ProductPair,
    Singular,
    TrivialTail,
    beta,
    density,
    kakutani_decide,
    orthogonality_check,
)
from nam.linalg import PerturbationOperator, gauss_decompose, split_isometry
from nam.measures import (
    BallMeasure,
    Box,
    ClopenSet,
    LocallyConstantFn,
    convolve,
    dirac,
    fourier_stieltjes,
    haar,
    integrate,
    product_measure,
    pushforward,
    weak_q_moment,
)
from nam.padic import REAL, PadicScalar, Sadic, frac_part, pnorm, vp
from nam.radial import radial_gaussian
from nam.weak_dist import (
    WeakDistribution,
    check_consistency,
    check_tightness,
    minlos_sazonov_witness,
    sazonov_witness,
)

__version__ = "0.1.0"
