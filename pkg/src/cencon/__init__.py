"""Central configurations of the n-body problem: certification, the
Cayley-Menger rank criterion, the Dziobek lift and its variety, numerical
search, and counting bounds."""

from .bounds import BoundResult, milnor_component_bound, thom_milnor_cc_bound
from .cayley_menger import (
    DistanceVector,
    cm_cofactors,
    cm_det,
    cm_matrix,
    cm_rank,
    determinantal_membership,
    dimension_from_distances,
    kernel_lift,
    mutual_distances,
)
from .central import (
    CertificationReport,
    DziobekData,
    Exponent,
    alpha_from_cofactors,
    cc_residual,
    certify,
    dziobek_data,
    fit_lambda,
    gwf_residuals,
)
from .errors import (
    CenconError,
    CertificationError,
    ConsistencyError,
    DimensionError,
    HypothesisError,
    InputError,
    NonRealizableError,
    NormalizationError,
    SolverError,
)
from .geometry import Configuration, config_dimension, kernel_vector, signed_minor
from ._linalg import RankTolerance
from .solver import (
    SolveReport,
    XmSystem,
    build_xm_system,
    moulton_collinear,
    newton_solve,
    recover_configuration,
    search,
)
from .variety import (
    LiftedPoint,
    grad_F_identity_check,
    h_submatrix_det,
    jacobian,
    jacobian_rank,
    lift_point,
    psi_values,
    system_residual,
    w_membership,
)

__version__ = "0.1.0"
