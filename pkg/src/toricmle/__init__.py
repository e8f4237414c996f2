"""Existence and computation of maximum likelihood estimates for log-linear
models, decided by exact polyhedral stability tests for a torus action and
computed by two independent numerical routes."""

from .errors import (
    CrossCheckError,
    DimensionError,
    EnumerationLimitError,
    InputError,
    NotConvergedError,
    PreconditionError,
    ToricMLEError,
)
from .exact import Rational
from .model import (
    CountVector,
    DesignMatrix,
    Linearization,
    data_linearization,
    independence_matrix,
    path_graph_3chain_matrix,
    sufficient_statistics,
    validate_rowspan_ones,
)
from .nullcone import (
    MonomialInvariant,
    NullConeDescription,
    is_in_null_cone,
    mle_exists_via_components,
    null_cone,
    verify_invariance,
)
from .polytope import (
    LpCertificate,
    SubPolytope,
    contains,
    in_relative_interior,
    maximal_excluding_subsets,
    minimal_containing_subsets,
    minimal_face,
)
from .serialize import VERSION as __version__
from .solvers import (
    CapacityConfig,
    IpsConfig,
    MleResult,
    capacity_solve,
    ips_preprocess,
    ips_iterates,
    ips_solve,
    kl_divergence,
    mle,
)
from .stability import (
    DestabilizingSubgroup,
    MleSemantics,
    StabilityClass,
    StabilityReport,
    classify,
    classify_ones_for_data,
    destabilizing_certificate,
    mle_exists_via_semistability,
    moment_map_residual,
)
