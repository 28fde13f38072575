"""Geometric mean of alpha-concurrence (GαC) and related genuine multipartite
entanglement measures for multipartite pure states, with a convex-roof
upper-bound estimator for mixed states."""

__version__ = "0.1.0"

from .bipartitions import Bipartition, BipartitionSet, cardinality, enumerate_bipartitions
from .core import (
    DensityMatrix,
    PureState,
    Spectrum,
    partial_trace,
    reduced_spectrum,
    spectral_decomposition,
    trace_distance,
)
from .errors import (
    GmeError,
    InvalidArgumentError,
    InvalidParameterError,
    InvalidPartitionError,
    InvalidStateError,
    NotMultipartiteError,
)
from .measures import (
    GmeReport,
    MeasureId,
    alpha_concurrence,
    concurrence,
    concurrence_fill,
    continuity_bound_bipartite,
    continuity_bound_multipartite,
    galpha_c,
    ggm,
    ghz_alpha_c_analytic,
    gmc,
    gqc,
    q_concurrence,
    w_alpha_c_analytic,
)
from .roof import Ensemble, RoofConfig, RoofMeasure, RoofResult, decompose_via_isometry, estimate_convex_roof
