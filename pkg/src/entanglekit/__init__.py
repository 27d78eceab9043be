"""Entanglement detection, classification and quantification for finite-dimensional states."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    EPS_HERM,
    EPS_NORM,
    EPS_PSD,
    EPS_RANK,
    EPS_RECON,
    BipartiteSplit,
    DensityMatrix,
    DomainError,
    EnsembleDecomposition,
    EntanglementError,
    NumericError,
    PureState,
    SchmidtDecomposition,
    UnsupportedError,
    all_bipartitions,
    operator_schmidt,
    partial_trace,
    partial_transpose,
    realign,
    schmidt,
    spectrum,
    tensor,
    von_neumann_entropy,
)
from .criteria import (  # noqa: E402
    CriterionVerdict,
    Outcome,
    ccnr_check,
    cmc_build,
    cmc_corollary1,
    cmc_corollary2,
    cmc_corollary3,
    entropy_check,
    majorization_check,
    ppt_check,
    range_search_product_vectors,
    range_verify,
)
from .kernels import BACKEND  # noqa: E402
