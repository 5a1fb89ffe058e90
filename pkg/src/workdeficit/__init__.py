"""Work extractable from bipartite quantum states under local operations
and classical (dephasing) communication."""

__version__ = "0.1.0"

from workdeficit.errors import (
    DimensionError,
    FamilyMismatchError,
    InvalidStateError,
    LocalityError,
    WorkDeficitError,
)
from workdeficit.qstate import (
    BipartiteState,
    PureState,
    SchmidtForm,
    partial_trace,
    schmidt_decompose,
    shannon_entropy,
    tensor_product,
    von_neumann_entropy,
)
from workdeficit.channels import BasisAngles, LocalBasis
from workdeficit.deficit import (
    DeficitReport,
    OptimizerConfig,
    deficit_lower_bound,
    maxcorr_deficit,
    one_way_deficit,
    oracle_one_way_deficit,
    pure_state_deficit,
    total_work,
)

__all__ = [
    "BasisAngles",
    "BipartiteState",
    "DeficitReport",
    "DimensionError",
    "FamilyMismatchError",
    "InvalidStateError",
    "LocalBasis",
    "LocalityError",
    "OptimizerConfig",
    "PureState",
    "SchmidtForm",
    "WorkDeficitError",
    "deficit_lower_bound",
    "maxcorr_deficit",
    "one_way_deficit",
    "oracle_one_way_deficit",
    "partial_trace",
    "pure_state_deficit",
    "schmidt_decompose",
    "shannon_entropy",
    "tensor_product",
    "total_work",
    "von_neumann_entropy",
]
