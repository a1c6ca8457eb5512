"""Gap-producing reductions for parameterized Set Cover.

Builds gap-gadgets from universal sets or rainbow-row matrices, applies the
hypercube set-system reduction, and chains it behind SAT, clique, vector-sum
and k-SUM front ends. Exact and brute-force oracles check both directions of
every reduction at small sizes.
"""

from .errors import BudgetExceeded, GapCoverError, ParseError, ReductionError
from .gadget import build_gadget, verify_G3, verify_G4, verify_M2
from .hypercube import HypercubeInstance, apply_reduction
from .model import (
    CnfFormula,
    GapGadget,
    MultipartiteGraph,
    PipelineParams,
    SetCoverInstance,
    VectorSumInstance,
    pad_partition,
    validate_instance,
)
from .oracles import exact_opt, exact_opt_hypercube, greedy_cover
from .pipelines import pipeline_clique, pipeline_ksum, pipeline_sat
from .sources import clique_to_setcover, ksum_to_vectorsum, sat_to_setcover, vectorsum_to_setcover
from .universal import build_universal, verify_universal

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "GapCoverError",
    "ParseError",
    "ReductionError",
    "build_gadget",
    "verify_G3",
    "verify_G4",
    "verify_M2",
    "HypercubeInstance",
    "apply_reduction",
    "CnfFormula",
    "GapGadget",
    "MultipartiteGraph",
    "PipelineParams",
    "SetCoverInstance",
    "VectorSumInstance",
    "pad_partition",
    "validate_instance",
    "exact_opt",
    "exact_opt_hypercube",
    "greedy_cover",
    "pipeline_clique",
    "pipeline_ksum",
    "pipeline_sat",
    "clique_to_setcover",
    "ksum_to_vectorsum",
    "sat_to_setcover",
    "vectorsum_to_setcover",
    "build_universal",
    "verify_universal",
]
