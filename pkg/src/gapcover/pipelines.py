"""End-to-end gap pipelines: source problem -> partitioned Set Cover -> gapped Set Cover.

The asymptotic parameter formulas are evaluated and recorded, but the gadget
is built with desk-scale parameters (see :func:`effective_h`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DEFAULT_SIZE_BUDGET, GapCoverError
from .gadget import build_gadget, round_down_pow2
from .hypercube import HypercubeInstance
from .model import (
    CnfFormula,
    GapGadget,
    MultipartiteGraph,
    PipelineParams,
    SetCoverInstance,
    VectorSumInstance,
    pad_partition,
)
from .sources import (
    clique_to_setcover,
    ksum_parameters,
    ksum_to_vectorsum,
    sat_to_setcover,
    vectorsum_to_setcover,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineOutput:
    kind: str
    params: PipelineParams
    gadget: GapGadget
    sources: tuple[SetCoverInstance, ...]  # padded, one per output
    outputs: tuple[HypercubeInstance, ...]
    materialized: tuple[SetCoverInstance | None, ...]


class StageError(GapCoverError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"{stage}: {cause}")


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except GapCoverError as exc:
        raise StageError(name, exc) from exc


def next_pow2(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length())


def effective_h(k: int, requested: float | None) -> int:
    """Smallest power of two >= max(k, 2), raised to the requested value
    rounded down to a power of two when that is larger."""
    floor = next_pow2(max(k, 2))
    if requested is None or not requested >= 1:
        return floor
    return max(floor, round_down_pow2(int(requested)))


def _loglog_ratio(x: float) -> float | None:
    """``log x / log log x`` (base 2), or None where it is undefined."""
    if x <= 2:
        return None
    ll = math.log2(math.log2(x))
    if ll <= 0:
        return None
    return math.log2(x) / ll


def gap_target(N: int, k: int, delta: float) -> float | None:
    r = _loglog_ratio(N)
    return None if r is None else r ** (1 / k) / (1 + delta)


def _finite(x: int) -> float | None:
    try:
        return float(x)
    except OverflowError:
        return None


def _reduce(
    kind: str,
    sources: list[SetCoverInstance],
    k_eff: int,
    k: int,
    delta: float,
    h_requested: float | None,
    epsilon: float,
    seed: int,
    budget: int | None,
    size_budget: int | None,
    asymptotic: dict,
) -> PipelineOutput:
    padded = [_stage("pad_partition", pad_partition, s, k_eff) for s in sources]
    widths = {b - a for s in padded for a, b in s.partition}
    if len(widths) != 1:
        raise GapCoverError(f"inconsistent part widths across outputs: {sorted(widths)}")
    n_g = widths.pop()
    if n_g == 0:
        raise GapCoverError("source parts are empty")
    h = effective_h(k_eff, h_requested)
    gadget = _stage("build_gadget", build_gadget, k_eff, n_g, h, seed=seed, epsilon=epsilon, budget=budget)
    outputs = tuple(_stage("reduce", HypercubeInstance, s, gadget) for s in padded)
    limit = DEFAULT_SIZE_BUDGET if size_budget is None else size_budget
    materialized = tuple(
        hc.materialize(limit) if hc.universe_size <= limit else None for hc in outputs
    )
    size = outputs[0].universe_size
    N = len(padded[0].set_ids) + size
    asymptotic = dict(asymptotic)
    asymptotic["gap_target"] = gap_target(N, k, delta)
    asymptotic["log2_N"] = math.log2(N)
    warnings = []
    if h_requested is None or h > h_requested:
        warnings.append(f"h raised from {h_requested} to {h} (needs a power of two >= max(k, 2))")
    if any(m is None for m in materialized):
        warnings.append(f"universe of {size} elements kept implicit (size budget {limit})")
    params = PipelineParams(
        k=k,
        delta=delta,
        epsilon_gadget=epsilon,
        k_effective=k_eff,
        n_gadget=n_g,
        h_effective=h,
        ell=gadget.ell,
        m=gadget.m,
        M=len(padded[0].set_ids),
        N=_finite(N),
        universe_size=size,
        asymptotic=asymptotic,
        warnings=tuple(warnings),
    )
    for w in warnings:
        log.warning(w)
    return PipelineOutput(kind, params, gadget, tuple(padded), outputs, materialized)


def _formula_h(x: float, k: int, delta: float | None) -> float | None:
    r = _loglog_ratio(x)
    if r is None:
        return None
    scale = 1.0 if delta is None else 1 / (1 + delta / 2)
    return scale * r ** (1 / k)


def pipeline_sat(
    phi: CnfFormula,
    k: int,
    delta: float,
    epsilon: float = 0.1,
    h: int | None = None,
    seed: int = 0,
    budget: int | None = None,
    size_budget: int | None = None,
) -> PipelineOutput:
    src = _stage("sat_to_setcover", sat_to_setcover, phi, k, budget)
    M = len(pad_partition(src, k).set_ids)
    h_formula = _formula_h(M, k, delta)
    asymptotic = {
        "M": k * 2 ** (phi.num_vars / k),
        "N_bound": 2 ** (phi.num_vars / k + phi.num_vars / k**3),
        "h": h_formula,
        "ell": None if h_formula is None else h_formula**k,
        "m": M * math.log2(h_formula) if h_formula and h_formula > 1 else None,
        "constraint_root": (1 + 1 / k**3) ** (1 / k) <= (1 + delta) / (1 + delta / 2),
        "constraint_power": (1 + delta / 2) ** k >= 2 * k**4,
    }
    requested = h if h is not None else h_formula
    return _reduce("sat", [src], k, k, delta, requested, epsilon, seed, budget, size_budget, asymptotic)


def pipeline_clique(
    g: MultipartiteGraph,
    k: int | None = None,
    delta: float = 0.0,
    epsilon: float = 0.1,
    h: int | None = None,
    seed: int = 0,
    budget: int | None = None,
    size_budget: int | None = None,
) -> PipelineOutput:
    k = g.k if k is None else k
    k_eff = math.comb(k, 2)
    src = _stage("clique_to_setcover", clique_to_setcover, g, k, budget)
    edges = max(len(src.set_ids), 1)
    h_formula = _formula_h(edges, k_eff, None)
    asymptotic = {
        "graph_edges": edges,
        "h": h_formula,
        "ell": _loglog_ratio(edges),
    }
    requested = h if h is not None else h_formula
    return _reduce("clique", [src], k_eff, k_eff, delta, requested, epsilon, seed, budget, size_budget, asymptotic)


def ksum_instances(
    lists: Sequence[Sequence[int]], p: int, d: int, R: int | None = None
) -> list[VectorSumInstance]:
    """The vector-sum instances with their bound tightened to the largest
    entry over all of them, so every output shares one universe shape."""
    out = ksum_to_vectorsum(lists, p, d, R)
    bound = max(
        (abs(x) for vs in out for lst in vs.vectors for v in lst for x in v), default=0
    )
    return [VectorSumInstance(vs.k, vs.dim, bound, vs.vectors) for vs in out]


def pipeline_ksum(
    lists: Sequence[Sequence[int]],
    p: int,
    d: int,
    delta: float,
    R: int | None = None,
    epsilon: float = 0.1,
    h: int | None = None,
    seed: int = 0,
    budget: int | None = None,
    size_budget: int | None = None,
) -> PipelineOutput:
    k, R, M = _stage("ksum_to_vectorsum", ksum_parameters, lists, p, d, R)
    vss = _stage("ksum_to_vectorsum", ksum_instances, lists, p, d, R)
    sources = [_stage("vectorsum_to_setcover", vectorsum_to_setcover, vs, size_budget) for vs in vss]
    n = max(len(lst) for lst in lists)
    h_formula = _formula_h(n, k, delta)
    asymptotic = {
        "R": R,
        "M": M,
        "s": len(vss),
        "vector_bound": vss[0].bound,
        "h": h_formula,
    }
    requested = h if h is not None else h_formula
    return _reduce("ksum", sources, k, k, delta, requested, epsilon, seed, budget, size_budget, asymptotic)
