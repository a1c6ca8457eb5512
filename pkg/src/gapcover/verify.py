"""Two-sided verification of pipeline outputs against ground-truth oracles.

Every line is PASS, FAIL, N/A or INCONCLUSIVE; a budget overrun never turns
into a PASS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .errors import BudgetExceeded, check_budget
from .hypercube import HypercubeInstance
from .model import CnfFormula, MultipartiteGraph, PipelineParams, SetCoverInstance
from .oracles import ExactResult, brute_clique, brute_ksum, brute_sat, exact_opt, exact_opt_hypercube, greedy_cover
from .sources import (
    clique_to_setcover,
    clique_witness,
    ksum_carry_index,
    ksum_parameters,
    sat_to_setcover,
    sat_witness,
)

PASS, FAIL, NA, INCONCLUSIVE = "PASS", "FAIL", "N/A", "INCONCLUSIVE"


@dataclass(frozen=True)
class VerifyLine:
    name: str
    status: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.status:<12} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class VerifyReport:
    source: str = ""
    lines: list[VerifyLine] = field(default_factory=list)

    def add(self, name: str, status: str, detail: str = "") -> None:
        self.lines.append(VerifyLine(name, status, detail))

    @property
    def verdict(self) -> str:
        statuses = {line.status for line in self.lines}
        if FAIL in statuses:
            return FAIL
        if INCONCLUSIVE in statuses:
            return INCONCLUSIVE
        return PASS

    def __str__(self) -> str:
        head = [f"source: {self.source}"] if self.source else []
        return "\n".join(head + [str(x) for x in self.lines] + [f"verdict: {self.verdict}"])


@dataclass(frozen=True)
class Output:
    """One pipeline output: the implicit form, plus the explicit form when it exists."""

    implicit: HypercubeInstance
    explicit: SetCoverInstance | None = None

    @property
    def set_ids(self) -> tuple[str, ...]:
        return self.implicit.set_ids

    def covers(self, chosen: Sequence[int]) -> bool:
        if self.explicit is not None:
            return self.explicit.covers(chosen)
        return self.implicit.covers(chosen)

    def opt(self, bound: int, budget: int | None) -> ExactResult:
        if self.explicit is not None:
            return exact_opt(self.explicit, bound, budget)
        return exact_opt_hypercube(self.implicit, bound, budget)


def _names(ids: Sequence[str], positions: Sequence[int]) -> str:
    return "{" + ", ".join(ids[p] for p in positions) + "}"


def _solve(out: Output, bound: int, budget: int | None) -> ExactResult | str:
    try:
        return out.opt(bound, budget)
    except BudgetExceeded as exc:
        return str(exc)


def _check_sizes(report: VerifyReport, params: PipelineParams, outputs: Sequence[Output]) -> None:
    bad = []
    for i, out in enumerate(outputs, start=1):
        hc = out.implicit
        expect = hc.gadget.m * len(hc.src.universe_ids) ** hc.gadget.ell
        actual = len(out.explicit.universe_ids) if out.explicit is not None else hc.universe_size
        if actual != expect or expect != params.universe_size:
            bad.append(f"output {i}: {actual} != m|U|^ell = {expect}")
    if bad:
        report.add("universe size", FAIL, "; ".join(bad))
    else:
        report.add("universe size", PASS, f"|U'| = m|U|^ell = {params.universe_size}")


def _completeness(
    report: VerifyReport, out: Output, witness_ids: Sequence[str], k: int, budget: int | None, label: str = ""
) -> None:
    index = {s: p for p, s in enumerate(out.set_ids)}
    chosen = [index[s] for s in witness_ids]
    if out.covers(chosen):
        report.add(f"completeness witness{label}", PASS, f"{{{', '.join(witness_ids)}}} covers U'")
    else:
        report.add(f"completeness witness{label}", FAIL, f"{{{', '.join(witness_ids)}}} misses an element")
    res = _solve(out, k, budget)
    if isinstance(res, str):
        report.add(f"completeness opt <= {k}{label}", INCONCLUSIVE, res)
    elif res.status == "opt":
        report.add(f"completeness opt <= {k}{label}", PASS, res.describe(out.set_ids))
    else:
        report.add(f"completeness opt <= {k}{label}", FAIL, res.describe())


def _soundness(
    report: VerifyReport, outputs: Sequence[Output], k: int, h: int, budget: int | None
) -> None:
    details, status = [], PASS
    for i, out in enumerate(outputs, start=1):
        res = _solve(out, h, budget)
        tag = f"output {i}: " if len(outputs) > 1 else ""
        if isinstance(res, str):
            status = INCONCLUSIVE if status == PASS else status
            details.append(tag + res)
        elif res.status == "opt":
            status = FAIL
            details.append(tag + res.describe(out.set_ids))
        else:
            details.append(tag + res.describe())
    if len(details) > 1 and len({d.split(": ", 1)[1] for d in details}) == 1:
        details = [f"all {len(details)} outputs: " + details[0].split(": ", 1)[1]]
    report.add(f"soundness opt > {h}", status, "; ".join(details))
    explicit = [out.explicit for out in outputs if out.explicit is not None]
    if not explicit:
        report.add(f"greedy > {k}", NA, "no explicit output")
        return
    sizes = [greedy_cover(inst).size if _coverable(inst) else math.inf for inst in explicit]
    ok = all(s > k for s in sizes)
    report.add(f"greedy > {k}", PASS if ok else FAIL, f"greedy sizes {sizes}")


def _coverable(inst: SetCoverInstance) -> bool:
    union = 0
    for mk in inst.masks:
        union |= mk
    return union == inst.full_mask


def _cross_check(report: VerifyReport, outputs: Sequence[Output], bound: int, budget: int | None) -> None:
    pairs = [out for out in outputs if out.explicit is not None]
    if not pairs:
        report.add("explicit/implicit agreement", NA, "no explicit output")
        return
    for out in pairs:
        try:
            a = exact_opt(out.explicit, bound, budget)
            b = exact_opt_hypercube(out.implicit, bound, budget)
        except BudgetExceeded as exc:
            report.add("explicit/implicit agreement", INCONCLUSIVE, str(exc))
            return
        if (a.status, a.value) != (b.status, b.value):
            report.add("explicit/implicit agreement", FAIL, f"{a.describe()} vs {b.describe()}")
            return
    report.add("explicit/implicit agreement", PASS, f"same opt at bound {bound}")


def _finish(
    report: VerifyReport,
    params: PipelineParams,
    outputs: Sequence[Output],
    yes: bool,
    witness: tuple[int, Sequence[str]] | None,
    budget: int | None,
) -> VerifyReport:
    k, h = params.k_effective, params.h_effective
    _check_sizes(report, params, outputs)
    if yes:
        index, ids = witness
        label = f" (output {index + 1})" if len(outputs) > 1 else ""
        _completeness(report, outputs[index], ids, k, budget, label)
        report.add(f"soundness opt > {h}", NA, "source is a yes-instance")
    else:
        report.add("completeness witness", NA, "source is a no-instance")
        report.add(f"completeness opt <= {k}", NA, "source is a no-instance")
        _soundness(report, outputs, k, h, budget)
    _cross_check(report, outputs, h, budget)
    return report


def _oracle(report: VerifyReport, fn, *args):
    """Run a source oracle; a budget overrun makes the report INCONCLUSIVE."""
    try:
        return fn(*args)
    except BudgetExceeded as exc:
        report.source = "unknown"
        report.add("source oracle", INCONCLUSIVE, str(exc))
        return None


def verify_sat(phi: CnfFormula, params: PipelineParams, outputs: Sequence[Output], budget: int | None = None) -> VerifyReport:
    report = VerifyReport()
    ans = _oracle(report, brute_sat, phi, budget)
    if ans is None:
        return report
    if not ans:
        report.source = "unsatisfiable"
        return _finish(report, params, outputs, False, None, budget)
    report.source = "satisfiable, assignment " + "".join(str(int(b)) for b in ans.witness)
    raw = sat_to_setcover(phi, params.k)
    ids = [raw.set_ids[p] for p in sat_witness(phi, params.k, ans.witness)]
    return _finish(report, params, outputs, True, (0, ids), budget)


def verify_clique(g: MultipartiteGraph, params: PipelineParams, outputs: Sequence[Output], budget: int | None = None) -> VerifyReport:
    report = VerifyReport()
    ans = _oracle(report, brute_clique, g, g.k, budget)
    if ans is None:
        return report
    if not ans:
        report.source = f"no {g.k}-clique"
        return _finish(report, params, outputs, False, None, budget)
    report.source = f"{g.k}-clique {{{', '.join(ans.witness)}}}"
    raw = clique_to_setcover(g, g.k)
    ids = [raw.set_ids[p] for p in clique_witness(g, ans.witness)]
    return _finish(report, params, outputs, True, (0, ids), budget)


def verify_ksum(
    lists: Sequence[Sequence[int]],
    p: int,
    d: int,
    R: int | None,
    params: PipelineParams,
    outputs: Sequence[Output],
    budget: int | None = None,
) -> VerifyReport:
    report = VerifyReport()
    k, R, _ = ksum_parameters(lists, p, d, R)
    expect = (k + 1) ** (d - 1)
    if len(outputs) == expect:
        report.add("output count", PASS, f"s = (k+1)^(d-1) = {expect}")
    else:
        report.add("output count", FAIL, f"{len(outputs)} outputs, expected {expect}")
    ans = _oracle(report, brute_ksum, lists, 0, budget)
    if ans is None:
        return report
    if not ans:
        report.source = "no zero-sum selection"
        return _finish(report, params, outputs, False, None, budget)
    values = [lists[i][q] for i, q in enumerate(ans.witness)]
    report.source = f"zero-sum selection {values}"
    index = ksum_carry_index(values, p, d, R)
    ids = [f"v:{i + 1}:{q + 1}" for i, q in enumerate(ans.witness)]
    return _finish(report, params, outputs, True, (index, ids), budget)


def rainbow_cover(inst: SetCoverInstance, budget: int | None = None) -> tuple[int, ...] | None:
    """First one-set-per-part cover in part order, if any."""
    ranges = [range(a, b) for a, b in inst.partition]
    check_budget("rainbow_cover", math.prod(len(r) for r in ranges), budget)
    for combo in product(*ranges):
        if inst.covers(combo):
            return combo
    return None


def verify_setcover(
    src: SetCoverInstance, params: PipelineParams, outputs: Sequence[Output], budget: int | None = None
) -> VerifyReport:
    """For a plain partitioned source: yes = rainbow cover, no = opt > k."""
    report = VerifyReport()
    k = params.k_effective
    try:
        combo = rainbow_cover(src, budget)
    except BudgetExceeded as exc:
        report.add("source oracle", INCONCLUSIVE, str(exc))
        return report
    if combo is not None:
        report.source = f"rainbow cover {_names(src.set_ids, combo)}"
        return _finish(report, params, outputs, True, (0, [src.set_ids[p] for p in combo]), budget)
    res = _oracle(report, exact_opt, src, k, budget)
    if res is None:
        return report
    if res.exceeds_bound:
        report.source = f"no cover of size <= {k}"
        return _finish(report, params, outputs, False, None, budget)
    report.source = f"cover of size {res.value} but no rainbow cover"
    _check_sizes(report, params, outputs)
    report.add("completeness", NA, "no guarantee without a rainbow cover")
    report.add("soundness", NA, "source has a cover of size <= k")
    return report
