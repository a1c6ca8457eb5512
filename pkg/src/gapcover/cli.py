"""Command-line front end.

Exit status: 0 on success or PASS, 1 on FAIL or INCONCLUSIVE, 2 on errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import shutil
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import formats
from .gadget import (
    build_gadget,
    check_greedy_infeasibility,
    gadget_warnings,
    round_down_pow2,
    verify_G3,
    verify_G4,
    verify_M1,
    verify_M2,
)
from .hypercube import HypercubeInstance, covering_witness
from .errors import DEFAULT_SIZE_BUDGET, GapCoverError
from .model import PipelineParams, SetCoverInstance, pad_partition, validate_instance
from .oracles import exact_opt, exact_opt_hypercube, greedy_cover
from .pipelines import PipelineOutput, ksum_instances, pipeline_clique, pipeline_ksum, pipeline_sat
from .sources import (
    ReductionProvenance,
    clique_to_setcover,
    ksum_to_vectorsum,
    sat_to_setcover,
    vectorsum_to_setcover,
)
from .universal import build_universal, size_bound_report, verify_universal
from .verify import FAIL, PASS, Output, VerifyLine, verify_clique, verify_ksum, verify_sat, verify_setcover

log = logging.getLogger("gapcover")

OK, FAILED, ERROR = 0, 1, 2


class UsageError(GapCoverError):
    pass


# ---------------------------------------------------------------------------
# helpers


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | Path, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


def _emit(args, text: str) -> None:
    """Write ``text`` to ``--out`` or stdout."""
    if args.out:
        _write(args.out, text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def _load_any_instance(path: str) -> SetCoverInstance | HypercubeInstance:
    text = _read(path)
    if formats.BUNDLE_FORMAT in text[:200]:
        return formats.load_bundle(text)
    return formats.load_instance(text)


def _params_table(params: PipelineParams) -> str:
    a = params.asymptotic
    rows = [
        ("k", a.get("k", params.k), params.k_effective),
        ("h", a.get("h"), params.h_effective),
        ("ell", a.get("ell"), params.ell),
        ("m", a.get("m"), params.m),
        ("|S|", a.get("M"), params.M),
        ("|U'|", None, params.universe_size),
        ("gap target", a.get("gap_target"), params.h_effective),
    ]

    def fmt(x) -> str:
        if x is None:
            return "-"
        if isinstance(x, float):
            return f"{x:.4g}"
        s = str(x)
        return s if len(s) <= 24 else f"{s[:6]}...({len(s)} digits)"

    out = [f"{'parameter':<12}{'formula':>16}{'effective':>28}"]
    out += [f"{name:<12}{fmt(f):>16}{fmt(e):>28}" for name, f, e in rows]
    return "\n".join(out)


# ---------------------------------------------------------------------------
# universal


def cmd_universal_build(args) -> int:
    us = build_universal(args.n, args.k, seed=args.seed, budget=args.budget)
    _emit(args, formats.dump_universal(us))
    if args.format == "summary" or args.out:
        print(size_bound_report(args.n, args.k, seed=args.seed, budget=args.budget))
    return OK


def cmd_universal_verify(args) -> int:
    us = formats.load_universal(_read(args.file))
    res = verify_universal(us, budget=args.budget)
    if res:
        print(f"PASS (n={us.n}, k={us.k}, {len(us.strings)} strings)")
        return OK
    print(f"FAIL positions {list(res.positions)} miss pattern {res.missing}")
    return FAILED


# ---------------------------------------------------------------------------
# gadget


def cmd_gadget_build(args) -> int:
    g = build_gadget(args.k, args.n, args.h, seed=args.seed, epsilon=args.epsilon, budget=args.budget)
    _emit(args, formats.dump_gadget(g))
    if args.out:
        print(f"k={g.k} n={g.n} m={g.m} ell={g.ell} h={g.h}")
    return OK


def cmd_gadget_verify(args) -> int:
    g = formats.load_gadget(_read(args.file))
    checks = [
        ("M1", verify_M1(g)),
        ("M2", verify_M2(g.matrix, g.h, budget=args.budget)),
        ("G3", verify_G3(g, budget=args.budget)),
        ("G4", verify_G4(g, budget=args.budget)),
    ]
    ok = True
    for name, v in checks:
        ok &= v.ok
        detail = "" if v.ok else f": {v.detail or v.counterexample}"
        print(f"{_verdict(v.ok):<5} {name}{detail}")
    return OK if ok else FAILED


def cmd_gadget_feasibility(args) -> int:
    h = round_down_pow2(args.h)
    m = args.n * max(1, h.bit_length() - 1)
    ell = h**args.k
    for w in gadget_warnings(args.k, args.n, h, args.epsilon):
        print(f"warning: {w}")
    if args.universe_size:
        ok = check_greedy_infeasibility(args.k, ell, args.universe_size, m, h)
        lhs = args.k * (1 + ell * math.log(args.universe_size) + math.log(m))
        print(f"k(1 + ell ln|U| + ln m) = {lhs:.3f} {'<' if ok else '>='} h = {h}")
        print("greedy separates the cases" if ok else "greedy does not separate the cases")
    print(f"k={args.k} n={args.n} h={h} m={m} ell={ell}")
    return OK


# ---------------------------------------------------------------------------
# reduce


def _reduce_out(args, inst: SetCoverInstance, kind: str, source: str, params: dict) -> int:
    report = validate_instance(inst, equal_parts=False)
    if not report:
        raise GapCoverError(f"internal: emitted instance is invalid: {report}")
    _emit(args, formats.dump_instance(inst))
    if args.out:
        out = Path(args.out)
        prov = {
            "command": f"reduce {kind}",
            "kind": kind,
            "source": _file_entry(Path(source), out.parent),
            "output": _file_entry(out, out.parent),
            "reduction": ReductionProvenance(kind, formats.sha256_text(_read(source)), params).as_dict(),
        }
        _write(out.with_name(out.name + ".prov.json"), formats.dump_provenance(prov))
    if args.format == "summary":
        print(f"{len(inst.set_ids)} sets, {len(inst.universe_ids)} elements, {len(inst.partition or ())} parts", file=sys.stderr)
    return OK


def cmd_reduce_sat(args) -> int:
    phi = formats.load_cnf(_read(args.cnf))
    return _reduce_out(args, sat_to_setcover(phi, args.k, budget=args.budget), "sat", args.cnf, {"k": args.k})


def cmd_reduce_clique(args) -> int:
    g = formats.load_graph(_read(args.graph))
    inst = clique_to_setcover(g, args.k, budget=args.budget)
    return _reduce_out(args, inst, "clique", args.graph, {"k": g.k})


def cmd_reduce_vectorsum(args) -> int:
    vs = formats.load_vectors(_read(args.vectors))
    inst = vectorsum_to_setcover(vs, size_budget=args.size_budget)
    return _reduce_out(args, inst, "vectorsum", args.vectors, {"k": vs.k, "bound": vs.bound})


def cmd_reduce_ksum(args) -> int:
    lists = formats.load_int_lists(_read(args.lists))
    out = ksum_to_vectorsum(lists, args.p, args.d, args.R)
    if not args.out:
        for i, vs in enumerate(out, start=1):
            sys.stdout.write(f"# instance {i}\n" + formats.dump_vectors(vs))
        return OK
    base = Path(args.out)
    base.mkdir(parents=True, exist_ok=True)
    width = len(str(len(out)))
    for i, vs in enumerate(out, start=1):
        _write(base / f"vectors_{i:0{width}d}.txt", formats.dump_vectors(vs))
    print(f"{len(out)} instances written to {base}")
    return OK


def cmd_reduce_hypercube(args) -> int:
    src = formats.load_instance(_read(args.instance))
    g = formats.load_gadget(_read(args.gadget))
    hc = HypercubeInstance(src, g)
    if not args.rainbow_certified:
        log.warning("source is not certified to have one-set-per-part solutions; completeness only holds for such solutions")
    limit = args.size_budget
    explicit = hc.universe_size <= (DEFAULT_SIZE_BUDGET if limit is None else limit)
    text = formats.dump_instance(hc.materialize(limit)) if explicit else formats.dump_bundle(hc)
    if not explicit:
        log.warning("universe of %d elements kept implicit; writing a hypercube bundle", hc.universe_size)
    _emit(args, text)
    if args.out:
        out = Path(args.out)
        params = PipelineParams(
            k=g.k, delta=0.0, k_effective=g.k, n_gadget=g.n, h_effective=g.h, ell=g.ell, m=g.m,
            M=len(src.set_ids), universe_size=hc.universe_size,
        )
        bundle = out if not explicit else out.with_name(out.name + ".bundle.json")
        if explicit:
            _write(bundle, formats.dump_bundle(hc))
        record = {
            "command": "reduce hypercube",
            "kind": "setcover",
            "seed": args.seed,
            "source": _file_entry(Path(args.instance), out.parent),
            "gadget": _file_entry(Path(args.gadget), out.parent),
            "params": params.as_dict(),
            "outputs": [_output_entry(out.parent, bundle, out if explicit else None)],
            "reduction": ReductionProvenance(
                "setcover", formats.sha256_text(_read(args.instance)), {"k": g.k, "h": g.h}, args.rainbow_certified
            ).as_dict(),
        }
        _write(out.with_name(out.name + ".prov.json"), formats.dump_provenance(record))
    return OK


# ---------------------------------------------------------------------------
# pipelines


def _file_entry(path: Path, base: Path) -> dict:
    return {"path": formats.relative_path(path, base), "sha256": formats.sha256_text(_read(path))}


def _output_entry(base: Path, bundle: Path, instance: Path | None) -> dict:
    entry = {"bundle": _file_entry(bundle, base)}
    entry["instance"] = _file_entry(instance, base) if instance is not None else None
    return entry


def _write_pipeline(args, res: PipelineOutput, source: Path, source_name: str, inputs: dict) -> int:
    out = Path(args.out) if args.out else Path(f"{source.stem}-{res.kind}-pipeline")
    out.mkdir(parents=True, exist_ok=True)
    src_copy = out / source_name
    if src_copy.resolve() != source.resolve():
        shutil.copyfile(source, src_copy)
    _write(out / "gadget.gad", formats.dump_gadget(res.gadget))
    width = len(str(len(res.outputs)))
    entries = []
    for i, (hc, inst) in enumerate(zip(res.outputs, res.materialized), start=1):
        tag = f"{i:0{width}d}"
        bundle = out / f"output_{tag}.bundle.json"
        _write(bundle, formats.dump_bundle(hc))
        path = None
        if inst is not None:
            path = out / f"output_{tag}.instance.json"
            _write(path, formats.dump_instance(inst))
        entries.append(_output_entry(out, bundle, path))
    record = {
        "command": f"pipeline {res.kind}",
        "kind": res.kind,
        "seed": args.seed,
        "inputs": inputs,
        "source": _file_entry(src_copy, out),
        "gadget": _file_entry(out / "gadget.gad", out),
        "params": res.params.as_dict(),
        "outputs": entries,
        "reduction": ReductionProvenance(
            res.kind, formats.sha256_text(_read(src_copy)), {**inputs, "h_effective": res.params.h_effective}
        ).as_dict(),
    }
    prov = out / "provenance.json"
    _write(prov, formats.dump_provenance(record))
    if args.format == "summary":
        print(_params_table(res.params))
    else:
        p = res.params
        print(f"k_effective={p.k_effective} h_effective={p.h_effective} ell={p.ell} m={p.m} |S|={p.M} |U'|={p.universe_size}")
    print(f"provenance: {prov}")
    return OK


def cmd_pipeline_sat(args) -> int:
    phi = formats.load_cnf(_read(args.cnf))
    res = pipeline_sat(
        phi, args.k, args.delta, epsilon=args.epsilon, h=args.h, seed=args.seed,
        budget=args.budget, size_budget=args.size_budget,
    )
    inputs = {"k": args.k, "delta": args.delta, "epsilon": args.epsilon, "h": args.h}
    return _write_pipeline(args, res, Path(args.cnf), "source.cnf", inputs)


def cmd_pipeline_clique(args) -> int:
    g = formats.load_graph(_read(args.graph))
    res = pipeline_clique(
        g, args.k, delta=args.delta, epsilon=args.epsilon, h=args.h, seed=args.seed,
        budget=args.budget, size_budget=args.size_budget,
    )
    inputs = {"k": g.k, "delta": args.delta, "epsilon": args.epsilon, "h": args.h}
    return _write_pipeline(args, res, Path(args.graph), "source.graph", inputs)


def cmd_pipeline_ksum(args) -> int:
    lists = formats.load_int_lists(_read(args.lists))
    res = pipeline_ksum(
        lists, args.p, args.d, args.delta, R=args.R, epsilon=args.epsilon, h=args.h,
        seed=args.seed, budget=args.budget, size_budget=args.size_budget,
    )
    inputs = {"k": len(lists), "p": args.p, "d": args.d, "R": args.R, "delta": args.delta,
              "epsilon": args.epsilon, "h": args.h}
    return _write_pipeline(args, res, Path(args.lists), "source.lists", inputs)


# ---------------------------------------------------------------------------
# solve


def cmd_solve_exact(args) -> int:
    inst = _load_any_instance(args.instance)
    if isinstance(inst, HypercubeInstance):
        res = exact_opt_hypercube(inst, args.bound, budget=args.budget)
    else:
        res = exact_opt(inst, args.bound, budget=args.budget)
    print(res.describe(inst.set_ids))
    if res.status == "opt" and isinstance(inst, HypercubeInstance) and args.format == "text":
        for w in covering_witness(inst, res.witness):
            print(f"  group {w.group}: label {w.vertex.labels} ({w.kind}) via {[inst.set_ids[s] for s in w.sets]}")
    return OK


def cmd_solve_greedy(args) -> int:
    inst = _load_any_instance(args.instance)
    if isinstance(inst, HypercubeInstance):
        inst = inst.materialize(args.size_budget)
    res = greedy_cover(inst)
    print(f"greedy size = {res.size}; cover {[inst.set_ids[s] for s in res.cover]}")
    return OK


# ---------------------------------------------------------------------------
# verify


def _check_entry(base: Path, entry: dict, what: str, problems: list[str]) -> str:
    text = _read(base / entry["path"])
    if formats.sha256_text(text) != entry["sha256"]:
        problems.append(f"{what} {entry['path']} does not match its recorded hash")
    return text


def cmd_verify_pipeline(args) -> int:
    prov_path = Path(args.provenance)
    record = formats.load_provenance(_read(prov_path))
    base = prov_path.parent
    problems: list[str] = []
    src_text = _check_entry(base, record["source"], "source", problems)
    _check_entry(base, record["gadget"], "gadget", problems)
    params = PipelineParams.from_dict(record["params"])
    outputs = []
    for entry in record["outputs"]:
        hc = formats.load_bundle(_check_entry(base, entry["bundle"], "output", problems))
        explicit = None
        if entry.get("instance"):
            explicit = formats.load_instance(_check_entry(base, entry["instance"], "output", problems))
        outputs.append(Output(hc, explicit))
    kind = record["kind"]
    inputs = record.get("inputs", {})
    budget = args.budget
    if kind == "sat":
        phi = formats.load_cnf(src_text)
        report = verify_sat(phi, params, outputs, budget)
        derived = [sat_to_setcover(phi, params.k)]
    elif kind == "clique":
        g = formats.load_graph(src_text)
        report = verify_clique(g, params, outputs, budget)
        derived = [clique_to_setcover(g, g.k)]
    elif kind == "ksum":
        lists = formats.load_int_lists(src_text)
        report = verify_ksum(lists, inputs["p"], inputs["d"], inputs.get("R"), params, outputs, budget)
        derived = [vectorsum_to_setcover(vs) for vs in ksum_instances(lists, inputs["p"], inputs["d"], inputs.get("R"))]
    elif kind == "setcover":
        src = formats.load_instance(src_text)
        report = verify_setcover(outputs[0].implicit.src, params, outputs, budget)
        derived = [src]
    else:
        raise UsageError(f"unknown pipeline kind {kind!r}")
    report.lines.insert(0, _integrity_line(problems))
    report.lines.insert(1, _rederive_line(derived, outputs, params))
    if args.format == "summary":
        print(f"{report.source}\nverdict: {report.verdict}")
    else:
        print(report)
    return OK if report.verdict == PASS else FAILED


def _integrity_line(problems: list[str]) -> VerifyLine:
    if problems:
        return VerifyLine("file hashes", FAIL, "; ".join(problems))
    return VerifyLine("file hashes", PASS, "all files match the provenance record")


def _rederive_line(derived: Sequence[SetCoverInstance], outputs: Sequence[Output], params: PipelineParams) -> VerifyLine:
    """The outputs' source instances must be the padded re-derivation of the source file."""
    if len(derived) != len(outputs):
        return VerifyLine("source re-derivation", FAIL, f"{len(derived)} derived sources, {len(outputs)} outputs")
    for i, (d, out) in enumerate(zip(derived, outputs), start=1):
        if pad_partition(d, params.k_effective) != out.implicit.src:
            return VerifyLine("source re-derivation", FAIL, f"output {i} source differs from the re-derived instance")
        if out.explicit is not None and out.explicit.set_ids != out.implicit.set_ids:
            return VerifyLine("source re-derivation", FAIL, f"output {i} instance set ids differ from its bundle")
    return VerifyLine("source re-derivation", PASS, "bundle sources equal the re-derived padded instances")


# ---------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized tie-breaking (default 0)")
    p.add_argument("--budget", type=int, default=None, help="work budget in elementary steps")
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("text", "summary"), default="text")
    p.add_argument("--size-budget", type=int, default=None, help="max universe size to materialize")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="gapcover", description="Gap-producing reductions for parameterized Set Cover.")
    top = parser.add_subparsers(dest="command", required=True)

    def group(name: str, help: str):
        sp = top.add_parser(name, help=help)
        return sp.add_subparsers(dest="action", required=True)

    def leaf(sub, name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=fn)
        return p

    g = group("universal", "(n, k)-universal sets")
    p = leaf(g, "build", cmd_universal_build, "build a universal set")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p = leaf(g, "verify", cmd_universal_verify, "exhaustively verify a universal-set file")
    p.add_argument("file")

    g = group("gadget", "gap-gadgets")
    p = leaf(g, "build", cmd_gadget_build, "build a gap-gadget")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p = leaf(g, "verify", cmd_gadget_verify, "check M1, M2, G3, G4 exhaustively")
    p.add_argument("file")
    p = leaf(g, "feasibility", cmd_gadget_feasibility, "report parameter preconditions")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--universe-size", type=int, default=None, help="source |U| for the greedy check")

    g = group("reduce", "single reductions")
    p = leaf(g, "sat", cmd_reduce_sat, "CNF -> partitioned Set Cover")
    p.add_argument("--cnf", required=True)
    p.add_argument("-k", type=int, required=True)
    p = leaf(g, "clique", cmd_reduce_clique, "multipartite graph -> Set Cover")
    p.add_argument("--graph", required=True)
    p.add_argument("-k", type=int, default=None)
    p = leaf(g, "vectorsum", cmd_reduce_vectorsum, "vector sum -> Set Cover")
    p.add_argument("--vectors", required=True)
    p = leaf(g, "ksum", cmd_reduce_ksum, "k-SUM -> vector-sum instances (--out is a directory)")
    p.add_argument("--lists", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--R", type=int, default=None)
    p = leaf(g, "hypercube", cmd_reduce_hypercube, "partitioned instance + gadget -> gapped instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--gadget", required=True)
    p.add_argument("--rainbow-certified", action="store_true")

    g = group("pipeline", "end-to-end gap pipelines (--out is a directory)")
    for name, fn, src in (("sat", cmd_pipeline_sat, "--cnf"), ("clique", cmd_pipeline_clique, "--graph"),
                          ("ksum", cmd_pipeline_ksum, "--lists")):
        p = leaf(g, name, fn, f"{name} pipeline")
        p.add_argument(src, required=True)
        if name == "sat":
            p.add_argument("-k", type=int, required=True)
        elif name == "clique":
            p.add_argument("-k", type=int, default=None)
        else:
            p.add_argument("--p", type=int, required=True)
            p.add_argument("--d", type=int, required=True)
            p.add_argument("--R", type=int, default=None)
        p.add_argument("--delta", type=float, default=0.5 if name != "clique" else 0.0)
        p.add_argument("--epsilon", type=float, default=0.1)
        p.add_argument("--h", type=int, default=None, help="requested gap h (rounded to a power of two)")

    g = group("solve", "Set Cover oracles")
    p = leaf(g, "exact", cmd_solve_exact, "exact optimum up to a bound")
    p.add_argument("--instance", required=True, help="instance or hypercube bundle")
    p.add_argument("--bound", type=int, required=True)
    p = leaf(g, "greedy", cmd_solve_greedy, "greedy cover")
    p.add_argument("--instance", required=True)

    g = group("verify", "verification")
    p = leaf(g, "pipeline", cmd_verify_pipeline, "two-sided check of a pipeline run")
    p.add_argument("--provenance", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return args.func(args)
    except (GapCoverError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
