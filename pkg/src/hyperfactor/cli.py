"""Command-line interface: ``hyperfactor <command> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .absorbers import (
    AbsorbingConstants,
    absorb,
    build_absorbing_set,
    compact_template,
    find_simple_absorber,
    is_simple_absorber,
)
from .constructions import build_split_host, sublinear_counterexample
from .exact import as_fraction
from .exceptions import AbsorberBuildError, AbsorptionError, GuardError, HyperfactorError
from .experiments import (
    ExperimentSpec,
    bisect_threshold,
    counterexample_experiment,
    emit_outputs,
    prop2_experiment,
    scan_threshold,
    summary_json,
)
from .factor import FACTOR, NO_FACTOR, has_factor
from .hypergraph import Hypergraph, complete, format_khg, read_khg
from .pattern import Pattern, alpha_is_zero, d_star, is_strictly_balanced, link_is_partite, phi
from .random_models import SeededSampler, perturb, sample_binomial, sample_coupled

EXIT_GUARD = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _vertices(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _load_pattern(path: str) -> Pattern:
    return Pattern(read_khg(path))


# --- commands -----------------------------------------------------------------------


def cmd_params(args) -> int:
    F = _load_pattern(args.pattern)
    ds = d_star(F)
    out = {
        "k": F.k,
        "b": F.b,
        "edges": F.f,
        "d_star": str(ds.value),
        "J": {"vertices": list(ds.J_vertices), "edges": [list(e) for e in ds.J.edges]},
        "strictly_balanced": is_strictly_balanced(F),
        "alpha_is_zero": alpha_is_zero(F),
        "partite_links": [v for v in range(F.b) if link_is_partite(F, v)],
    }
    if args.n is not None and args.p is not None:
        log_phi, minimiser = phi(F, args.n, math.log(args.p))
        out["log_phi"] = log_phi
        out["phi_minimiser_edges"] = [list(e) for e in minimiser.edges]
    print(json.dumps(out, indent=2))
    return 0


def cmd_gen(args) -> int:
    sampler = SeededSampler(args.seed, args.stream)
    host = read_khg(args.host) if args.host else None
    if host is not None and (host.n != args.n or host.k != args.k):
        raise HyperfactorError(f"host has (k, n) = ({host.k}, {host.n})")

    def finish(G: Hypergraph) -> Hypergraph:
        return G if host is None else host.union(G)

    if args.coupled:
        ps = [float(p) for p in args.coupled.split(",")]
        stem = args.out or "sample"
        for i, G in enumerate(sample_coupled(args.n, args.k, ps, sampler)):
            Path(f"{stem}.{i}.khg").write_text(format_khg(finish(G)))
        return 0
    if args.p is None:
        raise HyperfactorError("gen needs --p or --coupled")
    _emit(format_khg(finish(sample_binomial(args.n, args.k, args.p, sampler))), args.out)
    return 0


def cmd_construct(args) -> int:
    if args.which == "split-host":
        host = build_split_host(args.n, args.k, as_fraction(args.eta))
        side = {"delta_1": host.graph.min_degree(1), "A": len(host.A), "eta": str(host.eta)}
    else:
        setup = sublinear_counterexample(args.n, args.k, args.omega)
        host = setup.host
        side = {"delta_1": host.graph.min_degree(1), "A": len(host.A), "p": setup.p,
                "omega": args.omega, "eta_requested": setup.eta_requested,
                "eta_realized": str(setup.eta_realized)}
    _emit(format_khg(host.graph), args.out)
    sidecar = json.dumps(side, indent=2) + "\n"
    if args.out:
        Path(args.out + ".json").write_text(sidecar)
    else:
        sys.stderr.write(sidecar)
    return 0


def cmd_factor(args) -> int:
    F = _load_pattern(args.pattern)
    H = read_khg(args.host)
    result = has_factor(F, H, budget=args.budget)
    if args.witness:
        payload = {"outcome": result.outcome, "reason": result.reason, "nodes": result.nodes,
                   "tiling": result.tiling.to_json() if result.tiling else None}
        Path(args.witness).write_text(json.dumps(payload, indent=2) + "\n")
    print(result.outcome)
    return {FACTOR: 0, NO_FACTOR: 1}.get(result.outcome, 2)


def cmd_absorber_find(args) -> int:
    F = _load_pattern(args.pattern)
    host = read_khg(args.host)
    instance = perturb(host, args.random_p, SeededSampler(args.seed))
    S = _vertices(args.s)
    forbidden = _vertices(args.forbidden) if args.forbidden else []
    structure = find_simple_absorber(instance, S, F, forbidden)
    if structure is None:
        print(json.dumps({"found": False}))
        return 1
    out = {"found": True, **structure.to_json(),
           "verified": is_simple_absorber(instance.union, S, structure, F)}
    print(json.dumps(out, indent=2))
    return 0


def cmd_absorber_pipeline(args) -> int:
    F = _load_pattern(args.pattern) if args.pattern else Pattern.single_edge(args.k)
    H = read_khg(args.host) if args.host else complete(args.n, F.k)
    if args.q is None:
        constants = AbsorbingConstants.from_rho(args.rho, F.b)
    else:
        constants = AbsorbingConstants.of(args.rho, args.q, args.beta, args.xi)
    template = None
    if args.template == "compact":
        # m is not known before X is sampled; the builder checks the shape
        template = compact_template(args.m, constants.beta)
    trace = {"constants": constants.to_json()}
    try:
        state = build_absorbing_set(H, F, constants, sampler=SeededSampler(args.seed),
                                    template=template, absorber_size=args.absorber_size)
    except AbsorberBuildError as err:
        trace.update(err.trace or {})
        trace["ok"] = False
        print(json.dumps(trace, indent=2, default=str))
        return 1
    trace.update(state.trace)
    trace["ok"] = True
    trace["A"] = list(state.vertices)
    if args.leftover is not None:
        R = _vertices(args.leftover)
        try:
            tiling = absorb(state, R)
            trace["absorb"] = {"R": R, "copies": tiling.to_json()}
        except AbsorptionError as err:
            trace["absorb"] = {"R": R, "error": str(err)}
            trace["ok"] = False
    print(json.dumps(trace, indent=2, default=str))
    return 0 if trace["ok"] else 1


def cmd_scan(args) -> int:
    spec = ExperimentSpec.load(args.spec)
    if spec.kind == "counterexample":
        if spec.omega is None:
            raise HyperfactorError("counterexample scans need omega")
        rows, summary = counterexample_experiment(spec.n_list, spec.k, spec.omega, spec.seeds)
        if spec.output:
            lines = ["n,seed,p,isolated,A,forced"]
            lines += [f"{r.n},{r.seed},{r.p!r},{r.isolated},{r.a_size},{int(r.forced)}" for r in rows]
            Path(spec.output).write_text("\n".join(lines) + "\n")
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0
    if spec.kind == "prop2":
        result = prop2_experiment(spec)
    elif spec.bisect and not (spec.c_list or spec.p_list):
        out = {}
        for n in spec.n_list:
            estimate, history = bisect_threshold(spec, n, spec.bisect.get("low", 0.01),
                                                 spec.bisect.get("high", 100.0),
                                                 spec.bisect.get("iterations", 8))
            out[n] = {"c_hat": estimate, "evaluations": history}
        print(json.dumps(out, indent=2))
        return 0
    else:
        result = scan_threshold(spec)
    if spec.output:
        emit_outputs(result.records, spec.output, spec.svg, result.cells)
    print(summary_json(result))
    return 0


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperfactor",
                                     description="F-factors in randomly perturbed hypergraphs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="d*, densest subgraph, balancedness and link partiteness")
    p.add_argument("--pattern", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("gen", help="sample a binomial random k-graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--host", help="khg file to add the sample to")
    p.add_argument("--coupled", help="comma-separated ascending probabilities")
    p.add_argument("--out", help="output file (stem for --coupled)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("construct", help="extremal host constructions")
    csub = p.add_subparsers(dest="which", required=True)
    c = csub.add_parser("split-host")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--eta", required=True, help="rational, e.g. 1/3")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)
    c = csub.add_parser("counterexample")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--omega", type=float, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    p = sub.add_parser("factor", help="decide whether a host has an F-factor")
    p.add_argument("--pattern", required=True)
    p.add_argument("--host", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--witness")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("absorber", help="absorber search and the absorbing-set pipeline")
    asub = p.add_subparsers(dest="which", required=True)
    a = asub.add_parser("find")
    a.add_argument("--host", required=True)
    a.add_argument("--random-p", type=float, required=True)
    a.add_argument("--pattern", required=True)
    a.add_argument("--s", required=True, help="comma-separated vertices s_1,...,s_b")
    a.add_argument("--forbidden")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_absorber_find)
    a = asub.add_parser("pipeline")
    a.add_argument("--rho", required=True)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--k", type=int, default=3)
    a.add_argument("--pattern")
    a.add_argument("--host", help="khg host (default: complete)")
    a.add_argument("--q")
    a.add_argument("--beta")
    a.add_argument("--xi")
    a.add_argument("--template", choices=("complete", "compact"), default="complete")
    a.add_argument("--m", type=int, default=1, help="m for --template compact")
    a.add_argument("--absorber-size", type=int)
    a.add_argument("--leftover", help="comma-separated R to absorb after building")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_absorber_pipeline)

    p = sub.add_parser("scan", help="run a JSON experiment spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "absorber" and args.which == "pipeline" and args.q is not None:
        if args.beta is None or args.xi is None:
            build_parser().error("--q requires --beta and --xi")
    try:
        return args.func(args)
    except GuardError as err:
        print(f"guard: {err}", file=sys.stderr)
        return EXIT_GUARD
    except (HyperfactorError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
