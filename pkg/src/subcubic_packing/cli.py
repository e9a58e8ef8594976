"""Command-line interface.

Exit codes: 0 verified / SAT / success, 1 refuted / UNSAT / a check failed,
2 usage or I/O error (including refused certification), 3 timeout or
inconclusive. Defaults can be overridden with ``SUBCUBIC_PACKING_*``
environment variables (see ``ENV_DEFAULTS``).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .certify import (
    DEFAULT_K_MAX_DIAM,
    PAPER_TRUSTED,
    CertificateError,
    CertificationRefused,
    check_certificate,
    certify_chi_rho_lower,
    halves_summary,
    verify_lemma,
    verify_theorem,
)
from .families import (
    LabeledFamilyGraph,
    build_family,
    check_registry,
    random_connected_graph,
)
from .formats import GraphFormatError, encode_graph6, read_graph_file, write_dimacs
from .graph import GraphError, degree_profile, eccentricities, is_connected
from .packing import (
    SolverConfig,
    SolverTimeout,
    Status,
    counting_lower_bound,
    decide_packing_colorable,
    greedy_upper_bound,
    max_i_packing,
    packing_chromatic_number,
)
from .report import ReportError, dumps, graph_document, load_certificate, make_report, result, write_atomic

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3

ENV_PREFIX = "SUBCUBIC_PACKING_"
ENV_DEFAULTS = {
    "TIME_LIMIT": "300",
    "NODE_LIMIT": str(10**9),
    "ORDERING": "min-domain",
    "K_MAX_DIAM": str(DEFAULT_K_MAX_DIAM),
    "SEED": "0",
    "FORMAT": "json",
}


def env_default(name: str) -> str:
    return os.environ.get(ENV_PREFIX + name, ENV_DEFAULTS[name])


class UsageError(Exception):
    pass


# --- argument parsing ---------------------------------------------------------


def _add_graph_source(p: argparse.ArgumentParser, allow_file: bool = True) -> None:
    p.add_argument("--family", choices=["h", "g0", "tree", "gk", "random"], help="built-in graph family")
    p.add_argument("--k", type=int, help="level for --family gk (0 gives G0)")
    p.add_argument("--depth", type=int, help="depth for --family tree")
    p.add_argument("--n", type=int, help="vertex count for --family random")
    p.add_argument("--p", type=float, default=0.3, help="extra-edge probability for --family random")
    if allow_file:
        p.add_argument("--in", dest="input", metavar="PATH", help="graph file (.g6, .dimacs, .json)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="write the output here (atomic replace) instead of stdout")
    p.add_argument("--seed", type=int, default=int(env_default("SEED")), help="seed for --family random")


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time-limit", type=float, default=float(env_default("TIME_LIMIT")), metavar="S")
    p.add_argument("--node-limit", type=int, default=int(env_default("NODE_LIMIT")))
    p.add_argument("--ordering", choices=["min-domain", "power2-degree"], default=env_default("ORDERING"))
    p.add_argument("--no-forward-check", action="store_true", help="disable pruning P1 (domain forward checking)")
    p.add_argument("--no-singleton-rule", action="store_true", help="disable pruning P2")
    p.add_argument("--no-capacity-rule", action="store_true", help="disable pruning P3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcubic-packing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a family graph and export it")
    _add_graph_source(p, allow_file=False)
    p.add_argument("--format", choices=["graph6", "dimacs", "json"], default=env_default("FORMAT"))
    p.add_argument("--labels", metavar="PATH", help="label sidecar JSON (default: <out>.labels.json)")
    _add_output(p)

    p = sub.add_parser("analyze", help="counts, degree profile, diameter")
    _add_graph_source(p)
    p.add_argument("--figure", metavar="PATH", help="render the distance profile to this image file")
    _add_output(p)

    p = sub.add_parser("solve", help="exact packing-coloring search")
    _add_graph_source(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--decide", type=int, metavar="K", help="is there a packing K-coloring?")
    mode.add_argument("--exact", action="store_true", help="compute the packing chromatic number")
    _add_solver(p)
    _add_output(p)

    p = sub.add_parser("packing", help="maximum i-packings")
    _add_graph_source(p)
    p.add_argument("--i", type=int, required=True, dest="i")
    p.add_argument("--enumerate", action="store_true", help="list every maximum i-packing")
    _add_output(p)

    p = sub.add_parser("verify", help="re-derive a lemma or the main bounds for one G_k")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--lemma", type=int, choices=range(1, 6), metavar="1..5")
    which.add_argument("--theorem", action="store_true")
    p.add_argument("--k", type=int, help="level for --theorem")
    p.add_argument("--k-max-diam", type=int, default=int(env_default("K_MAX_DIAM")))
    p.add_argument("--trust-diameter", action="store_true")
    _add_solver(p)
    _add_output(p)

    p = sub.add_parser("certify", help="certificate for chi_rho(G_k) >= 2k+9")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--k", type=int)
    what.add_argument("--check", metavar="PATH", help="re-validate a saved report or certificate")
    p.add_argument("--k-max-diam", type=int, default=int(env_default("K_MAX_DIAM")))
    p.add_argument("--trust-diameter", action="store_true", help="accept diameter bounds above --k-max-diam unchecked")
    p.add_argument("--figure", metavar="PATH", help="render the level-by-level chain to this image file")
    _add_solver(p)
    _add_output(p)
    return parser


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        time_limit=args.time_limit,
        node_limit=args.node_limit,
        ordering=args.ordering,
        forward_check=not args.no_forward_check,
        use_singleton_rule=not args.no_singleton_rule,
        use_packing_size_bounds=not args.no_capacity_rule,
    )


def _load_graph(args: argparse.Namespace) -> tuple[Any, LabeledFamilyGraph | None, dict[str, Any]]:
    if getattr(args, "input", None):
        if args.family:
            raise UsageError("give either --family or --in, not both")
        return read_graph_file(args.input), None, {"input": str(args.input)}
    if not args.family:
        raise UsageError("a graph is required: --family ... or --in PATH")
    inputs: dict[str, Any] = {"family": args.family}
    if args.family == "random":
        if args.n is None:
            raise UsageError("--family random needs --n")
        inputs.update(n=args.n, p=args.p, seed=args.seed)
        return random_connected_graph(args.n, args.p, args.seed), None, inputs
    if args.family == "gk":
        if args.k is None:
            raise UsageError("--family gk needs --k")
        inputs["k"] = args.k
    if args.family == "tree":
        if args.depth is None:
            raise UsageError("--family tree needs --depth")
        inputs["depth"] = args.depth
    lg = build_family(args.family, k=args.k, depth=args.depth)
    return lg.graph, lg, inputs


def _names(lg: LabeledFamilyGraph | None, verts) -> list:
    return [lg.label(v) for v in verts] if lg is not None else [int(v) for v in verts]


def _coloring_dict(lg: LabeledFamilyGraph | None, colors) -> dict[str, int]:
    return {str(name): int(c) for name, c in zip(_names(lg, range(len(colors))), colors)}


# --- commands ---------------------------------------------------------------


def cmd_build(args: argparse.Namespace) -> tuple[int, str | None, dict | None]:
    g, lg, inputs = _load_graph(args)
    labels = [lg.label(v) for v in range(g.n)] if lg else None
    inputs["format"] = args.format
    if args.format == "graph6":
        text = encode_graph6(g) + "\n"
    elif args.format == "dimacs":
        comments = [f"family {lg.family_id}"] if lg else []
        text = write_dimacs(g, comments)
    else:
        doc = graph_document(g, labels, lg.family_id if lg else None)
        report = make_report("build", inputs, {"graph": result(doc, "construction")}, 0.0)
        return EXIT_OK, None, report
    sidecar = args.labels or (f"{args.out}.labels.json" if args.out else None)
    if sidecar and labels is not None:
        write_atomic(sidecar, dumps({"family": lg.family_id, "labels": labels}))
    return EXIT_OK, text, None


def cmd_analyze(args: argparse.Namespace, start: float) -> tuple[int, str | None, dict | None]:
    g, lg, inputs = _load_graph(args)
    prof = degree_profile(g)
    results: dict[str, Any] = {
        "vertices": result(g.n, "construction" if lg else "input"),
        "edges": result(g.m, "construction" if lg else "input"),
        "degree_profile": result({str(d): c for d, c in prof.counts.items()}, "construction" if lg else "input"),
        "max_degree": result(prof.max_degree, "construction" if lg else "input"),
        "subcubic": result(prof.max_degree <= 3, "construction" if lg else "input"),
    }
    connected = is_connected(g)
    results["connected"] = result(connected, "bfs")
    if connected and g.n:
        ecc = eccentricities(g)
        vals, counts = np.unique(ecc, return_counts=True)
        results["diameter"] = result(int(ecc.max()), "bfs")
        results["radius"] = result(int(ecc.min()), "bfs")
        results["eccentricity_profile"] = result({str(int(e)): int(c) for e, c in zip(vals, counts)}, "bfs")
    if lg is not None:
        results["degree_2_vertices"] = result(_names(lg, [v for v in range(g.n) if g.degree(v) == 2]), "construction")
        problems = check_registry(lg)
        results["copy_registry_ok"] = result(not problems, "construction")
        if lg.family == "Gk":
            results["halves"] = result(halves_summary(lg), "construction")
    figures = []
    if args.figure:
        from .plotting import plot_distance_profile

        title = lg.family_id if lg else str(inputs.get("input", ""))
        figures.append(plot_distance_profile(g, args.figure, title))
    report = make_report("analyze", inputs, results, time.perf_counter() - start, figures=figures, distances=True)
    return EXIT_OK, None, report


def cmd_solve(args: argparse.Namespace, start: float) -> tuple[int, str | None, dict | None]:
    g, lg, inputs = _load_graph(args)
    cfg = _solver_config(args)
    inputs["config"] = _cfg_inputs(cfg)
    results: dict[str, Any] = {}
    if args.decide is not None:
        inputs["decide"] = args.decide
        res = decide_packing_colorable(g, args.decide, cfg)
        results["status"] = result(res.status.value, "solver")
        results["nodes"] = result(res.nodes, "solver")
        results["elapsed_seconds"] = result(round(res.elapsed, 6), "solver")
        if res.witness is not None:
            results["witness"] = result(_coloring_dict(lg, res.witness.colors), "solver")
        code = {Status.SAT: EXIT_OK, Status.UNSAT: EXIT_FAIL, Status.TIMEOUT: EXIT_TIMEOUT}[res.status]
    else:
        inputs["exact"] = True
        upper, _ = greedy_upper_bound(g)
        results["greedy_upper_bound"] = result(upper, "greedy")
        try:
            chi = packing_chromatic_number(g, cfg)
        except SolverTimeout as exc:
            results["status"] = result("TIMEOUT", "solver")
            results["lower_bound"] = result(exc.lower, "solver")
            results["nodes"] = result(exc.nodes, "solver")
            code = EXIT_TIMEOUT
        else:
            results["status"] = result("SOLVED", "solver")
            results["chi_rho"] = result(chi.value, "solver")
            results["witness"] = result(_coloring_dict(lg, chi.witness.colors), "solver")
            results["runs"] = result(
                [{"k": r.k, "status": r.status.value, "nodes": r.nodes} for r in chi.results], "solver"
            )
            code = EXIT_OK
    report = make_report("solve", inputs, results, time.perf_counter() - start, exit_code=code)
    return code, None, report


def _cfg_inputs(cfg: SolverConfig) -> dict[str, Any]:
    return {
        "time_limit": cfg.time_limit,
        "node_limit": cfg.node_limit,
        "ordering": cfg.ordering,
        "forward_check": cfg.forward_check,
        "singleton_rule": cfg.use_singleton_rule,
        "capacity_rule": cfg.use_packing_size_bounds,
    }


def cmd_packing(args: argparse.Namespace, start: float) -> tuple[int, str | None, dict | None]:
    g, lg, inputs = _load_graph(args)
    inputs.update(i=args.i, enumerate=args.enumerate)
    res = max_i_packing(g, args.i, args.enumerate)
    results = {
        "size": result(res.size, "solver"),
        "witness": result(_names(lg, res.witness), "solver"),
    }
    if res.maximum_sets is not None:
        results["maximum_sets"] = result([_names(lg, s) for s in res.maximum_sets], "solver")
        results["count"] = result(len(res.maximum_sets), "solver")
    report = make_report("packing", inputs, results, time.perf_counter() - start)
    return EXIT_OK, None, report


def cmd_verify(args: argparse.Namespace, start: float) -> tuple[int, str | None, dict | None]:
    cfg = _solver_config(args)
    if args.theorem:
        if args.k is None:
            raise UsageError("--theorem needs --k")
        rep = verify_theorem(args.k, args.k_max_diam, args.trust_diameter, cfg)
        inputs = {"theorem": True, "k": args.k, "k_max_diam": args.k_max_diam, "trust_diameter": args.trust_diameter}
    else:
        if args.k is not None:
            raise UsageError("--k only applies to --theorem")
        rep = verify_lemma(args.lemma, cfg)
        inputs = {"lemma": args.lemma}
    code = EXIT_OK if rep.passed else EXIT_FAIL
    results = {"passed": result(rep.passed, "certificate" if rep.certificate else "bfs")}
    if rep.certificate is not None:
        results["conclusion"] = result(str(rep.certificate.conclusion), "certificate")
        results["trust_level"] = result(rep.certificate.trust_level, "certificate")
    report = make_report(
        "verify", inputs, results, time.perf_counter() - start,
        checks=_jsonable(rep.checks), certificate=rep.certificate, exit_code=code,
    )
    if rep.certificate is not None and rep.certificate.trust_level == PAPER_TRUSTED:
        _warn_trusted()
    return code, None, report


def cmd_certify(args: argparse.Namespace, start: float) -> tuple[int, str | None, dict | None]:
    cfg = _solver_config(args)
    if args.check:
        cert = load_certificate(Path(args.check).read_text())
        inputs: dict[str, Any] = {"check": str(args.check), "trust_diameter": args.trust_diameter}
    else:
        cert = certify_chi_rho_lower(args.k, args.k_max_diam, args.trust_diameter, cfg)
        inputs = {"k": args.k, "k_max_diam": args.k_max_diam, "trust_diameter": args.trust_diameter}
    conclusion = check_certificate(cert, allow_paper_trusted=args.trust_diameter)
    diameters = {
        s.claim.graph: {"bound": s.claim.value, "computed": s.evidence.get("computed_diameter"), "rule": s.rule}
        for s in cert.steps
        if s.claim.kind == "DiameterUpper"
    }
    trusted = cert.trust_level == PAPER_TRUSTED
    results = {
        "conclusion": result(str(conclusion), "paper-trusted" if trusted else "certificate"),
        "chi_rho_lower": result(conclusion.value, "paper-trusted" if trusted else "certificate"),
        "trust_level": result(cert.trust_level, "certificate"),
        "steps": result(len(cert.steps), "certificate"),
        "diameters": result(diameters, "paper-trusted" if trusted else "bfs"),
    }
    figures = []
    if args.figure:
        from .plotting import plot_certificate_chain

        figures.append(plot_certificate_chain(cert, args.figure))
    report = make_report(
        "certify", inputs, results, time.perf_counter() - start,
        certificate=cert, figures=figures, exit_code=EXIT_OK,
    )
    if trusted:
        _warn_trusted()
    return EXIT_OK, None, report


def _warn_trusted() -> None:
    print(
        "WARNING: some diameter premises were taken on trust (trust level paper-trusted-diameter); "
        "the conclusion is not fully machine-checked",
        file=sys.stderr,
    )


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


COMMANDS = {
    "analyze": cmd_analyze,
    "solve": cmd_solve,
    "packing": cmd_packing,
    "verify": cmd_verify,
    "certify": cmd_certify,
}


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    start = time.perf_counter()
    try:
        if args.command == "build":
            code, text, report = cmd_build(args)
        else:
            code, text, report = COMMANDS[args.command](args, start)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateError as exc:
        print(f"certificate check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (GraphFormatError, ReportError, OSError, GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out = text if report is None else dumps(report)
    try:
        if args.out:
            write_atomic(args.out, out)
            print(f"wrote {args.out}", file=sys.stderr)
        else:
            sys.stdout.write(out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
