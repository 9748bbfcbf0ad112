"""Command-line front end.

Exit codes: 0 ok / yes, 2 input error, 3 no, 4 inapplicable, 5 numerical failure.
"""
import argparse
import json
import sys

import numpy as np

from .bipartite import structure_report
from .closure import ClosureError, identify_full, lie_closure
from .kak import KAKError
from .operators import DEFAULT_TOL, StructureError, Tolerance, is_unitary
from .steering import (
    DEFAULT_MAP_TOL, SynthesisError, build_complete_steering, build_steering,
    cartan_pair_from_structure, verify_steering,
)
from .symmetric import (
    CartanPairError, DEFAULT_SEED, NormalSpaceError, build_block_graph, check_equal_blocks,
    duct_canonicalize, extract_normal_space, maximal_abelian_in_P, projection_basis,
)
from .systemfile import SpecFileError, load_matrix, load_spec, matrix_to_json
from .verdict import (
    DensityState, OrbitError, VerdictResult, decide, default_rho_S, necessary_condition,
)

EXIT_OK, EXIT_INPUT, EXIT_NO, EXIT_INAPPLICABLE, EXIT_NUMERIC = 0, 2, 3, 4, 5


class InputError(Exception):
    pass


def _tolerance(args, spec):
    tol = spec.tolerance or DEFAULT_TOL
    if args.tol is not None:
        tol = Tolerance(rank_tol=args.tol, residual_tol=tol.residual_tol)
    return tol


def _state(args_path, embedded, n, label):
    if args_path is not None:
        m = load_matrix(args_path, n, label)
    elif embedded is not None:
        m = embedded
    else:
        raise InputError(f"{label} is required (flag or embedded in the system file)")
    try:
        return DensityState(m)
    except StructureError as exc:
        raise InputError(f"{label}: {exc}") from None


def _algebra(spec, tol):
    return lie_closure(spec.generators(), tol)


def symmetric_diagnostics(report, tol, seed):
    """Torus, block partition, block graph and normal-space case tags for P."""
    out = {}
    if report.P is None or not report.P.dim:
        return out
    torus = maximal_abelian_in_P(report.P, tol, seed)
    part = projection_basis(torus, tol, seed)
    graph = build_block_graph(report.P, part, tol)
    out.update(
        torus_dim=torus.dim,
        block_sizes=list(part.sizes),
        graph_edges=sorted([list(e) for e in graph.edges]),
        graph_connected=graph.connected,
        equal_blocks=check_equal_blocks(part, graph),
    )
    cases = {}
    if graph.connected and len(set(part.sizes)) == 1:
        for j, k in sorted(graph.edges):
            try:
                canon, _, _ = duct_canonicalize(extract_normal_space(report.P, part, j, k, tol), tol)
                tag = canon.canonical_case
                if canon.signature is not None:
                    tag += f"({canon.signature[0]},{canon.signature[1]})"
            except (NormalSpaceError, StructureError) as exc:
                tag = f"error: {exc}"
            cases[f"{j},{k}"] = tag
    out["normal_space_cases"] = cases
    return out


def cmd_analyze(args):
    spec = load_spec(args.file)
    tol = _tolerance(args, spec)
    alg = _algebra(spec, tol)
    split = spec.split
    rep = structure_report(alg, split, tol)
    full = identify_full(alg, split.n_sa)
    doc = {
        "command": "analyze",
        "file": spec.source,
        "n_s": split.n_s,
        "n_a": split.n_a,
        "dim_L": alg.dim,
        "full": full.value,
        "assumption_Aa": rep.assumption_Aa,
        "assumption_Ab": rep.assumption_Ab,
        "K_dim": rep.K.dim,
        "P_dim": None if rep.P is None else rep.P.dim,
        "L_S_dim": None if rep.L_S is None else rep.L_S.dim,
        "P_contains_i1": None if rep.P is None else rep.P.contains(1j * np.eye(split.n_s)),
        "decomposition_consistent": rep.decomposition_consistent,
        "K_cap_P_dim": rep.K_cap_P_dim,
    }
    doc.update(symmetric_diagnostics(rep, tol, args.seed))
    return EXIT_OK, doc


def cmd_decide(args):
    spec = load_spec(args.file)
    tol = _tolerance(args, spec)
    rho_a = _state(args.rho_a, spec.rho_a, spec.n_a, "rho_a")
    alg = _algebra(spec, tol)
    rep = structure_report(alg, spec.split, tol)
    verdict = decide(alg, spec.split, rho_a, tol, rep)
    nec = None
    if spec.n_s > 1:
        rho_s = DensityState(spec.rho_s) if spec.rho_s is not None else default_rho_S(spec.split, rep.K)
        nec = necessary_condition(alg, spec.split, rho_s, rho_a, tol, args.max_iter).passed
    doc = {"command": "decide", "file": spec.source}
    doc.update(verdict.to_dict())
    doc["necessary_check"] = nec
    code = {
        VerdictResult.COMPLETE: EXIT_OK,
        VerdictResult.PURE_ANCILLA: EXIT_OK,
        VerdictResult.NOT: EXIT_NO,
        VerdictResult.INAPPLICABLE: EXIT_INAPPLICABLE,
    }[verdict.result]
    return code, doc


def _plan_json(plan, report):
    return {
        "target": matrix_to_json(plan.target),
        "factors": [
            {
                "exponent": matrix_to_json(f.exponent),
                "subspace": f.subspace,
                "certified": f.certified,
                "residual": f.residual,
            }
            for f in plan.factors
        ],
        "assembled": matrix_to_json(plan.assembled),
        "kak_method": None if plan.kak is None else plan.kak.method,
        "kak_residual": None if plan.kak is None else plan.kak.residual,
        "ancilla_rotation": None if plan.ancilla_rotation is None else matrix_to_json(plan.ancilla_rotation),
        "verification": report.to_dict(),
    }


def cmd_synthesize(args):
    spec = load_spec(args.file)
    tol = _tolerance(args, spec)
    rho_a = _state(args.rho_a, spec.rho_a, spec.n_a, "rho_a")
    if args.target is not None:
        x = load_matrix(args.target, spec.n_s, "target")
    elif spec.target_x is not None:
        x = spec.target_x
    else:
        raise InputError("target is required (--target or target_x in the system file)")
    if not is_unitary(x, 1e-8):
        raise InputError("target: matrix is not unitary")
    alg = _algebra(spec, tol)
    rep = structure_report(alg, spec.split, tol)
    verdict = decide(alg, spec.split, rho_a, tol, rep)
    doc = {"command": "synthesize", "file": spec.source, "verdict": verdict.to_dict()}
    if not verdict.result.is_yes:
        doc["refused"] = (
            "synthesis needs an indirectly controllable system: complete control of S+A, "
            "or a two-level ancilla in a pure state with L_S = u(n_S)"
        )
        code = EXIT_INAPPLICABLE if verdict.result is VerdictResult.INAPPLICABLE else EXIT_NO
        return code, doc
    if verdict.result is VerdictResult.COMPLETE:
        plan = build_complete_steering(x, alg, spec.split)
    else:
        pair = cartan_pair_from_structure(rep, tol, args.seed)
        plan = build_steering(x, alg, spec.split, rep, pair, rho_a, tol)
    report = verify_steering(plan, rho_a, args.map_tol)
    doc["plan"] = _plan_json(plan, report)
    return (EXIT_OK if report.passed else EXIT_NUMERIC), doc


def cmd_check_necessary(args):
    spec = load_spec(args.file)
    tol = _tolerance(args, spec)
    rho_a = _state(args.rho_a, spec.rho_a, spec.n_a, "rho_a")
    alg = _algebra(spec, tol)
    if args.rho_s is not None or spec.rho_s is not None:
        rho_s = _state(args.rho_s, spec.rho_s, spec.n_s, "rho_s")
    else:
        rho_s = default_rho_S(spec.split, structure_report(alg, spec.split, tol).K)
    if rho_s.is_maximally_mixed(tol):
        raise InputError("rho_s: the maximally mixed state is excluded")
    res = necessary_condition(alg, spec.split, rho_s, rho_a, tol, args.max_iter)
    doc = {"command": "check-necessary", "file": spec.source}
    doc.update(res.to_dict())
    return (EXIT_OK if res.passed else EXIT_NO), doc


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _text(doc, indent=0):
    lines = []
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append(" " * indent + f"{k}:")
            lines.extend(_text(v, indent + 2))
        elif isinstance(v, list) and v and isinstance(v[0], list) and isinstance(v[0][0], list):
            lines.append(" " * indent + f"{k}: <{len(v)}x{len(v)} matrix>")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(" " * indent + f"{k}: [{len(v)} items]")
        else:
            lines.append(" " * indent + f"{k}: {v}")
    return lines


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="rank tolerance (<= 1e-6)")
    common.add_argument("--map-tol", type=float, default=DEFAULT_MAP_TOL)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--json", action="store_true", help="emit one JSON document on stdout")
    common.add_argument("--max-iter", type=int, default=None, help="cap on orbit sweeps")

    p = argparse.ArgumentParser(prog="indirect-control", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="closure and structure report")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)
    d = sub.add_parser("decide", parents=[common], help="indirect-controllability verdict")
    d.add_argument("file")
    d.add_argument("--rho-a")
    d.set_defaults(func=cmd_decide)
    s = sub.add_parser("synthesize", parents=[common], help="build and verify a steering unitary")
    s.add_argument("file")
    s.add_argument("--target")
    s.add_argument("--rho-a")
    s.set_defaults(func=cmd_synthesize)
    c = sub.add_parser("check-necessary", parents=[common], help="ad-orbit necessary condition")
    c.add_argument("file")
    c.add_argument("--rho-s")
    c.add_argument("--rho-a")
    c.set_defaults(func=cmd_check_necessary)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code, doc = args.func(args)
    except (SpecFileError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # tolerance validation, dimension and structure errors on user input
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ClosureError, KAKError, OrbitError, SynthesisError, CartanPairError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    doc["exit_code"] = code
    if args.json:
        print(json.dumps(doc, default=_jsonable))
    else:
        print("\n".join(_text(doc)))
    return code


if __name__ == "__main__":
    sys.exit(main())
