"""Command-line surface.

Commands load a JSON problem file, run one pipeline stage, and write
machine-readable output. Exit codes: 0 success (or "sufficient"), 1 a
semantically negative answer (insufficient dataset / failed oracle
check), 2 malformed input, 3 enumeration budget exceeded. All outputs
are deterministic given the input file and --seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import hiring as hiring_mod
from . import oracle, selection
from .directions import CsMilpConfig, DirectionBasis, compute_dir_basis, default_config
from .errors import BudgetExceeded, ParseError, SuffdataError
from .linalg import SpanBasis, subspace_equal
from .model import (
    FullSpace,
    load_dataset,
    load_observations,
    load_problem,
    standardize,
)
from .recovery import recover_decision

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

log = logging.getLogger("suffdata")


def _configure_logging() -> None:
    level = os.environ.get("SUFFDATA_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _vec(a) -> list[float]:
    return [float(x) for x in np.asarray(a).ravel()]


def _mat(a) -> list[list[float]]:
    return [_vec(row) for row in np.atleast_2d(np.asarray(a))]


def _dir_basis_for(args, g, C):
    lp = standardize(g)
    overrides = {}
    if args.tol_zero is not None:
        overrides["tol_zero"] = args.tol_zero
    cfg = default_config(lp, C, **overrides)
    if args.eps is not None:
        cfg = CsMilpConfig(args.eps, cfg.m_primal, cfg.m_dual, cfg.m_lambda,
                           tol_zero=cfg.tol_zero,
                           max_alpha_redraws=cfg.max_alpha_redraws)
    return lp, compute_dir_basis(lp, C, cfg, args.seed)


def cmd_dir_basis(args) -> int:
    g, C = load_problem(args.input)
    if isinstance(C, FullSpace):
        lp = standardize(g)
        basis = selection.unrestricted_direction_span(lp)
        payload = {"basis": _mat(basis.vectors) if basis.dim else [],
                   "anchor": None, "iterations": basis.dim, "seed": args.seed}
        _emit(payload, args.output)
        return EXIT_OK
    lp, dirs = _dir_basis_for(args, g, C)
    payload = {
        "basis": _mat(dirs.basis.vectors) if dirs.basis.dim else [],
        "anchor": _vec(dirs.anchor_x0),
        "iterations": dirs.iterations,
        "seed": dirs.seed,
    }
    _emit(payload, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    g, C = load_problem(args.input)
    dataset = load_dataset(args.dataset, g.n_vars)
    lp = standardize(g)
    if isinstance(C, FullSpace):
        ok = selection.is_sufficient_unrestricted(dataset, lp)
        residual = None
        if not ok:
            target = selection.unrestricted_direction_span(lp)
            dirs = DirectionBasis(np.zeros(g.n_vars), target, target.dim, args.seed)
            residual = selection.unspanned_direction(dataset, dirs)
    else:
        _, dirs = _dir_basis_for(args, g, C)
        ok = selection.is_sufficient(dataset, dirs)
        residual = None if ok else selection.unspanned_direction(dataset, dirs)
    payload = {"sufficient": bool(ok),
               "residual_direction": None if residual is None else _vec(residual)}
    _emit(payload, args.output)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_select(args) -> int:
    g, C = load_problem(args.input)
    if isinstance(C, FullSpace):
        lp = standardize(g)
        target = selection.unrestricted_direction_span(lp)
        dirs = DirectionBasis(np.zeros(g.n_vars), target, target.dim, args.seed)
    else:
        _, dirs = _dir_basis_for(args, g, C)
    qb = selection.QueryBasis.canonical(g.n_vars)
    indices = selection.selected_indices(dirs, qb)
    dataset = selection.select_queries(dirs, qb)
    payload = {"indices": indices, "queries": _mat(dataset.queries) if dataset.size else []}
    _emit(payload, args.output)
    return EXIT_OK


def cmd_decide(args) -> int:
    g, C = load_problem(args.input)
    if isinstance(C, FullSpace):
        raise ParseError("decide requires a bounded uncertainty set")
    dataset = load_dataset(args.dataset, g.n_vars)
    obs = load_observations(args.observations)
    obs.check_against(dataset)
    lp = standardize(g)
    rec = recover_decision(dataset, obs, lp, C)
    payload = {
        "c_hat": _vec(rec.c_hat),
        "decision": _vec(rec.decision),
        "residual": rec.residual,
        "objective": rec.objective_at_c_hat,
    }
    _emit(payload, args.output)
    return EXIT_OK


def _oracle_checks(lp, C, sigma, seed) -> list[tuple[str, bool]]:
    catalog = oracle.enumerate_vertices(lp)
    rng = np.random.default_rng(seed)
    checks: list[tuple[str, bool]] = []

    ok = all(v.shape[0] == lp.n_total for v in catalog.vertices) and catalog.size > 0
    checks.append(("vertex-enumeration", bool(ok)))

    sym = all((b, a) not in catalog.adjacency for a, b in catalog.adjacency)
    checks.append(("adjacency-antisymmetric-pairs", bool(sym)))

    cones = [oracle.extreme_directions_at(catalog, lp, i) for i in range(catalog.size)]
    duality_ok = True
    coverage_ok = True
    for _ in range(200):
        c = rng.standard_normal(lp.n_total)
        mins = oracle.argmin_vertices(catalog, c)
        members = {i for i, cone in enumerate(cones) if oracle.cone_contains(cone, c)}
        duality_ok &= members == set(mins)
        coverage_ok &= len(members) >= 1
    checks.append(("optimality-cone-duality", bool(duality_ok)))
    checks.append(("cone-coverage", bool(coverage_ok)))

    if C is not None:
        delta = oracle.relevant_extreme_directions(lp, C, catalog=catalog, sigma=sigma)
        span_delta = SpanBasis.from_vectors(delta) if delta.size \
            else SpanBasis.empty(lp.n_original)
        span_reach = oracle.reachable_direction_span(lp, C, catalog=catalog, sigma=sigma)
        checks.append(("relevant-directions-vs-reachable-span",
                       bool(subspace_equal(span_delta, span_reach))))

    target = selection.unrestricted_direction_span(lp)
    full_diffs = [catalog.vertices[i, :lp.n_original] - catalog.vertices[0, :lp.n_original]
                  for i in range(1, catalog.size)]
    span_vertices = SpanBasis.from_vectors(np.array(full_diffs)) if full_diffs \
        else SpanBasis.empty(lp.n_original)
    checks.append(("all-vertex-differences-vs-kernel-characterization",
                   bool(subspace_equal(span_vertices, target))))
    return checks


def cmd_oracle_verify(args) -> int:
    g, C = load_problem(args.input)
    lp = standardize(g)
    C_arg = None if isinstance(C, FullSpace) else C
    checks = _oracle_checks(lp, C_arg, args.sigma_interior, args.seed)
    for name, passed in checks:
        sys.stdout.write(f"{name:<55s} {'PASS' if passed else 'FAIL'}\n")
    if args.output:
        payload = {"checks": [{"name": name, "passed": passed} for name, passed in checks]}
        _emit(payload, args.output)
    return EXIT_OK if all(p for _, p in checks) else EXIT_NEGATIVE


def cmd_hiring(args) -> int:
    try:
        cfg = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {args.input}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParseError("hiring config must be a JSON object")
    variant = cfg.get("variant", "vanilla")
    if variant not in hiring_mod.VARIANTS:
        raise ParseError(f"key 'variant' must be one of {hiring_mod.VARIANTS}")
    etas = cfg.get("etas")
    if not isinstance(etas, list) or not etas:
        raise ParseError("key 'etas' must be a nonempty list")
    d = cfg.get("d", 100)
    if not isinstance(d, int) or d < 1:
        raise ParseError("key 'd' must be a positive integer")
    trichotomy = bool(cfg.get("trichotomy", True))

    report = hiring_mod.run_experiment(etas, variant, args.seed, d=d,
                                       trichotomy=trichotomy)
    outdir = Path(args.output) if args.output else Path.cwd()
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"hiring_{variant}_seed{args.seed}.csv"
    svg_path = outdir / f"hiring_{variant}_seed{args.seed}.svg"
    hiring_mod.write_report_csv(report, csv_path)
    instance = hiring_mod.generate_instance(d, variant, etas[0], args.seed)
    hiring_mod.render_report_figure(report, instance, svg_path)
    payload = {
        "variant": variant,
        "seed": args.seed,
        "counts": list(report.counts),
        "counts_nondecreasing": report.counts_nondecreasing(),
        "recovery_optimal": [r.recovery_optimal for r in report.results],
        "csv": str(csv_path),
        "figure": str(svg_path),
    }
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="suffdata",
        description="Decide which objective queries suffice to solve an LP "
                    "under cost uncertainty, select minimal query sets, and "
                    "recover decisions from observations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, seed_required=False):
        p.add_argument("--input", required=True, help="problem JSON file")
        p.add_argument("--output", default=None, help="output file (default stdout)")
        p.add_argument("--seed", type=int, required=seed_required, default=0)
        p.add_argument("--tol-zero", type=float, default=None, dest="tol_zero")
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--sigma-interior", type=float, default=0.0, dest="sigma_interior")
        p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("dir-basis", help="basis of the reachable-optima direction space")
    common(p, seed_required=True)
    p.set_defaults(func=cmd_dir_basis)

    p = sub.add_parser("check", help="is a dataset sufficient for the task?")
    common(p)
    p.add_argument("--dataset", required=True, help="dataset JSON file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("select", help="minimal sufficient canonical-query dataset")
    common(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("decide", help="recover a decision from observations")
    common(p)
    p.add_argument("--dataset", required=True, help="dataset JSON file")
    p.add_argument("--observations", required=True, help="observations JSON file")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("oracle-verify", help="run brute-force invariant checks")
    common(p)
    p.set_defaults(func=cmd_oracle_verify)

    p = sub.add_parser("hiring", help="run the interview-selection experiment")
    common(p, seed_required=True)
    p.set_defaults(func=cmd_hiring)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except FileNotFoundError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except SuffdataError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
