"""Acceptance suite: one test per criterion, at the stated tolerances.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
PASS lines. The random-instance suite (d <= 6, bounded X, polyhedral C
with nonempty interior) is generated once and shared by the criteria
that reference it.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

import suffdata as sd
from suffdata import hiring, oracle
from suffdata.directions import CostSampler, compute_dir_basis, default_config
from suffdata.linalg import SpanBasis, subspace_equal
from suffdata.milp_solver import MilpProblem, solve_milp
from suffdata.selection import (
    QueryBasis,
    is_sufficient,
    is_sufficient_unrestricted,
    monte_carlo_sufficiency_check,
    select_queries,
    unrestricted_direction_span,
)
from tests.conftest import make_random_instance, make_random_uncertainty
from tests.test_milp_solver import brute_force_milp

SUITE_SIZE = 20
_suite_cache: list[dict] | None = None
_suite_seconds: float | None = None


def _suite() -> list[dict]:
    """20 random (X, C) instances with direction bases and oracle data."""
    global _suite_cache, _suite_seconds
    if _suite_cache is not None:
        return _suite_cache
    rng = np.random.default_rng(1905)
    out = []
    t0 = time.perf_counter()
    for trial in range(SUITE_SIZE):
        d = int(rng.integers(2, 7))
        lp = make_random_instance(rng, d)
        C = make_random_uncertainty(rng, d)
        dirs = compute_dir_basis(lp, C, seed=trial)
        catalog = oracle.enumerate_vertices(lp)
        reach_span = oracle.reachable_direction_span(lp, C, catalog=catalog)
        out.append({"d": d, "lp": lp, "C": C, "dirs": dirs,
                    "catalog": catalog, "reach_span": reach_span,
                    "seed": trial})
    _suite_seconds = time.perf_counter() - t0
    _suite_cache = out
    return out


def test_criterion_1_iteration_count_matches_oracle_dimension():
    suite = _suite()
    for item in suite:
        dim = item["reach_span"].dim
        assert item["dirs"].iterations == dim, \
            f"instance d={item['d']} seed={item['seed']}: " \
            f"{item['dirs'].iterations} iterations vs oracle dim {dim}"
        assert item["dirs"].basis.dim == dim
    assert _suite_seconds is not None and _suite_seconds < 60.0, \
        f"suite took {_suite_seconds:.1f}s"
    print(f"\nACCEPTANCE 1 (iteration count = oracle dimension on "
          f"{SUITE_SIZE} instances, {_suite_seconds:.1f}s < 60s): PASS")


def test_criterion_2_relevant_directions_span_reachable_differences():
    suite = _suite()
    for item in suite:
        delta = oracle.relevant_extreme_directions(
            item["lp"], item["C"], catalog=item["catalog"])
        span_delta = SpanBasis.from_vectors(delta, tol_rank=1e-8) if delta.size \
            else SpanBasis.empty(item["d"], tol_rank=1e-8)
        assert subspace_equal(span_delta, item["reach_span"]), \
            f"span mismatch on instance seed={item['seed']}"
    print(f"\nACCEPTANCE 2 (relevant-direction span = reachable-difference "
          f"span on {SUITE_SIZE} instances): PASS")


def test_criterion_3_selected_datasets_sufficient_and_minimal():
    suite = _suite()
    for item in suite:
        qb = QueryBasis.canonical(item["d"])
        dataset = select_queries(item["dirs"], qb)
        result = monte_carlo_sufficiency_check(
            dataset, item["lp"], item["C"], trials=1000,
            seed=item["seed"] + 1000, catalog=item["catalog"])
        assert result.passed, \
            f"counterexample on instance seed={item['seed']}: {result.counterexample}"
        # exhaustive single-removal minimality (d <= 8 throughout)
        for drop in range(dataset.size):
            keep = [i for i in range(dataset.size) if i != drop]
            smaller = sd.Dataset(dataset.queries[keep]) if keep \
                else sd.Dataset.empty(item["d"])
            assert not is_sufficient(smaller, item["dirs"]), \
                f"query {drop} removable on instance seed={item['seed']}"
    print(f"\nACCEPTANCE 3 (1000-trial sufficiency checks clean and every "
          f"selected query necessary on {SUITE_SIZE} instances): PASS")


def _contains_by_rank(queries: np.ndarray, target: np.ndarray) -> bool:
    """Span containment via numpy rank arithmetic (independent route)."""
    if target.size == 0:
        return True
    if queries.size == 0:
        return False
    rq = np.linalg.matrix_rank(queries, tol=1e-8)
    return np.linalg.matrix_rank(np.vstack([queries, target]), tol=1e-8) == rq


def test_criterion_4_no_prior_characterization_consistency():
    rng = np.random.default_rng(77)
    for trial in range(20):
        d = int(rng.integers(2, 7))
        lp = make_random_instance(rng, d)
        # independent target: f0 mask + kernel intersection, by rank math
        mask = oracle.f0_coordinate_mask(lp)
        pins = np.eye(lp.n_total)[~mask]
        stacked = np.vstack([lp.A, pins]) if pins.size else lp.A
        from scipy.linalg import null_space

        kernel = null_space(stacked, rcond=1e-10).T
        target = kernel[:, :d] if kernel.size else np.zeros((0, d))

        for k in range(d + 1):
            queries = rng.normal(size=(k, d)) if k else np.zeros((0, d))
            ds = sd.Dataset(queries) if k else sd.Dataset.empty(d)
            assert is_sufficient_unrestricted(ds, lp) == \
                _contains_by_rank(queries, target), \
                f"disagreement at trial {trial}, k={k}"

        # reachable differences over ALL vertices equal the kernel target
        catalog = oracle.enumerate_vertices(lp)
        diffs = catalog.vertices[1:, :d] - catalog.vertices[0, :d]
        span_vertices = SpanBasis.from_vectors(diffs, tol_rank=1e-8) if diffs.size \
            else SpanBasis.empty(d, tol_rank=1e-8)
        span_target = SpanBasis.from_vectors(target, tol_rank=1e-8) if target.size \
            else SpanBasis.empty(d, tol_rank=1e-8)
        assert span_vertices.dim == span_target.dim
        assert subspace_equal(span_vertices, span_target)
    print("\nACCEPTANCE 4 (no-prior sufficiency matches kernel "
          "characterization on 20 instances): PASS")


def test_criterion_5_noiseless_recovery_exact():
    suite = _suite()
    rng = np.random.default_rng(4242)
    trials = 0
    while trials < 100:
        item = suite[trials % SUITE_SIZE]
        lp, C, dirs = item["lp"], item["C"], item["dirs"]
        dataset = select_queries(dirs, QueryBasis.canonical(item["d"]))
        c_true = CostSampler(C).sample(rng)
        rec = sd.recover_decision(dataset, sd.observe(dataset, c_true), lp, C)
        assert rec.residual <= 1e-9, f"residual {rec.residual} on trial {trials}"
        c_std = sd.embed_cost(c_true, lp)
        best = float((item["catalog"].vertices @ c_std).min())
        val = float(c_true @ rec.decision)
        assert val <= best + 1e-7 * (1.0 + abs(best)), \
            f"suboptimal recovery on trial {trials}: {val} vs {best}"
        trials += 1
    print("\nACCEPTANCE 5 (100 noiseless recoveries optimal within 1e-7, "
          "residuals <= 1e-9): PASS")


def test_criterion_6_noise_threshold_probe():
    suite = _suite()
    rng = np.random.default_rng(31337)
    done = 0
    for item in itertools.cycle(suite):
        if done >= 20:
            break
        lp, C, dirs = item["lp"], item["C"], item["dirs"]
        dataset = select_queries(dirs, QueryBasis.canonical(item["d"]))
        catalog = item["catalog"]
        c_true = None
        for _ in range(60):
            cand = CostSampler(C).sample(rng)
            c_std = sd.embed_cost(cand, lp)
            values = catalog.vertices @ c_std
            order = np.sort(values)
            scale = 1.0 + abs(order[0])
            if len(order) == 1 or order[1] - order[0] > 0.02 * scale:
                c_true = cand
                break
        if c_true is None:
            continue
        u = rng.standard_normal(dataset.size)
        probe = sd.noise_threshold_probe(dataset, lp, C, c_true, u,
                                         [1e-6, 1e-4, 1e-2])
        assert probe.optimal_flags[0], \
            f"recovery failed at 1e-6 on instance seed={item['seed']}"
        assert probe.kappa_hat >= 1e-6
        done += 1
    assert done == 20, f"only {done} interior-cost trials found"

    # hand-built case: flip point at 0.4/sqrt(2) ~ 0.283, so kappa >= 0.1
    g = sd.GeneralLP(2, eq_lhs=[[1.0, 1.0]], eq_rhs=[1.0])
    lp2 = sd.standardize(g)
    C2 = sd.UncertaintySet(
        sd.HPolyhedron([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1]), 2)
    ds2 = sd.Dataset(np.eye(2))
    probe2 = sd.noise_threshold_probe(ds2, lp2, C2, [0.3, 0.7],
                                      np.array([1.0, -1.0]) / np.sqrt(2.0),
                                      [1e-3, 1e-2, 1e-1, 1.0])
    assert probe2.kappa_hat >= 1e-1
    print(f"\nACCEPTANCE 6 (noise probe positive on {done} interior trials; "
          f"hand case kappa = {probe2.kappa_hat:g} >= 0.1): PASS")


def test_criterion_7_solver_oracles():
    rng = np.random.default_rng(99)
    for trial in range(50):
        d = int(rng.integers(2, 6))
        lp = make_random_instance(rng, d)
        catalog = oracle.enumerate_vertices(lp)
        c = sd.embed_cost(rng.normal(size=d), lp)
        sol = sd.solve_lp(lp, c)
        best = float((catalog.vertices @ c).min())
        assert abs(sol.objective - best) <= 1e-8 * (1.0 + abs(best)), \
            f"LP mismatch on trial {trial}"

    milp_count = 0
    for trial in range(20):
        nb = int(rng.integers(2, 11))
        nc = int(rng.integers(0, 3))
        n = nb + nc
        hi = np.concatenate([np.ones(nb), rng.uniform(0.5, 2.0, nc)])
        k = int(rng.integers(1, 3))
        G = rng.normal(size=(k, n))
        h = G @ (hi / 2) + rng.uniform(0.1, 1.0, k)
        p = MilpProblem(objective=rng.normal(size=n), var_lower=np.zeros(n),
                        var_upper=hi, binary_indices=tuple(range(nb)),
                        ineq_lhs=G, ineq_rhs=h)
        assert len(p.binary_indices) <= 16
        sol = solve_milp(p)
        best = brute_force_milp(p)
        assert abs(sol.objective - best) <= 1e-7 * (1.0 + abs(best)), \
            f"MILP mismatch on trial {trial}: {sol.objective} vs {best}"
        milp_count += 1
    print(f"\nACCEPTANCE 7 (LP matches enumeration on 50 instances; MILP "
          f"matches exhaustive search on {milp_count} instances): PASS")


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["vanilla", "experience"])
def test_criterion_8_hiring_experiment(variant):
    etas = [0.01, 0.1, 0.3, 0.6]
    seeds = [11, 12, 13, 14, 15]
    t0 = time.perf_counter()
    counts_by_seed = {}
    for seed in seeds:
        report = hiring.run_experiment(etas, variant, seed, d=100)
        assert report.counts_nondecreasing(), \
            f"counts {report.counts} not monotone for seed {seed}"
        assert all(r.recovery_optimal for r in report.results), \
            f"recovery failed for seed {seed}"
        counts_by_seed[seed] = report.counts

    trichotomy_note = ""
    if variant == "vanilla":
        instance = hiring.generate_instance(100, variant, etas[0], seeds[0])
        g, C = hiring.build_task(instance)
        lp = sd.standardize(g)
        cfg = default_config(lp, C, max_alpha_redraws=1)
        dirs = compute_dir_basis(lp, C, cfg, seed=seeds[0])
        from suffdata.selection import selected_indices

        idx = tuple(selected_indices(dirs, QueryBasis.canonical(100)))
        tri = hiring.candidate_trichotomy(lp, C, cfg, idx)
        assert tri.unresolved == ()
        assert len(tri.never) > 0 and len(tri.always) > 0 and \
            len(tri.interviewed) > 0, \
            f"degenerate trichotomy: {len(tri.never)}/{len(tri.always)}/" \
            f"{len(tri.interviewed)}"
        trichotomy_note = (f"; trichotomy {len(tri.never)} never / "
                           f"{len(tri.always)} always / "
                           f"{len(tri.interviewed)} interviewed")

    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0, f"{variant} took {elapsed:.0f}s >= 600s"
    print(f"\nACCEPTANCE 8 ({variant}: counts nondecreasing on 5 seeds "
          f"{sorted(counts_by_seed.values())}, recoveries optimal, "
          f"{elapsed:.0f}s < 600s{trichotomy_note}): PASS")
