"""End-to-end runs on structurally varied random instances: equality
constraints, degenerate facets through feasible points, and factor-form
uncertainty, each validated against the enumeration oracle."""

import numpy as np

import suffdata as sd
from suffdata import oracle
from suffdata.directions import CostSampler
from suffdata.linalg import subspace_equal
from suffdata.selection import QueryBasis, monte_carlo_sufficiency_check, select_queries


def affine_uncertainty(rng, d):
    l = int(rng.integers(1, 3))
    phi = rng.normal(size=(l, d))
    return sd.UncertaintySet(
        sd.AffineFactor(phi, -np.ones(l), np.ones(l),
                        float(rng.uniform(0.05, 0.5))), d)


def test_equality_constrained_instances_match_oracle():
    rng = np.random.default_rng(5150)
    ran = 0
    while ran < 8:
        d = int(rng.integers(2, 6))
        a_eq = rng.normal(size=d)
        x0 = rng.uniform(0.1, 0.9, d)
        try:
            g = sd.GeneralLP(d,
                             ineq_lhs=rng.normal(size=(1, d)),
                             ineq_rhs=[float(abs(rng.normal()) + 1.5)],
                             eq_lhs=a_eq[None, :], eq_rhs=[float(a_eq @ x0)],
                             upper_bounds=np.ones(d))
        except sd.InfeasibleModel:
            continue
        lp = sd.standardize(g)
        C = affine_uncertainty(rng, d)
        dirs = sd.compute_dir_basis(lp, C, seed=ran)
        span = oracle.reachable_direction_span(lp, C)
        assert dirs.iterations == span.dim
        assert subspace_equal(dirs.basis, span)
        ran += 1


def test_degenerate_facets_full_pipeline():
    rng = np.random.default_rng(777)
    for trial in range(8):
        d = int(rng.integers(2, 5))
        # facet through an interior-ish point creates degenerate vertices
        a = np.abs(rng.normal(size=d))
        g = sd.GeneralLP(d,
                         ineq_lhs=np.vstack([a, rng.normal(size=(1, d))]),
                         ineq_rhs=[float(a @ np.full(d, 0.4)),
                                   float(abs(rng.normal()) + 1.0)],
                         upper_bounds=np.ones(d))
        lp = sd.standardize(g)
        C = affine_uncertainty(rng, d)
        cat = oracle.enumerate_vertices(lp)
        dirs = sd.compute_dir_basis(lp, C, seed=trial)
        span = oracle.reachable_direction_span(lp, C, catalog=cat)
        assert dirs.iterations == span.dim
        assert subspace_equal(dirs.basis, span)

        ds = select_queries(dirs, QueryBasis.canonical(d))
        mc = monte_carlo_sufficiency_check(ds, lp, C, 200, seed=trial, catalog=cat)
        assert mc.passed

        c_true = CostSampler(C).sample(rng)
        rec = sd.recover_decision(ds, sd.observe(ds, c_true), lp, C)
        best = float((cat.vertices @ sd.embed_cost(c_true, lp)).min())
        assert float(c_true @ rec.decision) <= best + 1e-7 * (1 + abs(best))
        assert rec.residual <= 1e-9


def test_insufficient_dataset_is_falsified():
    # drop one needed query: the sampled check should find a witness
    rng = np.random.default_rng(31)
    found = 0
    for trial in range(6):
        d = int(rng.integers(2, 5))
        from tests.conftest import make_random_instance, make_random_uncertainty

        lp = make_random_instance(rng, d)
        C = make_random_uncertainty(rng, d)
        dirs = sd.compute_dir_basis(lp, C, seed=trial)
        ds = select_queries(dirs, QueryBasis.canonical(d))
        if ds.size == 0:
            continue
        smaller = sd.Dataset(ds.queries[1:]) if ds.size > 1 else sd.Dataset.empty(d)
        mc = monte_carlo_sufficiency_check(smaller, lp, C, 400, seed=trial)
        if not mc.passed:
            found += 1
    assert found >= 3, f"falsifier found witnesses on only {found} instances"
