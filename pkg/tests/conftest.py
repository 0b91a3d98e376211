"""Shared fixtures: canonical small polytopes and random instance
generators used across the suite."""

from __future__ import annotations

import numpy as np
import pytest

import suffdata as sd


@pytest.fixture
def simplex2():
    """X = {x >= 0 : x1 + x2 = 1}: two vertices, one edge."""
    g = sd.GeneralLP(2, eq_lhs=[[1.0, 1.0]], eq_rhs=[1.0])
    return sd.standardize(g)


@pytest.fixture
def box_C2():
    """C = [-1, 1]^2 as an H-polyhedron."""
    return sd.UncertaintySet(
        sd.HPolyhedron([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1]), 2
    )


@pytest.fixture
def halfplane_C2():
    """C = {c : c2 - c1 >= 0.1} intersected with [-1, 1]^2."""
    return sd.UncertaintySet(
        sd.HPolyhedron([[1, -1], [1, 0], [-1, 0], [0, 1], [0, -1]],
                       [-0.1, 1, 1, 1, 1]), 2
    )


@pytest.fixture
def cube3():
    """Unit cube in R^3, standardized (3 slack rows)."""
    g = sd.GeneralLP(3, upper_bounds=[1.0, 1.0, 1.0])
    return sd.standardize(g)


def make_random_instance(rng: np.random.Generator, d: int) -> sd.StandardLP:
    """Random bounded polytope: a box cut by one or two halfspaces that
    keep the origin feasible."""
    k = int(rng.integers(1, 3))
    rows, rhs = [], []
    for _ in range(k):
        a = rng.normal(size=d)
        rows.append(a)
        rhs.append(float(abs(rng.normal()) + 0.3))
    g = sd.GeneralLP(d, ineq_lhs=np.array(rows), ineq_rhs=np.array(rhs),
                     upper_bounds=rng.uniform(0.5, 2.0, d))
    return sd.standardize(g)


def make_random_uncertainty(rng: np.random.Generator, d: int,
                            *, min_radius: float = 0.05) -> sd.UncertaintySet:
    """Random polyhedral C with nonempty interior: the unit box cut by
    up to two random halfspaces kept at distance >= min_radius from
    the retained region's max-slack point."""
    while True:
        G = [np.eye(d), -np.eye(d)]
        h = [np.ones(d), np.ones(d)]
        for _ in range(int(rng.integers(0, 3))):
            gvec = rng.normal(size=d)
            gvec /= np.linalg.norm(gvec)
            G.append(gvec[None, :])
            h.append(np.array([rng.uniform(0.1, 0.8)]))
        Gm, hm = np.vstack(G), np.concatenate(h)
        try:
            center = sd.find_point(Gm, hm)
        except sd.Infeasible:
            continue
        if np.min(hm - Gm @ center) >= min_radius:
            return sd.UncertaintySet(sd.HPolyhedron(Gm, hm), d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
