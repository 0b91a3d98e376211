import itertools

import numpy as np
import pytest

import suffdata as sd
from suffdata.errors import DimensionMismatch
from suffdata.lp_solver import solve_general
from suffdata.milp_solver import MilpProblem, lp_relaxation_bound, solve_milp


def brute_force_milp(p: MilpProblem) -> float:
    """Exhaustive enumeration over binary assignments; continuous parts
    solved with the package's own simplex."""
    binaries = list(p.binary_indices)
    best = np.inf
    n = p.n_vars
    for bits in itertools.product([0.0, 1.0], repeat=len(binaries)):
        lo = p.var_lower.copy()
        hi = p.var_upper.copy()
        for idx, val in zip(binaries, bits):
            lo[idx] = hi[idx] = val
        # bounds as rows so the general-form simplex can digest them
        rows = [p.ineq_lhs] if p.ineq_lhs.size else []
        rhs = [p.ineq_rhs] if p.ineq_rhs.size else []
        eye = np.eye(n)
        for i in range(n):
            if np.isfinite(hi[i]):
                rows.append(eye[i][None, :])
                rhs.append(np.array([hi[i]]))
            if np.isfinite(lo[i]):
                rows.append(-eye[i][None, :])
                rhs.append(np.array([-lo[i]]))
        G = np.vstack(rows)
        h = np.concatenate(rhs)
        status, _, obj = solve_general(p.objective, G, h,
                                       p.eq_lhs if p.eq_lhs.size else None,
                                       p.eq_rhs if p.eq_lhs.size else None)
        if status == "optimal":
            best = min(best, obj)
    return best


class TestSolveMilp:
    def test_rounding_blocked(self):
        p = MilpProblem(objective=[-1.0, -1.0], var_lower=[0, 0], var_upper=[1, 1],
                        binary_indices=(0, 1),
                        ineq_lhs=[[1.0, 1.0]], ineq_rhs=[1.5])
        sol = solve_milp(p)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(-1.0)

    def test_knapsack_matches_exhaustive(self):
        weights = np.array([2.0, 3.0, 4.0, 5.0, 9.0])
        values = np.array([3.0, 4.0, 5.0, 8.0, 10.0])
        p = MilpProblem(objective=-values, var_lower=np.zeros(5), var_upper=np.ones(5),
                        binary_indices=tuple(range(5)),
                        ineq_lhs=weights[None, :], ineq_rhs=[10.0])
        sol = solve_milp(p)
        best = min(
            -values @ np.array(bits)
            for bits in itertools.product([0, 1], repeat=5)
            if weights @ np.array(bits) <= 10.0
        )
        assert sol.objective == pytest.approx(best, abs=1e-9)

    def test_all_continuous_equals_lp(self, simplex2):
        p = MilpProblem(objective=[1.0, 2.0], var_lower=[0, 0],
                        var_upper=[np.inf, np.inf], binary_indices=(),
                        eq_lhs=simplex2.A, eq_rhs=simplex2.b)
        sol = solve_milp(p)
        ref = sd.solve_lp(simplex2, [1.0, 2.0])
        assert sol.objective == pytest.approx(ref.objective)

    def test_infeasible_status(self):
        p = MilpProblem(objective=[1.0], var_lower=[0.0], var_upper=[1.0],
                        binary_indices=(0,),
                        eq_lhs=[[1.0]], eq_rhs=[0.5])
        assert solve_milp(p).status == "infeasible"

    def test_binary_bounds_validated(self):
        with pytest.raises(DimensionMismatch):
            MilpProblem(objective=[1.0], var_lower=[0.0], var_upper=[2.0],
                        binary_indices=(0,))

    def test_random_instances_match_enumeration(self, rng):
        for trial in range(25):
            nb = int(rng.integers(2, 8))
            nc = int(rng.integers(0, 3))
            n = nb + nc
            obj = rng.normal(size=n)
            lo = np.zeros(n)
            hi = np.concatenate([np.ones(nb), rng.uniform(0.5, 2.0, nc)])
            k = int(rng.integers(1, 3))
            G = rng.normal(size=(k, n))
            h = G @ (hi / 2) + rng.uniform(0.1, 1.0, k)  # keeps midpoint feasible
            p = MilpProblem(objective=obj, var_lower=lo, var_upper=hi,
                            binary_indices=tuple(range(nb)),
                            ineq_lhs=G, ineq_rhs=h)
            sol = solve_milp(p)
            best = brute_force_milp(p)
            assert sol.status == "optimal"
            assert abs(sol.objective - best) <= 1e-7 * (1.0 + abs(best))
            # binaries exactly integral, constraints within 1e-7
            assert all(sol.x[i] in (0.0, 1.0) for i in range(nb))
            assert np.all(G @ sol.x <= h + 1e-7)

    def test_relaxation_bound(self):
        p = MilpProblem(objective=[-1.0, -1.0], var_lower=[0, 0], var_upper=[1, 1],
                        binary_indices=(0, 1),
                        ineq_lhs=[[1.0, 1.0]], ineq_rhs=[1.5])
        assert lp_relaxation_bound(p) <= solve_milp(p).objective + 1e-12

    def test_node_limit_raises(self, rng):
        n = 24
        w = rng.uniform(1.0, 2.0, n)
        p = MilpProblem(objective=-rng.uniform(1.0, 2.0, n),
                        var_lower=np.zeros(n), var_upper=np.ones(n),
                        binary_indices=tuple(range(n)),
                        ineq_lhs=w[None, :], ineq_rhs=[w.sum() / 3])
        with pytest.raises(sd.NodeLimitExceeded):
            solve_milp(p, node_limit=0, presolve=False)
