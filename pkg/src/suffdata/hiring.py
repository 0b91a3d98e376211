"""Candidate-interview experiment: who must be interviewed to hire
optimally under a noisy linear score model.

Candidates carry GPA and years-of-experience features; scores follow
c = alpha'phi + eps with alpha in a box and |eps| <= eta. Hiring picks
at most ``hire_cap`` candidates (the experience variant also caps each
seniority group), relaxed to an LP, which is exact here because the
constraint matrices are interval matrices with integral vertices. The
LP minimizes, so the stored uncertainty set is the negated score model.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .directions import (
    CostSampler,
    CsMilpConfig,
    HEURISTIC_SAMPLES,
    build_cs_encoding,
    compute_dir_basis,
    default_config,
    milp_for_objective,
)
from .lp_solver import solve_lp
from .milp_solver import solve_milp
from .model import AffineFactor, GeneralLP, StandardLP, UncertaintySet, embed_cost, observe, standardize
from .recovery import recover_decision
from .selection import QueryBasis, select_queries, selected_indices

VARIANTS = ("vanilla", "experience")
DEFAULT_HIRE_CAP = 20
DEFAULT_GROUP_CAP = 8
ALPHA_LOWER = (4.0, 4.0)
ALPHA_UPPER = (5.0, 5.0)


@dataclass(frozen=True)
class HiringInstance:
    d: int
    gpa: np.ndarray
    experience: np.ndarray
    variant: str
    hire_cap: int
    group_cap: int
    eta: float
    alpha_lower: np.ndarray
    alpha_upper: np.ndarray
    seed: int

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        object.__setattr__(self, "gpa", np.asarray(self.gpa, dtype=float))
        object.__setattr__(self, "experience", np.asarray(self.experience, dtype=int))
        object.__setattr__(self, "alpha_lower", np.asarray(self.alpha_lower, dtype=float))
        object.__setattr__(self, "alpha_upper", np.asarray(self.alpha_upper, dtype=float))

    @property
    def phi(self) -> np.ndarray:
        """Feature matrix, GPA row above experience row."""
        return np.vstack([self.gpa, self.experience.astype(float)])

    @property
    def levels(self) -> list[int]:
        return sorted(set(self.experience.tolist()))


def generate_instance(d: int, variant: str, eta: float, seed: int) -> HiringInstance:
    """GPA uniform on [2, 4], experience uniform on {1..5}; the hire cap
    clips to the pool size for small pools."""
    if d < 1 or eta < 0:
        raise ValueError("d must be >= 1 and eta >= 0")
    rng = np.random.default_rng(seed)
    gpa = rng.uniform(2.0, 4.0, d)
    experience = rng.integers(1, 6, d)
    return HiringInstance(d, gpa, experience, variant,
                          min(DEFAULT_HIRE_CAP, d), DEFAULT_GROUP_CAP, float(eta),
                          np.array(ALPHA_LOWER), np.array(ALPHA_UPPER), seed)


def build_task(instance: HiringInstance) -> tuple[GeneralLP, UncertaintySet]:
    """LP relaxation of the hiring set plus the (negated) score model.

    The score model says value = alpha'phi + eps with alpha in
    [alpha_lower, alpha_upper]; hiring maximizes total value, so the
    minimizing LP uses c = -value, i.e. the alpha box negates and
    swaps here, once.
    """
    d = instance.d
    rows = [np.ones(d)]
    rhs = [float(instance.hire_cap)]
    if instance.variant == "experience":
        for level in instance.levels:
            row = np.zeros(d)
            row[instance.experience == level] = 1.0
            rows.append(row)
            rhs.append(float(instance.group_cap))
    g = GeneralLP(d, ineq_lhs=np.array(rows), ineq_rhs=np.array(rhs),
                  lower_bounds=np.zeros(d), upper_bounds=np.ones(d))
    C = UncertaintySet(
        AffineFactor(instance.phi, -instance.alpha_upper, -instance.alpha_lower,
                     instance.eta),
        d,
    )
    return g, C


@dataclass(frozen=True)
class Trichotomy:
    """Partition of candidates by their role across reachable optima."""

    never: tuple[int, ...]
    always: tuple[int, ...]
    interviewed: tuple[int, ...]
    unresolved: tuple[int, ...] = ()


def candidate_trichotomy(lp: StandardLP, C: UncertaintySet, cfg: CsMilpConfig,
                         selected: tuple[int, ...]) -> Trichotomy:
    """Classify candidates as never/always hired via min and max of x_i
    over the complementary-slackness system; the interviewed class is
    the selected query set."""
    enc = build_cs_encoding(lp, C, cfg)
    never: list[int] = []
    always: list[int] = []
    unresolved: list[int] = []
    sel = set(int(i) for i in selected)
    for i in range(lp.n_original):
        if i in sel:
            continue
        obj = np.zeros(enc.n_vars)
        obj[enc.off_x + i] = -1.0
        high = -solve_milp(milp_for_objective(enc, obj), presolve=False).objective
        if high <= 1e-6:
            # min x_i >= 0 is a variable bound, so max = 0 settles it
            never.append(i)
            continue
        low = solve_milp(milp_for_objective(enc, -obj), presolve=False).objective
        if low >= 1.0 - 1e-6:
            always.append(i)
        else:
            unresolved.append(i)
    return Trichotomy(tuple(never), tuple(always), tuple(sorted(sel)),
                      tuple(unresolved))


@dataclass(frozen=True)
class EtaResult:
    eta: float
    interview_indices: tuple[int, ...]
    count: int
    basis_dimension: int
    wall_time_ms: float
    recovery_optimal: bool
    trichotomy: Trichotomy | None = None


@dataclass(frozen=True)
class ExperimentReport:
    variant: str
    d: int
    seed: int
    results: tuple[EtaResult, ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(r.count for r in self.results)

    def counts_nondecreasing(self) -> bool:
        return all(a <= b for a, b in zip(self.counts, self.counts[1:]))


def run_experiment(etas, variant: str, seed: int, *, d: int = 100,
                   trichotomy: bool = False,
                   heuristic_samples: int = HEURISTIC_SAMPLES,
                   max_alpha_redraws: int = 1) -> ExperimentReport:
    """Full pipeline per noise level: direction basis, interview
    selection, and one noiseless recovery round trip with a random
    admissible score vector.

    The eta grid is processed in the given order; when it is
    nondecreasing, each level's direction basis warm-starts the next
    (the uncertainty sets are nested, so earlier directions stay
    valid). One redraw of the certification objective is kept by
    default; the certifying MILPs are exact, so redraws only hedge the
    probability-zero event of an orthogonal random objective.
    """
    etas = [float(e) for e in etas]
    if not etas:
        raise ValueError("eta grid must be nonempty")
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(2 * len(etas))

    results: list[EtaResult] = []
    lp: StandardLP | None = None
    m_primal: float | None = None
    warm = None
    prev_eta: float | None = None
    for k, eta in enumerate(etas):
        instance = generate_instance(d, variant, eta, seed)
        g, C = build_task(instance)
        if lp is None:
            lp = standardize(g)
        t0 = time.perf_counter()
        cfg = default_config(lp, C, max_alpha_redraws=max_alpha_redraws,
                             m_primal=m_primal)
        m_primal = cfg.m_primal
        dir_seed = int(children[2 * k].generate_state(1)[0])
        if prev_eta is not None and eta < prev_eta:
            warm = None  # sets no longer nested; start cold
        dirs = compute_dir_basis(lp, C, cfg, dir_seed,
                                 heuristic_samples=heuristic_samples,
                                 warm_start=warm)
        warm = dirs
        prev_eta = eta
        qb = QueryBasis.canonical(d)
        indices = tuple(selected_indices(dirs, qb))
        dataset = select_queries(dirs, qb)
        wall_ms = (time.perf_counter() - t0) * 1000.0

        rng = np.random.default_rng(children[2 * k + 1])
        true_c = CostSampler(C).sample(rng)
        rec = recover_decision(dataset, observe(dataset, true_c), lp, C)
        opt = solve_lp(lp, embed_cost(true_c, lp)).objective
        optimal = bool(float(true_c @ rec.decision) <= opt + 1e-7 * (1.0 + abs(opt)))

        tri = candidate_trichotomy(lp, C, cfg, indices) if trichotomy else None
        results.append(EtaResult(eta, indices, len(indices), dirs.basis.dim,
                                 wall_ms, optimal, tri))
    return ExperimentReport(variant, d, seed, tuple(results))


def write_report_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eta", "count", "indices", "wall_time_ms"])
        for r in report.results:
            writer.writerow([r.eta, r.count,
                             ";".join(str(i) for i in r.interview_indices),
                             f"{r.wall_time_ms:.1f}"])


def render_report_figure(report: ExperimentReport, instance: HiringInstance, path) -> None:
    """Candidates on GPA/experience axes, colored by interview status
    per noise level (one panel per eta)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "suffdata"}):
        n = len(report.results)
        fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.2),
                                 sharex=True, sharey=True, squeeze=False)
        jitter = 0.06 * ((np.arange(instance.d) % 7) - 3) / 3.0
        y = instance.experience + jitter
        for ax, r in zip(axes[0], report.results):
            interviewed = set(r.interview_indices)
            if r.trichotomy is not None:
                always = set(r.trichotomy.always)
            else:
                always = set()
            colors = []
            for i in range(instance.d):
                if i in interviewed:
                    colors.append("tab:red")
                elif i in always:
                    colors.append("tab:blue")
                else:
                    colors.append("lightgray")
            ax.scatter(instance.gpa, y, c=colors, s=14)
            ax.set_title(f"eta={r.eta:g} ({r.count} interviews)")
            ax.set_xlabel("GPA")
        axes[0][0].set_ylabel("years of experience")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
