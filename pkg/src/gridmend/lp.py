"""LP relaxation on energization times and midpoint list scheduling.

The relaxation minimizes ``sum w_j E_j`` subject to ``E_j >= p_j``,
``E_j >= E_parent(j)`` and the parallel-machine polyhedron inequalities

    sum_{j in A} p_j E_j >= f(A) = (p(A)^2 / m + sum_{j in A} p_j^2) / 2

for every subset A.  There are exponentially many of those, so they are
generated lazily: solve, find the most violated set, add it, repeat.

The violation of A can be rewritten as ``p(A)^2 / (2m) - sum_A p_j M_j`` with
midpoints ``M_j = E_j - p_j / 2``.  An exchange argument shows that a
maximally violated set is always a prefix of the jobs sorted by midpoint, so
checking the n prefixes of that order is an exact separation routine.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from .network import PrecedenceForest, id_key
from .schedule import Schedule, list_schedule

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6


class LpError(RuntimeError):
    pass


@dataclass
class LpSolution:
    e: Dict[str, float]
    midpoints: Dict[str, float]
    objective: float
    cuts: List[Tuple[str, ...]] = field(default_factory=list)
    iterations: int = 0


def polyhedron_rhs(ptimes, m: int) -> float:
    """f(A) for the repair times of a job set A."""
    ptimes = list(ptimes)
    s = sum(ptimes)
    return 0.5 * s * s / m + 0.5 * sum(p * p for p in ptimes)


def cut_violation(subset, e: Mapping[str, float], ptimes: Mapping[str, float], m: int) -> float:
    """f(A) - sum_A p_j E_j; positive means the inequality for A is violated."""
    return polyhedron_rhs((ptimes[j] for j in subset), m) - sum(ptimes[j] * e[j] for j in subset)


def separation_oracle(e: Mapping[str, float], ptimes: Mapping[str, float], m: int,
                      tol: float = DEFAULT_TOL, order: str = "midpoint") -> Optional[Tuple[Tuple[str, ...], float]]:
    """Most violated prefix set, or None if no prefix is violated by more than ``tol``.

    ``order="energization"`` sorts by E_j instead of the midpoint; that variant
    can miss violated sets when m > 1 and is only kept for comparison.
    """
    if order == "midpoint":
        rank = {j: e[j] - ptimes[j] / 2 for j in e}
    elif order == "energization":
        rank = dict(e)
    else:
        raise ValueError(f"unknown order {order!r}")
    jobs = sorted(e, key=lambda j: (rank[j], id_key(j)))
    best_k, best_v = -1, tol
    s = sq = lhs = 0.0
    for k, j in enumerate(jobs):
        p = ptimes[j]
        s += p
        sq += p * p
        lhs += p * e[j]
        v = 0.5 * s * s / m + 0.5 * sq - lhs
        if v > best_v:
            best_k, best_v = k, v
    if best_k < 0:
        return None
    return tuple(jobs[: best_k + 1]), best_v


def solve_lp_relaxation(forest: PrecedenceForest, m: int, tol: float = DEFAULT_TOL,
                        max_iter: Optional[int] = None) -> LpSolution:
    if tol <= 0:
        raise ValueError("tol must be positive")
    jobs = list(forest.jobs)
    n = len(jobs)
    if n == 0:
        return LpSolution({}, {}, 0.0)
    idx = {j: k for k, j in enumerate(jobs)}
    p = np.array([forest[j].ptime for j in jobs], dtype=float)
    w = np.array([forest[j].weight for j in jobs], dtype=float)
    ptimes = dict(zip(jobs, p.tolist()))
    if max_iter is None:
        max_iter = 10 * n * n

    prec_rows = []
    for j in jobs:
        parent = forest.parent(j)
        if parent is not None:
            row = np.zeros(n)
            row[idx[parent]] = 1.0
            row[idx[j]] = -1.0
            prec_rows.append(row)

    cuts: List[Tuple[str, ...]] = []
    cut_rows: List[np.ndarray] = []
    cut_rhs: List[float] = []

    def add_cut(subset):
        row = np.zeros(n)
        for j in subset:
            row[idx[j]] = -ptimes[j]
        cuts.append(tuple(subset))
        cut_rows.append(row)
        cut_rhs.append(-polyhedron_rhs((ptimes[j] for j in subset), m))

    add_cut(jobs)
    bounds = list(zip(p.tolist(), [None] * n))
    for it in range(1, max_iter + 1):
        a_ub = np.vstack(prec_rows + cut_rows)
        b_ub = np.concatenate([np.zeros(len(prec_rows)), np.array(cut_rhs)])
        res = linprog(w, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs",
                      options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
        if res.status != 0:
            raise LpError(f"LP solve failed: {res.message}")
        e = dict(zip(jobs, res.x.tolist()))
        found = separation_oracle(e, ptimes, m, tol)
        if found is None:
            mid = {j: e[j] - ptimes[j] / 2 for j in jobs}
            log.debug("cutting planes converged after %d iterations, %d cuts", it, len(cuts))
            return LpSolution(e, mid, float(np.dot(w, res.x)), cuts, it)
        subset, violation = found
        if tuple(subset) in set(cuts):
            raise LpError(f"cut on {len(subset)} jobs re-violated by {violation:g}; LP tolerance too loose")
        add_cut(subset)
    raise LpError(f"no convergence after {max_iter} iterations")


def midpoint_order(sol: LpSolution) -> List[str]:
    return sorted(sol.midpoints, key=lambda j: (sol.midpoints[j], id_key(j)))


def lp_list_schedule(forest: PrecedenceForest, m: int, solution: Optional[LpSolution] = None,
                     tol: float = DEFAULT_TOL) -> Schedule:
    """List-schedule the jobs in ascending order of their LP midpoints."""
    if solution is None:
        solution = solve_lp_relaxation(forest, m, tol)
    return list_schedule(forest, midpoint_order(solution), m)
