"""Multi-crew policies: conversion of the single-crew order, rho dispatch and the
two utility baselines.

All dispatch policies share one event loop and differ only in the ranking key.
A line becomes a candidate as soon as its parent line has been started, which
covers lines next to energized nodes as well as lines next to a repair in
progress.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from .network import PrecedenceForest, id_key
from .schedule import Assignment, Schedule, list_schedule
from .single import optimal_single_sequence, rho_factors


def convert(seq1: Sequence[str], forest: PrecedenceForest, m: int) -> Schedule:
    """Replay a single-crew order as an m-crew priority list."""
    return list_schedule(forest, seq1, m)


def conversion_schedule(forest: PrecedenceForest, m: int) -> Schedule:
    return convert(optimal_single_sequence(forest), forest, m)


def priority_dispatch(forest: PrecedenceForest, m: int, key: Mapping[str, object]) -> Schedule:
    """Event-driven dispatch: each freed crew takes the best-ranked candidate line.

    Crews freeing at the same instant are served in crew-index order; equal
    keys go to the lowest job id.
    """
    if m < 1:
        raise ValueError("need at least one crew")
    free = [(0, k) for k in range(m)]
    candidates = [(-key[j], id_key(j), j) for j in forest.roots]
    heapq.heapify(candidates)
    crews: List[List[Assignment]] = [[] for _ in range(m)]
    while candidates:
        t, k = heapq.heappop(free)
        _, _, j = heapq.heappop(candidates)
        done = t + forest[j].ptime
        crews[k].append(Assignment(j, k, t, done))
        heapq.heappush(free, (done, k))
        for c in forest.children(j):
            heapq.heappush(candidates, (-key[c], id_key(c), c))
    return Schedule(m, tuple(tuple(c) for c in crews))


def dispatch_multi(forest: PrecedenceForest, rho: Optional[Mapping[str, Fraction]] = None, m: int = 1) -> Schedule:
    """Rank candidates by rho-factor."""
    if rho is None:
        rho = rho_factors(forest)
    return priority_dispatch(forest, m, rho)


def baseline_fe(forest: PrecedenceForest, m: int) -> Schedule:
    """Restore the most load first: rank by the weight the line itself re-energizes."""
    return priority_dispatch(forest, m, {j.id: Fraction(j.weight) for j in forest})


def baseline_eei(forest: PrecedenceForest, m: int) -> Schedule:
    """Most load per unit repair time first (Smith's ratio on the line alone)."""
    return priority_dispatch(forest, m, smith_ratios(forest))


def smith_ratios(forest: PrecedenceForest) -> Dict[str, Fraction]:
    return {j.id: Fraction(j.weight) / Fraction(j.ptime) for j in forest}
