"""Optimal single-crew sequencing and rho-factors.

The sequencer is the classic outtree merge for ``1 | outtree | sum w_j C_j``:
repeatedly take the group with the largest weight-to-time ratio and glue it
behind the group that holds its predecessor.  Ratios are compared as exact
fractions so ties are detected exactly.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

from .network import DUMMY_ROOT, PrecedenceForest, id_key


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass
class MergeState:
    """Group bookkeeping after the merge loop has finished.

    ``rho`` holds, for every job, the ratio of its group at the moment that
    group was merged into its predecessor's group.
    """

    sequence: List[str]
    rho: Dict[str, Fraction]
    merges: int
    group_weight: Dict[str, Fraction]
    group_time: Dict[str, Fraction]


def merge_groups(forest: PrecedenceForest) -> MergeState:
    """Run the merge loop over ``forest`` hung below a virtual root.

    The virtual root has zero weight and zero time and can never be chosen,
    which pins it first.  Because every real job, the real root included, then
    merges exactly once, each job's rho-factor falls out of the loop.
    """
    root = DUMMY_ROOT
    w: Dict[str, Fraction] = {root: Fraction(0)}
    p: Dict[str, Fraction] = {root: Fraction(0)}
    pred: Dict[str, str] = {}
    last: Dict[str, str] = {root: root}  # A(i): final job of group i
    nxt: Dict[str, str] = {}  # linked-list form of the member lists B_i
    owner: Dict[str, str] = {root: root}  # union-find parent towards the group head
    for job in forest:
        w[job.id] = _exact(job.weight)
        p[job.id] = _exact(job.ptime)
        pred[job.id] = forest.parent(job.id) or root
        last[job.id] = job.id
        owner[job.id] = job.id

    def find(a):
        while owner[a] != a:
            owner[a] = owner[owner[a]]
            a = owner[a]
        return a

    version = {j: 0 for j in w}
    heap = [(-(w[j] / p[j]), id_key(j), 0, j) for j in forest.jobs]
    heapq.heapify(heap)
    rho: Dict[str, Fraction] = {}
    merges = 0
    while heap:
        negq, _, ver, j = heapq.heappop(heap)
        if ver != version[j] or j in rho:
            continue
        i = find(pred[j])
        rho[j] = -negq
        w[i] += w[j]
        p[i] += p[j]
        nxt[last[i]] = j
        pred[j] = last[i]
        last[i] = last[j]
        owner[j] = i
        merges += 1
        if i != root:
            version[i] += 1
            heapq.heappush(heap, (-(w[i] / p[i]), id_key(i), version[i], i))

    sequence = []
    cur = nxt.get(root)
    while cur is not None:
        sequence.append(cur)
        cur = nxt.get(cur)
    return MergeState(sequence, rho, merges, {root: w[root]}, {root: p[root]})


def optimal_single_sequence(forest: PrecedenceForest) -> List[str]:
    """Optimal repair order for one crew (the dummy root is never part of it)."""
    return merge_groups(forest).sequence


def rho_factors(forest: PrecedenceForest) -> Dict[str, Fraction]:
    """Max over subtrees rooted at each job of (subtree weight) / (subtree repair time)."""
    return merge_groups(forest).rho


def greedy_sequence(forest: PrecedenceForest, key) -> List[str]:
    """Repeatedly pick the available job with the largest ``key``; ties go to the lowest id.

    A job is available once its parent has been picked.
    """
    heap = [(-key[j], id_key(j), j) for j in forest.roots]
    heapq.heapify(heap)
    out = []
    while heap:
        _, _, j = heapq.heappop(heap)
        out.append(j)
        for c in forest.children(j):
            heapq.heappush(heap, (-key[c], id_key(c), c))
    return out


def dispatch_single(forest: PrecedenceForest, rho=None) -> List[str]:
    """Single-crew rho dispatch: always repair the available line with the largest rho."""
    if rho is None:
        rho = rho_factors(forest)
    return greedy_sequence(forest, rho)
