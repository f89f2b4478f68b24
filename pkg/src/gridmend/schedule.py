"""Schedules, energization times, harm and restoration trajectories.

Times are plain numbers: floats normally, ``Fraction`` when a caller needs
exact arithmetic.  Nothing in here converts between the two.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .network import DamagedComponentGraph, Network, PrecedenceForest, id_key


class Assignment(NamedTuple):
    job: str
    crew: int
    start: float
    completion: float


@dataclass(frozen=True)
class Schedule:
    """Per-crew ordered job lists; crews are numbered from 0."""

    m: int
    crews: Tuple[Tuple[Assignment, ...], ...]

    def assignments(self) -> List[Assignment]:
        """All entries ordered by start time, then crew."""
        return sorted((a for crew in self.crews for a in crew), key=lambda a: (a.start, a.crew))

    def starts(self) -> Dict[str, float]:
        return {a.job: a.start for crew in self.crews for a in crew}

    def completions(self) -> Dict[str, float]:
        return {a.job: a.completion for crew in self.crews for a in crew}

    def crew_of(self) -> Dict[str, int]:
        return {a.job: a.crew for crew in self.crews for a in crew}

    @property
    def makespan(self):
        return max((crew[-1].completion for crew in self.crews if crew), default=0)

    def validate(self, forest: PrecedenceForest, rel_tol: float = 1e-12) -> None:
        """Raise ``ValueError`` unless this is a feasible schedule for ``forest``."""
        if len(self.crews) != self.m:
            raise ValueError(f"expected {self.m} crews, got {len(self.crews)}")
        seen = set()
        for k, crew in enumerate(self.crews):
            prev = 0
            for a in crew:
                if a.crew != k:
                    raise ValueError(f"job {a.job!r} filed under crew {k} but labelled {a.crew}")
                if a.job not in forest:
                    raise ValueError(f"unknown job {a.job!r}")
                if a.job in seen:
                    raise ValueError(f"job {a.job!r} scheduled twice")
                seen.add(a.job)
                if a.start < prev - rel_tol * max(1, abs(prev)):
                    raise ValueError(f"job {a.job!r} overlaps its predecessor on crew {k}")
                p = forest[a.job].ptime
                if abs(a.completion - a.start - p) > rel_tol * max(1, abs(a.completion)):
                    raise ValueError(f"job {a.job!r} has duration {a.completion - a.start}, expected {p}")
                prev = a.completion
        missing = set(forest.jobs) - seen
        if missing:
            raise ValueError(f"jobs never scheduled: {sorted(missing, key=id_key)}")


def energization_times(forest: PrecedenceForest, completions: Mapping[str, float]) -> Dict[str, float]:
    """E_j = max completion over j and its ancestors, in one top-down pass."""
    e: Dict[str, float] = {}
    for job in forest:  # topological order
        try:
            c = completions[job.id]
        except KeyError:
            raise KeyError(f"missing completion time for job {job.id!r}") from None
        parent = forest.parent(job.id)
        e[job.id] = c if parent is None else max(c, e[parent])
    return e


def harm(forest: PrecedenceForest, e: Mapping[str, float]):
    """Total weighted energization time over the damaged lines."""
    return sum((job.weight * e[job.id] for job in forest), 0)


def schedule_harm(forest: PrecedenceForest, schedule: Schedule):
    return harm(forest, energization_times(forest, schedule.completions()))


def infinite_crew_harm(forest: PrecedenceForest):
    """Harm when every job starts at time zero: the crew-count-free lower bound."""
    return harm(forest, energization_times(forest, forest.ptimes()))


def list_schedule(forest: PrecedenceForest, priority: Sequence[str], m: int) -> Schedule:
    """Give each listed job to the crew that frees up first (lowest index on ties)."""
    if m < 1:
        raise ValueError("need at least one crew")
    if len(priority) != len(forest) or set(priority) != set(forest.jobs):
        raise ValueError("priority list must be a permutation of the jobs")
    free = [(0, k) for k in range(m)]
    crews: List[List[Assignment]] = [[] for _ in range(m)]
    for jid in priority:
        t, k = heapq.heappop(free)
        done = t + forest[jid].ptime
        crews[k].append(Assignment(jid, k, t, done))
        heapq.heappush(free, (done, k))
    return Schedule(m, tuple(tuple(c) for c in crews))


def schedule_from_rows(forest: PrecedenceForest, rows, m: Optional[int] = None) -> Schedule:
    """Replay (crew, job, start) rows back-to-back per crew using the forest's repair times.

    Row start times only fix the order on each crew; the replay inserts no idle
    time.  This is how a schedule computed with rounded durations gets
    re-scored with the true ones.
    """
    per_crew: Dict[int, List[Tuple[float, str]]] = {}
    for crew, job, start in rows:
        per_crew.setdefault(int(crew), []).append((start, job))
    if m is None:
        m = max(per_crew, default=-1) + 1
    if any(k < 0 or k >= m for k in per_crew):
        raise ValueError("crew index out of range")
    crews = []
    for k in range(m):
        t, seq = 0, []
        for _, job in sorted(per_crew.get(k, []), key=lambda r: (r[0], id_key(r[1]))):
            if job not in forest:
                raise ValueError(f"unknown job {job!r}")
            done = t + forest[job].ptime
            seq.append(Assignment(job, k, t, done))
            t = done
        crews.append(tuple(seq))
    schedule = Schedule(m, tuple(crews))
    schedule.validate(forest)
    return schedule


@dataclass(frozen=True)
class EnergizationResult:
    line_energization: Dict[str, float]
    node_energization: Dict[str, float]
    harm: float
    node_weights: Dict[str, float]


def node_energization(net: Network, g: DamagedComponentGraph, e_lines: Mapping[str, float]) -> EnergizationResult:
    """Spread line energization times onto the nodes of each tail supernode."""
    by_tail = {e.tail: e.line for e in g.edges}
    e_nodes: Dict[str, float] = {}
    for node in net.nodes:
        sid = g.membership[node.id]
        e_nodes[node.id] = 0 if sid == g.source else e_lines[by_tail[sid]]
    weights = net.weights
    total = sum((weights[n] * t for n, t in e_nodes.items()), 0)
    return EnergizationResult(dict(e_lines), e_nodes, total, weights)


class Breakpoint(NamedTuple):
    time: float
    restored_weight: float
    fraction: float


Trajectory = List[Breakpoint]


def trajectory(result: EnergizationResult, total_weight: Optional[float] = None) -> Trajectory:
    """Cumulative restored weight at every distinct node energization time."""
    weights = result.node_weights
    if total_weight is None:
        total_weight = sum(weights.values())
    at: Dict[float, float] = {}
    for n, t in result.node_energization.items():
        at[t] = at.get(t, 0) + weights[n]
    out: Trajectory = []
    acc = 0
    for t in sorted(at):
        acc += at[t]
        frac = acc / total_weight if total_weight else 1.0
        out.append(Breakpoint(t, acc, frac))
    if out:
        # guard against float drift in the running sum
        out[-1] = Breakpoint(out[-1].time, out[-1].restored_weight, 1.0)
    return out


def fraction_at(traj: Trajectory, t: float) -> float:
    """Restored fraction at time ``t`` (right-continuous step function)."""
    frac = 0.0
    for bp in traj:
        if bp.time > t:
            break
        frac = bp.fraction
    return frac
