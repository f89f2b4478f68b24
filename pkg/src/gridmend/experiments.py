"""Seeded instance generation, optimality-gap studies and trajectory comparisons.

Randomness comes from numpy's PCG64 generator.  Each instance seed is split
with ``SeedSequence.spawn`` into independent streams (topology, damage,
weights, special node, repair times, perturbation), so changing how one
quantity is drawn never shifts the others.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from typing import Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from .ilp import DEFAULT_CAP, exact_enum
from .lp import lp_list_schedule, solve_lp_relaxation
from .network import Line, Network, Node, build_precedence, contract, parse_network
from .policies import run_policy
from .schedule import (
    Trajectory,
    energization_times,
    fraction_at,
    node_energization,
    schedule_harm,
    trajectory,
)

STREAMS = ("topology", "damage", "weights", "special", "repair", "perturb")


def load_topology(name: str) -> Network:
    """``ieee13``, ``radial:<nodes>`` (needs a seed, see gen_instance) or a file path."""
    if name == "ieee13":
        text = resources.files("gridmend").joinpath("data/ieee13.txt").read_text()
        return parse_network(text)
    if os.path.exists(name):
        with open(name, encoding="utf-8") as fh:
            return parse_network(fh.read())
    raise ValueError(f"unknown topology {name!r}")


def random_radial(n_nodes: int, rng: np.random.Generator, chain_prob: float = 0.6) -> Network:
    """Feeder-like random tree: node k hangs off node k-1 with probability
    ``chain_prob``, otherwise off a uniformly chosen earlier node."""
    if n_nodes < 2:
        raise ValueError("need at least two nodes")
    nodes = [Node("n0", 1.0, True)] + [Node(f"n{k}", 1.0) for k in range(1, n_nodes)]
    lines = []
    for k in range(1, n_nodes):
        parent = k - 1 if rng.random() < chain_prob else int(rng.integers(0, k))
        lines.append(Line(f"L{k}", f"n{parent}", f"n{k}", False))
    return Network(tuple(nodes), tuple(lines))


@dataclass(frozen=True)
class InstanceSpec:
    topology: str = "ieee13"
    damage: Union[str, int, float] = "all"  # "all", a line count, or a fraction in (0, 1)
    perturb: bool = False
    seed: int = 0
    crews: int = 2
    max_repair: int = 10
    special_weight: float = 5.0


def _streams(seed: int) -> Dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.Generator(np.random.PCG64(ss)) for name, ss in zip(STREAMS, children)}


def gen_instance(spec: InstanceSpec) -> Network:
    rng = _streams(spec.seed)
    if spec.topology.startswith("radial:"):
        base = random_radial(int(spec.topology.split(":", 1)[1]), rng["topology"])
    else:
        base = load_topology(spec.topology)

    n_lines = len(base.lines)
    if spec.damage == "all":
        damaged = set(range(n_lines))
    elif isinstance(spec.damage, float) and 0 < spec.damage < 1:
        count = int(round(spec.damage * n_lines))
        damaged = set(rng["damage"].choice(n_lines, size=count, replace=False).tolist())
    else:
        count = int(spec.damage)
        if not 0 <= count <= n_lines:
            raise ValueError(f"cannot damage {count} of {n_lines} lines")
        damaged = set(rng["damage"].choice(n_lines, size=count, replace=False).tolist())

    weights = rng["weights"].random(len(base.nodes))
    sinks = [k for k, n in enumerate(base.nodes) if not n.is_source]
    special = sinks[int(rng["special"].integers(0, len(sinks)))]
    weights[special] = spec.special_weight
    repair = rng["repair"].integers(1, spec.max_repair + 1, size=n_lines).astype(float)
    if spec.perturb:
        repair = repair + rng["perturb"].choice([-0.1, 0.0, 0.1], size=n_lines)

    nodes = tuple(Node(n.id, float(weights[k]), n.is_source) for k, n in enumerate(base.nodes))
    lines = tuple(
        Line(l.id, l.u, l.v, k in damaged, float(repair[k]) if k in damaged else None)
        for k, l in enumerate(base.lines)
    )
    return Network(nodes, lines)


class GapRow(NamedTuple):
    seed: int
    policy: str
    harm: float
    reference: float
    gap: float
    error: str = ""


@dataclass
class GapReport:
    reference: str
    rows: List[GapRow]

    def policies(self) -> List[str]:
        seen = []
        for r in self.rows:
            if r.policy not in seen:
                seen.append(r.policy)
        return seen

    def gaps(self, policy: str) -> np.ndarray:
        return np.array([r.gap for r in self.rows if r.policy == policy and not r.error])

    def summary(self, threshold: float = 0.10) -> Dict[str, Dict[str, float]]:
        out = {}
        for policy in self.policies():
            g = self.gaps(policy)
            if len(g) == 0:
                out[policy] = {"n": 0}
                continue
            out[policy] = {
                "n": int(len(g)),
                "mean_gap": float(g.mean()),
                "median_gap": float(np.median(g)),
                "p90_gap": float(np.quantile(g, 0.9)),
                "max_gap": float(g.max()),
                "within_threshold": float(np.mean(g <= threshold + 1e-12)),
            }
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["seed", "policy", "harm", "reference", "gap", "error"])
        for r in self.rows:
            writer.writerow([r.seed, r.policy, f"{r.harm:.9g}", f"{r.reference:.9g}", f"{r.gap:.9g}", r.error])
        return buf.getvalue()

    def summary_csv(self, threshold: float = 0.10) -> str:
        keys = ["n", "mean_gap", "median_gap", "p90_gap", "max_gap", "within_threshold"]
        out = ["policy," + ",".join(keys)]
        for policy, stats in self.summary(threshold).items():
            out.append(policy + "," + ",".join(f"{stats[k]:.9g}" if k in stats else "" for k in keys))
        return "\n".join(out) + "\n"


def _study_one(args):
    spec, policies, reference, cap = args
    rows = []
    try:
        net = gen_instance(spec)
        forest = build_precedence(contract(net))
        m = spec.crews
        lp_sol = None
        if reference == "enum":
            ref = exact_enum(forest, m, cap).harm
        elif reference == "lp-bound":
            lp_sol = solve_lp_relaxation(forest, m)
            ref = lp_sol.objective
        else:
            raise ValueError(f"unknown reference {reference!r}")
        harms = {}
        for policy in policies:
            if policy == "lp" and lp_sol is not None:
                harms[policy] = schedule_harm(forest, lp_list_schedule(forest, m, lp_sol))
            else:
                harms[policy] = schedule_harm(forest, run_policy(forest, m, policy, cap))
        if "ca" in harms and "lp" in harms:
            harms["en"] = min(harms["ca"], harms["lp"])
        for policy, h in harms.items():
            gap = h / ref - 1 if ref > 0 else 0.0
            rows.append(GapRow(spec.seed, policy, float(h), float(ref), float(gap)))
    except Exception as exc:  # recorded per instance, never fatal
        rows = [GapRow(spec.seed, p, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}")
                for p in policies]
    return rows


def worker_count(requested: Optional[int] = None) -> int:
    cap = os.environ.get("GRIDMEND_THREADS")
    n = requested if requested is not None else 1
    if cap:
        n = min(n, int(cap)) if requested is not None else int(cap)
    return max(1, n)


def run_gap_study(template: InstanceSpec, runs: int, policies: Sequence[str] = ("ca", "lp"),
                  reference: str = "enum", cap: int = DEFAULT_CAP, workers: Optional[int] = None) -> GapReport:
    """One instance per seed ``template.seed + k``; rows come back ordered by seed."""
    jobs = [(replace(template, seed=template.seed + k), tuple(policies), reference, cap) for k in range(runs)]
    n = worker_count(workers)
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_study_one, jobs, chunksize=max(1, len(jobs) // (4 * n))))
    else:
        results = [_study_one(j) for j in jobs]
    rows = [r for chunk in results for r in chunk]
    return GapReport(reference, rows)


@dataclass
class TrajectoryComparison:
    trajectories: Dict[str, Trajectory]
    makespans: Dict[str, float]
    harms: Dict[str, float]
    midpoint: float

    def midpoint_fractions(self) -> Dict[str, float]:
        return {p: fraction_at(t, self.midpoint) for p, t in self.trajectories.items()}


def compare_trajectories(net: Network, m: int, policies: Sequence[str] = ("dispatch", "fe", "eei"),
                         midpoint_policy: Optional[str] = None) -> TrajectoryComparison:
    """Run each policy and collect its restoration trajectory.

    The comparison instant is half the makespan of ``midpoint_policy``
    (default: the first policy listed).
    """
    g = contract(net)
    forest = build_precedence(g)
    total = net.total_weight
    trajs, spans, harms = {}, {}, {}
    for policy in policies:
        sched = run_policy(forest, m, policy)
        e = energization_times(forest, sched.completions())
        result = node_energization(net, g, e)
        trajs[policy] = trajectory(result, total)
        spans[policy] = sched.makespan
        harms[policy] = result.harm
    ref = midpoint_policy or policies[0]
    return TrajectoryComparison(trajs, spans, harms, spans[ref] / 2)
