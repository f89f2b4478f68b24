"""Time-indexed integer program, LP-format export and an exact enumeration oracle.

Period ``t`` (1-based) covers the interval ``[t-1, t]``.  Variables:

* ``x_<line>_<t>`` line is being repaired during period t
* ``y_<line>_<t>`` line is usable during period t (repair finished by t-1)
* ``u_<node>_<t>`` node is energized during period t
* ``f_<line>_<t>`` connectivity flow on the line, signed along the line's
  direction away from the source

Nothing here solves the program; :func:`export_model` writes it for any
external MIP solver and :func:`exact_enum` supplies exact optima for small
instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional, Tuple

from .network import Network, PrecedenceForest, build_precedence, contract, id_key, orient
from .schedule import Assignment, Schedule, energization_times, harm, list_schedule, node_energization

DEFAULT_CAP = 8

_LP_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.!\"#$%&()/,;?@`'{}|~")


class IlpError(ValueError):
    pass


class EnumerationCapError(ValueError):
    pass


class Row(NamedTuple):
    name: str
    terms: Tuple[Tuple[str, float], ...]
    sense: str  # "<=", ">=" or "="
    rhs: float


@dataclass
class IlpModel:
    net: Network
    m: int
    horizon: int
    big_m: int
    binaries: List[str]
    flows: List[str]
    rows: List[Row]
    objective: Dict[str, float]
    objective_constant: float
    srtp: Dict[str, float] = field(default_factory=dict)

    @property
    def n_variables(self) -> int:
        return len(self.binaries) + len(self.flows)

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def _safe(ident: str) -> str:
    # '-' is an operator in LP files; '.' is a legal name character
    return ident.replace("-", ".")


def x_var(line, t):
    return f"x_{_safe(line)}_{t}"


def y_var(line, t):
    return f"y_{_safe(line)}_{t}"


def u_var(node, t):
    return f"u_{_safe(node)}_{t}"


def f_var(line, t):
    return f"f_{_safe(line)}_{t}"


def round_repair_times(net: Network) -> Network:
    """Round damaged repair times to the nearest positive integer."""
    return net.with_repair_times({l.id: float(max(1, round(l.repair_time))) for l in net.damaged_lines})


def shortest_repair_time_paths(net: Network) -> Dict[str, float]:
    """Total damaged repair time on the (unique) path from the source to each node."""
    direction = orient(net)
    into = {b: net.line(lid) for lid, (a, b) in direction.items()}
    upstream = {b: a for a, b in direction.values()}
    out: Dict[str, float] = {net.source: 0.0}

    def srtp(node):
        if node not in out:
            line = into[node]
            out[node] = srtp(upstream[node]) + (line.repair_time if line.damaged else 0.0)
        return out[node]

    for n in net.nodes:
        srtp(n.id)
    return out


def build_ilp(net: Network, m: int, horizon: Optional[int] = None) -> IlpModel:
    if m < 1:
        raise IlpError("need at least one crew")
    damaged = net.damaged_lines
    for l in damaged:
        if not float(l.repair_time).is_integer():
            raise IlpError(f"repair time of {l.id!r} is not an integer ({l.repair_time}); round it first")
    ptime = {l.id: int(l.repair_time) for l in damaged}
    T = int(horizon) if horizon is not None else max(1, sum(ptime.values()))
    if ptime and T < max(ptime.values()):
        raise IlpError(f"horizon {T} is shorter than the longest repair time")

    names = {}
    for n in net.nodes:
        names.setdefault(_safe(n.id), []).append(n.id)
    for l in net.lines:
        names.setdefault(_safe(l.id), []).append(l.id)
    for key, ids in names.items():
        if len(set(ids)) > 1 or not set(key) <= _LP_NAME_OK:
            raise IlpError(f"ids {ids} cannot be written as distinct LP names")

    source = net.source
    sinks = [n.id for n in net.nodes if n.id != source]
    big_m = len(sinks)
    direction = orient(net)
    inflow: Dict[str, List[str]] = {n.id: [] for n in net.nodes}
    outflow: Dict[str, List[str]] = {n.id: [] for n in net.nodes}
    for lid, (a, b) in direction.items():
        outflow[a].append(lid)
        inflow[b].append(lid)
    periods = range(1, T + 1)

    binaries: List[str] = []
    for l in damaged:
        binaries += [x_var(l.id, t) for t in periods]
    for l in net.lines:
        binaries += [y_var(l.id, t) for t in periods]
    for n in net.nodes:
        binaries += [u_var(n.id, t) for t in periods]
    flows = [f_var(l.id, t) for l in net.lines for t in periods]

    rows: List[Row] = []
    for l in damaged:
        rows.append(Row(f"init_damaged_{_safe(l.id)}", ((y_var(l.id, 1), 1),), "=", 0))
    for l in net.lines:
        if not l.damaged:
            for t in periods:
                rows.append(Row(f"init_intact_{_safe(l.id)}_{t}", ((y_var(l.id, t), 1),), "=", 1))
    for t in periods:
        rows.append(Row(f"init_source_{_safe(source)}_{t}", ((u_var(source, t), 1),), "=", 1))
    for t in periods:
        rows.append(Row(f"crews_{t}", tuple((x_var(l.id, t), 1) for l in damaged), "<=", m))
    for l in damaged:
        for t in periods:
            # p_l y_l^t <= sum_{tau < t} x_l^tau, scaled by p_l to stay integral
            terms = ((y_var(l.id, t), ptime[l.id]),) + tuple((x_var(l.id, tau), -1) for tau in range(1, t))
            rows.append(Row(f"repair_{_safe(l.id)}_{t}", terms, "<=", 0))
    for t in periods:
        rows.append(Row(f"source_out_{_safe(source)}_{t}", tuple((f_var(l, t), 1) for l in outflow[source]), ">=", 0))
    for l in net.lines:
        for t in periods:
            rows.append(Row(f"flow_lo_{_safe(l.id)}_{t}", ((f_var(l.id, t), 1), (y_var(l.id, t), big_m)), ">=", 0))
            rows.append(Row(f"flow_hi_{_safe(l.id)}_{t}", ((f_var(l.id, t), 1), (y_var(l.id, t), -big_m)), "<=", 0))
    for n in sinks:
        for t in periods:
            terms = ((u_var(n, t), 1),) + tuple((f_var(l, t), -1) for l in inflow[n]) \
                + tuple((f_var(l, t), 1) for l in outflow[n])
            rows.append(Row(f"energize_{_safe(n)}_{t}", terms, "<=", 0))
    srtp = shortest_repair_time_paths(net)
    for n in net.nodes:
        last = min(math.floor(srtp[n.id] / m) - 1, T)
        if last >= 1:
            rows.append(Row(f"srtp_{_safe(n.id)}", tuple((u_var(n.id, t), 1) for t in range(1, last + 1)), "=", 0))

    weights = net.weights
    objective = {u_var(n.id, t): -weights[n.id] for n in net.nodes for t in periods if weights[n.id] != 0}
    constant = T * sum(weights.values())
    return IlpModel(net, m, T, big_m, binaries, flows, rows, objective, constant, srtp)


def _num(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def _term_strings(terms) -> List[str]:
    out = []
    for k, (var, coef) in enumerate(terms):
        mag = abs(coef)
        body = var if mag == 1 else f"{_num(mag)} {var}"
        if k == 0:
            out.append(f"- {body}" if coef < 0 else body)
        else:
            out.append(f"{'-' if coef < 0 else '+'} {body}")
    return out


def _wrap(head: str, parts: List[str], width: int = 200) -> List[str]:
    # LP-format readers cap line length, so long expressions continue on new lines
    lines, cur = [], head
    for part in parts:
        if len(cur) + 1 + len(part) > width and cur.strip():
            lines.append(cur)
            cur = "   " + part
        else:
            cur = f"{cur} {part}" if cur else part
    lines.append(cur)
    return lines


def export_model(model: IlpModel) -> str:
    """CPLEX LP-format text of the model; identical models give identical text."""
    lines = [
        "\\ post-disaster repair scheduling, time-indexed formulation",
        f"\\ crews={model.m} horizon={model.horizon} bigM={model.big_m}",
        "Minimize",
    ]
    parts = _term_strings(list(model.objective.items()))
    const = model.objective_constant
    if parts:
        parts.append(f"+ {_num(const)}" if const >= 0 else f"- {_num(-const)}")
    else:
        parts = [_num(const)]
    lines += _wrap(" harm:", parts)
    lines.append("Subject To")
    for r in model.rows:
        if not r.terms:
            continue
        lines += _wrap(f" {r.name}:", _term_strings(r.terms) + [r.sense, _num(r.rhs)])
    lines.append("Bounds")
    for v in model.flows:
        lines.append(f" -{model.big_m} <= {v} <= {model.big_m}")
    lines.append("Binaries")
    for k in range(0, len(model.binaries), 8):
        lines.append(" " + " ".join(model.binaries[k:k + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def encode_schedule(model: IlpModel, schedule: Schedule) -> Dict[str, float]:
    """Variable values implied by an integer-timed schedule."""
    net = model.net
    g = contract(net)
    forest = build_precedence(g)
    e_lines = energization_times(forest, schedule.completions())
    e_nodes = node_energization(net, g, e_lines).node_energization
    starts, comps = schedule.starts(), schedule.completions()
    direction = orient(net)
    below: Dict[str, List[str]] = {n.id: [n.id] for n in net.nodes}
    # nodes in the subtree below each node, deepest first
    for lid, (a, b) in reversed(list(direction.items())):
        below[a] += below[b]

    values: Dict[str, float] = {}
    periods = range(1, model.horizon + 1)
    for l in net.lines:
        for t in periods:
            if l.damaged:
                values[x_var(l.id, t)] = float(starts[l.id] < t <= comps[l.id])
                usable = comps[l.id] <= t - 1
            else:
                usable = True
            values[y_var(l.id, t)] = float(usable)
            tail = direction[l.id][1]
            values[f_var(l.id, t)] = float(sum(1 for n in below[tail] if e_nodes[n] <= t - 1)) if usable else 0.0
    for n in net.nodes:
        for t in periods:
            values[u_var(n.id, t)] = float(e_nodes[n.id] <= t - 1)
    return values


def objective_value(model: IlpModel, values: Mapping[str, float]) -> float:
    return model.objective_constant + sum(c * values[v] for v, c in model.objective.items())


def violated_rows(model: IlpModel, values: Mapping[str, float], tol: float = 1e-9) -> List[str]:
    bad = []
    for r in model.rows:
        lhs = sum(c * values[v] for v, c in r.terms)
        if (r.sense == "<=" and lhs > r.rhs + tol) or (r.sense == ">=" and lhs < r.rhs - tol) \
                or (r.sense == "=" and abs(lhs - r.rhs) > tol):
            bad.append(r.name)
    for v in model.binaries:
        if min(abs(values[v]), abs(values[v] - 1)) > tol:
            bad.append(v)
    for v in model.flows:
        if abs(values[v]) > model.big_m + tol:
            bad.append(v)
    return bad


def schedule_from_solution(model: IlpModel, values: Mapping[str, float], forest: PrecedenceForest) -> Schedule:
    """Turn solver output into a schedule, re-timed with the forest's repair times.

    The model does not forbid preemption, so a solver may split a repair over
    non-adjacent periods.  Three priority lists are read off the solution
    (by first repair period, by completion period, by the period the line's
    tail energizes), each is list-scheduled on ``model.m`` crews with the
    forest's repair times, and the cheapest result is returned.  Lines the
    solver never finished go last.  With true non-integer repair times in
    ``forest`` this is the re-scoring path for instances rounded before export.
    """
    T = model.horizon
    rounded = {l.id: int(l.repair_time) for l in model.net.damaged_lines}
    first, done, energized = {}, {}, {}
    for j in forest.jobs:
        active = [t for t in range(1, T + 1) if values.get(x_var(j, t), 0) > 0.5]
        first[j] = active[0] if active else math.inf
        # unfinished repairs only happen when nothing downstream carries weight
        done[j] = active[rounded[j] - 1] if len(active) >= rounded[j] else math.inf
        tail = forest[j].tail
        on = [t for t in range(1, T + 1) if tail is not None and values.get(u_var(tail, t), 0) > 0.5]
        energized[j] = on[0] - 1 if on else math.inf
    keys = (
        lambda j: (first[j], done[j], id_key(j)),
        lambda j: (done[j], first[j], id_key(j)),
        lambda j: (energized[j], done[j], first[j], id_key(j)),
    )
    best = None
    for key in keys:
        sched = list_schedule(forest, sorted(forest.jobs, key=key), model.m)
        h = harm(forest, energization_times(forest, sched.completions()))
        if best is None or h < best[0]:
            best = (h, sched)
    return best[1]


@dataclass
class ExactResult:
    harm: float
    schedule: Schedule
    explored: int


def exact_enum(forest: PrecedenceForest, m: int, cap: int = DEFAULT_CAP) -> ExactResult:
    """Exact minimum harm by exhaustive search over non-delay schedules.

    Jobs are appended one at a time to the crew that frees up first, so every
    crew assignment and every per-crew order is reachable (up to relabelling
    crews).  Idle time never helps because harm only grows with completion
    times.  Branches whose lower bound already reaches the incumbent are cut;
    the bound treats every unplaced job as starting at the current earliest
    free time.
    """
    jobs = list(forest.jobs)
    n = len(jobs)
    if n > cap:
        raise EnumerationCapError(f"{n} jobs exceeds the enumeration cap of {cap}")
    if m < 1:
        raise ValueError("need at least one crew")
    if n == 0:
        return ExactResult(0, Schedule(m, tuple(() for _ in range(m))), 1)
    idx = {j: k for k, j in enumerate(jobs)}
    par = [idx[forest.parent(j)] if forest.parent(j) is not None else -1 for j in jobs]
    p = [forest[j].ptime for j in jobs]
    w = [forest[j].weight for j in jobs]
    crews = min(m, n)

    comp = [None] * n
    start = [None] * n
    crew_of = [None] * n
    free = [(0, k) for k in range(crews)]
    best = [math.inf, None]
    explored = 0

    def bound(t_min):
        e = [0] * n
        total = 0
        for k in range(n):  # topological order
            own = comp[k] if comp[k] is not None else t_min + p[k]
            if par[k] >= 0 and e[par[k]] > own:
                own = e[par[k]]
            e[k] = own
            total += w[k] * own
        return total

    def dfs(depth):
        nonlocal explored
        explored += 1
        t, c = min(free)
        lb = bound(t)
        if lb >= best[0]:
            return
        if depth == n:
            best[0] = lb
            best[1] = (list(start), list(crew_of))
            return
        slot = free.index((t, c))
        for k in range(n):
            if comp[k] is not None:
                continue
            comp[k], start[k], crew_of[k] = t + p[k], t, c
            free[slot] = (t + p[k], c)
            dfs(depth + 1)
            free[slot] = (t, c)
            comp[k] = start[k] = crew_of[k] = None

    dfs(0)
    starts, crews_of = best[1]
    per_crew: List[List[Assignment]] = [[] for _ in range(m)]
    for k in sorted(range(n), key=lambda k: starts[k]):
        per_crew[crews_of[k]].append(Assignment(jobs[k], crews_of[k], starts[k], starts[k] + p[k]))
    return ExactResult(best[0], Schedule(m, tuple(tuple(c) for c in per_crew)), explored)
