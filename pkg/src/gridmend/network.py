"""Radial network model, damaged component graph and soft precedence forest.

A network file is line oriented::

    # comment
    node <id> <weight> [source]
    edge <id> <u> <v> <intact|damaged> [<repair_time>]

Contraction deletes the damaged lines, turns every remaining connected
component into a supernode and orients the damaged lines away from the
source.  Replacing supernodes by lines gives the precedence forest whose jobs
are the damaged lines.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

DUMMY_ROOT = "_root"

_TOKEN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.\-]*$")
_CHUNK = re.compile(r"(\d+)")


class NetworkError(ValueError):
    """Invalid network input; ``lineno`` is set when parsing a file."""

    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def id_key(ident: str) -> tuple:
    """Natural sort key, so that ``L2`` sorts before ``L10``."""
    parts = _CHUNK.split(ident)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p)


@dataclass(frozen=True)
class Node:
    id: str
    weight: float
    is_source: bool = False


@dataclass(frozen=True)
class Line:
    id: str
    u: str
    v: str
    damaged: bool
    repair_time: Optional[float] = None


@dataclass(frozen=True)
class Network:
    nodes: Tuple[Node, ...]
    lines: Tuple[Line, ...]

    def __post_init__(self):
        _validate(self.nodes, self.lines, {}, None)

    @property
    def source(self) -> str:
        return next(n.id for n in self.nodes if n.is_source)

    @property
    def weights(self) -> Dict[str, float]:
        return {n.id: n.weight for n in self.nodes}

    @property
    def damaged_lines(self) -> Tuple[Line, ...]:
        return tuple(l for l in self.lines if l.damaged)

    @property
    def total_weight(self) -> float:
        return sum(n.weight for n in self.nodes)

    def line(self, line_id: str) -> Line:
        for l in self.lines:
            if l.id == line_id:
                return l
        raise KeyError(line_id)

    def adjacency(self) -> Dict[str, List[Line]]:
        adj: Dict[str, List[Line]] = {n.id: [] for n in self.nodes}
        for l in self.lines:
            adj[l.u].append(l)
            adj[l.v].append(l)
        return adj

    def with_repair_times(self, times: Mapping[str, float]) -> "Network":
        lines = tuple(
            Line(l.id, l.u, l.v, l.damaged, times.get(l.id, l.repair_time)) for l in self.lines
        )
        return Network(self.nodes, lines)


def _validate(nodes, lines, where: Mapping[Tuple[str, str], int], eof: Optional[int]):
    # `where` maps ("node"|"edge", id) to the file line it came from, if any
    def err(msg, kind=None, ident=None):
        lineno = where.get((kind, ident), eof) if kind else eof
        raise NetworkError(msg, lineno)

    ids = set()
    for n in nodes:
        if n.id in ids:
            err(f"duplicate node id {n.id!r}", "node", n.id)
        ids.add(n.id)
        if not n.weight >= 0:
            err(f"node {n.id!r} has negative weight", "node", n.id)
    sources = [n.id for n in nodes if n.is_source]
    if not sources:
        err("missing source node")
    if len(sources) > 1:
        err(f"more than one source node ({', '.join(sources)})", "node", sources[1])

    line_ids = set()
    parent = {n: n for n in ids}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for l in lines:
        if l.id in line_ids:
            err(f"duplicate edge id {l.id!r}", "edge", l.id)
        line_ids.add(l.id)
        for end in (l.u, l.v):
            if end not in ids:
                err(f"edge {l.id!r} references unknown node {end!r}", "edge", l.id)
        if l.damaged:
            if l.repair_time is None or not l.repair_time > 0:
                err(f"edge {l.id!r} needs a positive repair time", "edge", l.id)
        elif l.repair_time is not None:
            err(f"intact edge {l.id!r} must not carry a repair time", "edge", l.id)
        a, b = find(l.u), find(l.v)
        if a == b:
            err(f"cycle detected at edge {l.id!r}", "edge", l.id)
        parent[a] = b

    roots = {find(n.id) for n in nodes}
    if len(roots) > 1:
        src_root = find(sources[0])
        stray = next(n.id for n in nodes if find(n.id) != src_root)
        err(f"disconnected graph: node {stray!r} is not reachable from the source", "node", stray)


def parse_network(text: str) -> Network:
    """Parse and validate the contents of a network file."""
    nodes: List[Node] = []
    lines: List[Line] = []
    where: Dict[Tuple[str, str], int] = {}
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kind, args = tokens[0], tokens[1:]
        for tok in args[:1] if kind == "node" else args[:3]:
            if not _TOKEN.match(tok):
                raise NetworkError(f"invalid id {tok!r}", lineno)
        if kind == "node":
            if len(args) not in (2, 3) or (len(args) == 3 and args[2] != "source"):
                raise NetworkError("expected: node <id> <weight> [source]", lineno)
            weight = _number(args[1], lineno)
            if (kind, args[0]) in where:
                raise NetworkError(f"duplicate node id {args[0]!r}", lineno)
            where[(kind, args[0])] = lineno
            nodes.append(Node(args[0], weight, len(args) == 3))
        elif kind == "edge":
            if len(args) not in (4, 5) or args[3] not in ("intact", "damaged"):
                raise NetworkError("expected: edge <id> <u> <v> <intact|damaged> [<repair_time>]", lineno)
            damaged = args[3] == "damaged"
            if damaged and len(args) != 5:
                raise NetworkError(f"damaged edge {args[0]!r} needs a repair time", lineno)
            if not damaged and len(args) == 5:
                raise NetworkError(f"intact edge {args[0]!r} must not carry a repair time", lineno)
            ptime = _number(args[4], lineno) if damaged else None
            if (kind, args[0]) in where:
                raise NetworkError(f"duplicate edge id {args[0]!r}", lineno)
            where[(kind, args[0])] = lineno
            lines.append(Line(args[0], args[1], args[2], damaged, ptime))
        else:
            raise NetworkError(f"unknown record type {kind!r}", lineno)

    _validate(nodes, lines, where, max(lineno, 1))
    return Network(tuple(nodes), tuple(lines))


def _number(tok: str, lineno: int) -> float:
    try:
        value = float(tok)
    except ValueError:
        raise NetworkError(f"not a number: {tok!r}", lineno) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise NetworkError(f"not a finite number: {tok!r}", lineno)
    return value


def format_network(net: Network) -> str:
    """Inverse of :func:`parse_network`; floats use ``repr`` so they round-trip."""
    out = []
    for n in net.nodes:
        out.append(f"node {n.id} {_fmt(n.weight)}" + (" source" if n.is_source else ""))
    for l in net.lines:
        if l.damaged:
            out.append(f"edge {l.id} {l.u} {l.v} damaged {_fmt(l.repair_time)}")
        else:
            out.append(f"edge {l.id} {l.u} {l.v} intact")
    return "\n".join(out) + "\n"


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


@dataclass(frozen=True)
class Supernode:
    id: str
    members: frozenset
    weight: float


@dataclass(frozen=True)
class DamagedEdge:
    line: str
    head: str  # supernode on the source side
    tail: str
    repair_time: float


@dataclass(frozen=True)
class DamagedComponentGraph:
    supernodes: Tuple[Supernode, ...]
    edges: Tuple[DamagedEdge, ...]
    source: str
    membership: Mapping[str, str] = field(repr=False)

    def supernode(self, sid: str) -> Supernode:
        for s in self.supernodes:
            if s.id == sid:
                return s
        raise KeyError(sid)


def orient(net: Network) -> Dict[str, Tuple[str, str]]:
    """Map each line id to (upstream node, downstream node) as seen from the source."""
    adj = net.adjacency()
    seen = {net.source}
    queue = deque([net.source])
    out: Dict[str, Tuple[str, str]] = {}
    while queue:
        a = queue.popleft()
        for l in adj[a]:
            b = l.v if l.u == a else l.u
            if b not in seen:
                seen.add(b)
                out[l.id] = (a, b)
                queue.append(b)
    return out


def contract(net: Network) -> DamagedComponentGraph:
    """Contract intact-connected nodes into supernodes; edges are the damaged lines."""
    adj = net.adjacency()
    membership: Dict[str, str] = {}
    groups: List[List[str]] = []
    for start in sorted((n.id for n in net.nodes), key=id_key):
        if start in membership:
            continue
        comp, queue = [], deque([start])
        membership[start] = start
        while queue:
            a = queue.popleft()
            comp.append(a)
            for l in adj[a]:
                if l.damaged:
                    continue
                b = l.v if l.u == a else l.u
                if b not in membership:
                    membership[b] = start
                    queue.append(b)
        groups.append(comp)

    weights = net.weights
    supernodes = tuple(
        Supernode(g[0], frozenset(g), sum(weights[n] for n in g)) for g in groups
    )
    # g[0] is the smallest id of its component because starts are visited in id order

    source = membership[net.source]
    direction = orient(net)
    edges = []
    for l in net.damaged_lines:
        near, far = direction[l.id]
        head, tail = membership[near], membership[far]
        if head == tail:
            raise NetworkError(f"damaged line {l.id!r} joins a supernode to itself")
        edges.append(DamagedEdge(l.id, head, tail, l.repair_time))
    return DamagedComponentGraph(supernodes, tuple(edges), source, membership)


@dataclass(frozen=True)
class Job:
    id: str
    weight: float
    ptime: float
    parent: Optional[str] = None  # None only for a root when there is no dummy root
    tail: Optional[str] = None  # supernode energized by this line


class PrecedenceForest:
    """Outtree over damaged lines.

    ``jobs`` holds the real jobs in topological (breadth-first) order.  When
    several jobs hang directly off the source, they get ``DUMMY_ROOT`` as
    parent; the dummy itself (zero weight and zero repair time) is never part
    of ``jobs``.
    """

    def __init__(self, jobs: Iterable[Job]):
        jobs = list(jobs)
        by_id = {j.id: j for j in jobs}
        if len(by_id) != len(jobs):
            raise ValueError("duplicate job id")
        if DUMMY_ROOT in by_id:
            raise ValueError(f"{DUMMY_ROOT!r} is reserved")
        tops = [j for j in jobs if j.parent in (None, DUMMY_ROOT)]
        self.has_dummy_root = len(tops) > 1
        fixed = []
        for j in jobs:
            if j.parent in (None, DUMMY_ROOT):
                parent = DUMMY_ROOT if self.has_dummy_root else None
                if parent != j.parent:
                    j = Job(j.id, j.weight, j.ptime, parent, j.tail)
            elif j.parent not in by_id:
                raise ValueError(f"job {j.id!r} has unknown parent {j.parent!r}")
            if not j.ptime > 0:
                raise ValueError(f"job {j.id!r} needs a positive processing time")
            fixed.append(j)
        by_id = {j.id: j for j in fixed}

        children: Dict[str, List[str]] = {j.id: [] for j in fixed}
        children[DUMMY_ROOT] = []
        for j in fixed:
            children[j.parent if j.parent is not None else DUMMY_ROOT].append(j.id)
        for kids in children.values():
            kids.sort(key=id_key)

        order: List[Job] = []
        queue = deque(children[DUMMY_ROOT])
        while queue:
            jid = queue.popleft()
            order.append(by_id[jid])
            queue.extend(children[jid])
        if len(order) != len(fixed):
            raise ValueError("precedence relation has a cycle")

        self._jobs = {j.id: j for j in order}
        self._children = children

    @classmethod
    def from_parents(cls, parents: Mapping[str, Optional[str]], weights, ptimes) -> "PrecedenceForest":
        """Build from plain mappings; a parent of ``None`` marks a top-level job."""
        return cls(Job(j, weights[j], ptimes[j], parents[j]) for j in parents)

    @property
    def jobs(self) -> Dict[str, Job]:
        return self._jobs

    def __len__(self):
        return len(self._jobs)

    def __iter__(self):
        return iter(self._jobs.values())

    def __contains__(self, jid):
        return jid in self._jobs

    def __getitem__(self, jid) -> Job:
        return self._jobs[jid]

    @property
    def roots(self) -> List[str]:
        """Top-level real jobs (children of the dummy root, if there is one)."""
        return list(self._children[DUMMY_ROOT])

    def children(self, jid: str) -> List[str]:
        return list(self._children[jid])

    def parent(self, jid: str) -> Optional[str]:
        """Real parent job, or None for a top-level job."""
        p = self._jobs[jid].parent
        return None if p in (None, DUMMY_ROOT) else p

    def ancestors(self, jid: str) -> List[str]:
        """``jid`` and all its real ancestors, nearest first."""
        chain = []
        while jid is not None:
            chain.append(jid)
            jid = self.parent(jid)
        return chain

    def weights(self) -> Dict[str, float]:
        return {j.id: j.weight for j in self}

    def ptimes(self) -> Dict[str, float]:
        return {j.id: j.ptime for j in self}

    def parents(self) -> Dict[str, Optional[str]]:
        return {j.id: self.parent(j.id) for j in self}

    def relabel(self, weights=None, ptimes=None) -> "PrecedenceForest":
        """Copy with some weights and/or processing times replaced."""
        weights = weights or {}
        ptimes = ptimes or {}
        return PrecedenceForest(
            Job(j.id, weights.get(j.id, j.weight), ptimes.get(j.id, j.ptime), self.parent(j.id), j.tail)
            for j in self
        )

    def __repr__(self):
        return f"PrecedenceForest({len(self)} jobs, dummy_root={self.has_dummy_root})"


def build_precedence(g: DamagedComponentGraph) -> PrecedenceForest:
    """Jobs are the damaged lines; a job's parent is the line entering its head supernode."""
    entering = {e.tail: e.line for e in g.edges}
    weight = {s.id: s.weight for s in g.supernodes}
    return PrecedenceForest(
        Job(e.line, weight[e.tail], e.repair_time, entering.get(e.head), e.tail) for e in g.edges
    )


def forest_from_network(net: Network) -> PrecedenceForest:
    return build_precedence(contract(net))
