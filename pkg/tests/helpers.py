"""Instance generators and brute-force oracles shared by the tests."""
from fractions import Fraction
from itertools import permutations

import numpy as np

from gridmend.network import PrecedenceForest, parse_network
from gridmend.schedule import energization_times, harm, list_schedule

FIG2_DAMAGED = {"650-632": 4, "632-645": 3, "684-611": 5, "671-692": 2}

IEEE13_EDGES = [
    ("650", "632"), ("632", "633"), ("633", "634"), ("632", "645"), ("645", "646"),
    ("632", "671"), ("671", "680"), ("671", "684"), ("684", "611"), ("684", "652"),
    ("671", "692"), ("692", "675"),
]


def ieee13_text(damaged, weights=None):
    """13-node feeder with the given {line: repair time} damaged; unit weights by default."""
    nodes = sorted({n for e in IEEE13_EDGES for n in e}, key=int)
    weights = weights or {}
    out = []
    for n in nodes:
        out.append(f"node {n} {weights.get(n, 1)}" + (" source" if n == "650" else ""))
    for u, v in IEEE13_EDGES:
        lid = f"{u}-{v}"
        out.append(f"edge {lid} {u} {v} damaged {damaged[lid]}" if lid in damaged else f"edge {lid} {u} {v} intact")
    return "\n".join(out) + "\n"


def fig2_network():
    return parse_network(ieee13_text(FIG2_DAMAGED))


def random_forest(rng, n, exact=False, forest_prob=0.2, max_p=10):
    """Random outtree (or forest) on jobs j1..jn with integer p in 1..max_p.

    Weights are k/1000 for k in 1..1000 with one job at 5; ``exact`` keeps
    them as Fractions.
    """
    parents, w, p = {}, {}, {}
    for k in range(1, n + 1):
        j = f"j{k}"
        if k == 1 or rng.random() < forest_prob:
            parents[j] = None
        else:
            parents[j] = f"j{int(rng.integers(1, k))}"
        num = int(rng.integers(1, 1001))
        w[j] = Fraction(num, 1000) if exact else num / 1000
        p[j] = int(rng.integers(1, max_p + 1))
    heavy = f"j{int(rng.integers(1, n + 1))}"
    w[heavy] = Fraction(5) if exact else 5.0
    return PrecedenceForest.from_parents(parents, w, p)


def brute_single_optimum(forest):
    """Minimum harm over every permutation of the jobs on one crew.

    Works in integer units (weights scaled to thousandths) so the result is
    exact; returned as a Fraction.
    """
    jobs = list(forest.jobs)  # topological order
    n = len(jobs)
    idx = {j: k for k, j in enumerate(jobs)}
    par = [idx[forest.parent(j)] if forest.parent(j) is not None else -1 for j in jobs]
    w = [int(Fraction(forest[j].weight) * 1000) for j in jobs]
    p = [int(forest[j].ptime) for j in jobs]
    best = None
    for perm in permutations(range(n)):
        t = 0
        comp = [0] * n
        for k in perm:
            t += p[k]
            comp[k] = t
        e = [0] * n
        total = 0
        for k in range(n):
            c = comp[k]
            if par[k] >= 0 and e[par[k]] > c:
                c = e[par[k]]
            e[k] = c
            total += w[k] * c
        if best is None or total < best:
            best = total
    return Fraction(best, 1000)


def brute_single_topological(forest):
    """Minimum harm over precedence-respecting orders only (enough for one crew)."""
    w = forest.weights()
    p = forest.ptimes()
    children = {j: forest.children(j) for j in forest.jobs}
    best = [None]

    def dfs(avail, t, acc):
        if not avail:
            if best[0] is None or acc < best[0]:
                best[0] = acc
            return
        for j in sorted(avail):
            c = t + p[j]
            dfs((avail - {j}) | set(children[j]), c, acc + w[j] * c)

    dfs(frozenset(forest.roots), 0, 0)
    return best[0]


def brute_multi_optimum(forest, m):
    """Minimum harm over list schedules of every permutation (all non-delay schedules)."""
    best = None
    for perm in permutations(forest.jobs):
        h = harm(forest, energization_times(forest, list_schedule(forest, perm, m).completions()))
        if best is None or h < best:
            best = h
    return best


def subtree_rho_oracle(forest):
    """max over subtrees rooted at j of w(S)/p(S), by enumerating every rooted subtree."""
    memo = {}

    def rooted(j):
        # all subtrees rooted at j as (weight, time) pairs
        if j in memo:
            return memo[j]
        combos = [(Fraction(forest[j].weight), Fraction(forest[j].ptime))]
        for c in forest.children(j):
            options = [(0, 0)] + rooted(c)
            combos = [(a + x, b + y) for a, b in combos for x, y in options]
        memo[j] = combos
        return combos

    return {j: max(a / b for a, b in rooted(j)) for j in forest.jobs}


def rng_for(seed):
    return np.random.default_rng(seed)


# one line per acceptance criterion, printed by the terminal-summary hook
ACCEPTANCE_LINES = []


def report(number, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed
