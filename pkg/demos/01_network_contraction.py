"""
Damaged networks, supernodes and the precedence forest
======================================================

A storm has taken out four lines of the 13-node test feeder.  Contracting the
intact parts of the network shows which groups of customers come back
together, and which repairs have to wait on which.
"""

from dataclasses import replace

from gridmend import Network, build_precedence, contract
from gridmend.experiments import load_topology
from gridmend.network import format_network

# start from the intact feeder and mark four lines as damaged
feeder = load_topology("ieee13")
damage = {"650-632": 4, "632-645": 3, "684-611": 5, "671-692": 2}
lines = tuple(replace(l, damaged=True, repair_time=damage[l.id]) if l.id in damage else l for l in feeder.lines)
net = Network(feeder.nodes, lines)
print(format_network(net))

# each supernode is a set of nodes still wired together
g = contract(net)
for s in g.supernodes:
    tag = " (source)" if s.id == g.source else ""
    print(f"supernode {s.id}{tag}: {', '.join(s.members)}  weight={s.weight}")

# jobs are the damaged lines; a job's parent must be energized first
forest = build_precedence(g)
print()
for job in forest:
    print(f"{job.id:8s} parent={forest.parent(job.id)!s:8s} w={job.weight} p={job.ptime}")
