"""
One crew: the optimal repair order and rho-factors
==================================================

With a single crew the best order comes from merging groups of lines by
their weight-to-time ratio.  The ratio a line carries when it is merged is
its rho-factor, and always repairing the available line with the largest
rho-factor reproduces the same order.
"""

from itertools import permutations

from gridmend import PrecedenceForest, dispatch_single, list_schedule, optimal_single_sequence, rho_factors, schedule_harm

# a small outtree: r feeds a and b, and b feeds c
forest = PrecedenceForest.from_parents(
    {"r": None, "a": "r", "b": "r", "c": "b"},
    {"r": 1, "a": 3, "b": 1, "c": 6},
    {"r": 1, "a": 2, "b": 2, "c": 1},
)

seq = optimal_single_sequence(forest)
print("optimal order:", seq, "harm:", schedule_harm(forest, list_schedule(forest, seq, 1)))

rho = rho_factors(forest)
for j in forest.jobs:
    print(f"rho({j}) = {rho[j]}  (own ratio {forest[j].weight}/{forest[j].ptime})")

# b on its own looks poor (1/2), but b together with c is worth 7/3
print("dispatch order:", dispatch_single(forest))

# brute force over every order agrees
best = min(schedule_harm(forest, list_schedule(forest, list(p), 1)) for p in permutations(forest.jobs))
print("best over all orders:", best)
