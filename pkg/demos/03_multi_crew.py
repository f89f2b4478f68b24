"""
Several crews: conversion, rho dispatch and utility baselines
=============================================================

The single-crew order can be handed to m crews as a priority list.  Dispatching
by rho-factor gives exactly the same schedule.  Two rules of thumb used by
utilities, most-load-first and most-load-per-hour, are shown for contrast.
"""

from gridmend import InstanceSpec, gen_instance, forest_from_network
from gridmend.ilp import exact_enum
from gridmend.multi import baseline_eei, baseline_fe, conversion_schedule, dispatch_multi
from gridmend.schedule import schedule_harm

net = gen_instance(InstanceSpec(topology="ieee13", damage=7, seed=42))
forest = forest_from_network(net)
m = 2

ca = conversion_schedule(forest, m)
rho = dispatch_multi(forest, m=m)
print("conversion equals rho dispatch:", ca.starts() == rho.starts())

opt = exact_enum(forest, m).harm
for name, sched in [("conversion", ca), ("most load first", baseline_fe(forest, m)),
                    ("load per hour", baseline_eei(forest, m))]:
    h = schedule_harm(forest, sched)
    print(f"{name:16s} harm {h:9.3f}  gap {h / opt - 1:6.2%}  makespan {sched.makespan}")

for a in ca.assignments():
    print(f"  crew {a.crew}: {a.job:8s} {a.start:5.1f} -> {a.completion:5.1f}")
