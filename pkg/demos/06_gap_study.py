"""
How far from optimal are the fast policies?
===========================================

Random damage on the 13-node feeder, seven broken lines, two crews.  Each
policy's harm is compared with the exact optimum found by enumeration.
"""

import sys

from gridmend import InstanceSpec, run_gap_study

runs = int(sys.argv[1]) if len(sys.argv) > 1 else 200
report = run_gap_study(InstanceSpec(topology="ieee13", damage=7, crews=2), runs, ("ca", "lp", "fe", "eei"))
print(report.summary_csv())

for policy in report.policies():
    gaps = report.gaps(policy)
    counts = [((gaps >= lo) & (gaps < hi)).sum() for lo, hi in [(0, 0.01), (0.01, 0.05), (0.05, 0.1), (0.1, 10)]]
    print(f"{policy:4s} <1%: {counts[0]:4d}  1-5%: {counts[1]:4d}  5-10%: {counts[2]:4d}  >10%: {counts[3]:4d}")
