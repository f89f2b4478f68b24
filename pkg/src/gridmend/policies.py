"""Name-based access to every scheduling policy."""
from __future__ import annotations

from .ilp import DEFAULT_CAP, exact_enum
from .lp import lp_list_schedule
from .multi import baseline_eei, baseline_fe, conversion_schedule, dispatch_multi
from .network import PrecedenceForest
from .schedule import Schedule

POLICIES = ("ca", "dispatch", "fe", "eei", "lp", "enum")


def run_policy(forest: PrecedenceForest, m: int, policy: str, cap: int = DEFAULT_CAP) -> Schedule:
    if policy == "ca":
        return conversion_schedule(forest, m)
    if policy == "dispatch":
        return dispatch_multi(forest, m=m)
    if policy == "fe":
        return baseline_fe(forest, m)
    if policy == "eei":
        return baseline_eei(forest, m)
    if policy == "lp":
        return lp_list_schedule(forest, m)
    if policy == "enum":
        return exact_enum(forest, m, cap).schedule
    raise ValueError(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")
