"""CSV writers and readers for schedules, energization times, trajectories and LP output.

Numbers are written with 9 significant digits.
"""
from __future__ import annotations

import csv
import io
from typing import List, Mapping, Tuple

from .network import id_key
from .schedule import Schedule, Trajectory


def num(x) -> str:
    return f"{float(x):.9g}"


def schedule_csv(schedule: Schedule) -> str:
    out = ["crew,job,start,completion"]
    for crew in schedule.crews:
        out += [f"{a.crew},{a.job},{num(a.start)},{num(a.completion)}" for a in crew]
    return "\n".join(out) + "\n"


def read_schedule_csv(text: str) -> List[Tuple[int, str, float]]:
    """(crew, job, start) rows; the completion column is ignored."""
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    missing = {"crew", "job", "start"} - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"schedule CSV lacks columns: {', '.join(sorted(missing))}")
    for rec in reader:
        rows.append((int(rec["crew"]), rec["job"].strip(), float(rec["start"])))
    return rows


def energization_csv(e_nodes: Mapping[str, float]) -> str:
    out = ["node,energization_time"]
    out += [f"{n},{num(t)}" for n, t in sorted(e_nodes.items(), key=lambda kv: id_key(kv[0]))]
    return "\n".join(out) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    out = ["time,restored_weight,fraction"]
    out += [f"{num(b.time)},{num(b.restored_weight)},{num(b.fraction)}" for b in traj]
    return "\n".join(out) + "\n"


def rho_csv(rho: Mapping[str, object], order=None) -> str:
    out = ["job,rho"]
    for j in order or sorted(rho, key=id_key):
        out.append(f"{j},{num(rho[j])}")
    return "\n".join(out) + "\n"
