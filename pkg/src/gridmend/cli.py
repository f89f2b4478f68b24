"""``gridmend`` command line.

Exit codes: 0 success, 1 input error, 2 infeasible or enumeration cap
exceeded, 3 internal error.  Failures print one line to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from . import csvio
from .experiments import InstanceSpec, compare_trajectories, gen_instance, run_gap_study
from .ilp import DEFAULT_CAP, EnumerationCapError, IlpError, build_ilp, export_model, round_repair_times
from .lp import LpError, lp_list_schedule, solve_lp_relaxation
from .network import NetworkError, build_precedence, contract, format_network, parse_network
from .policies import POLICIES, run_policy
from .schedule import energization_times, node_energization, schedule_from_rows, schedule_harm, trajectory
from .single import merge_groups

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().strip()}")


def _read_network(path):
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def _emit(text: str, path: Optional[str], manifest: List[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        manifest.append(path)
    else:
        sys.stdout.write(text)


def _damage(value: str):
    if value == "all":
        return value
    if "." in value:
        return float(value)
    return int(value)


def cmd_schedule(args, manifest):
    net = _read_network(args.network)
    g = contract(net)
    forest = build_precedence(g)
    sched = run_policy(forest, args.crews, args.policy, args.cap)
    e = energization_times(forest, sched.completions())
    result = node_energization(net, g, e)
    _emit(csvio.schedule_csv(sched), args.out, manifest)
    if args.energization:
        _emit(csvio.energization_csv(result.node_energization), args.energization, manifest)
    if args.trajectory:
        _emit(csvio.trajectory_csv(trajectory(result, net.total_weight)), args.trajectory, manifest)
    print(f"harm,{csvio.num(result.harm)}")


def cmd_seq1(args, manifest):
    forest = build_precedence(contract(_read_network(args.network)))
    seq = merge_groups(forest).sequence
    sched = run_policy(forest, 1, "ca")
    out = ["position,job"] + [f"{k},{j}" for k, j in enumerate(seq, start=1)]
    _emit("\n".join(out) + "\n", args.out, manifest)
    print(f"harm,{csvio.num(schedule_harm(forest, sched))}")


def cmd_rho(args, manifest):
    forest = build_precedence(contract(_read_network(args.network)))
    _emit(csvio.rho_csv(merge_groups(forest).rho, list(forest.jobs)), args.out, manifest)


def cmd_lp(args, manifest):
    forest = build_precedence(contract(_read_network(args.network)))
    sol = solve_lp_relaxation(forest, args.crews, args.tol)
    out = ["job,energization,midpoint"]
    out += [f"{j},{csvio.num(sol.e[j])},{csvio.num(sol.midpoints[j])}" for j in forest.jobs]
    _emit("\n".join(out) + "\n", args.out, manifest)
    if args.dump_cuts:
        cuts = ["cut,size,jobs"] + [f"{k},{len(c)},{' '.join(c)}" for k, c in enumerate(sol.cuts, start=1)]
        _emit("\n".join(cuts) + "\n", args.dump_cuts, manifest)
    sched = lp_list_schedule(forest, args.crews, sol)
    print(f"objective,{csvio.num(sol.objective)}")
    print(f"list_schedule_harm,{csvio.num(schedule_harm(forest, sched))}")


def cmd_export_ilp(args, manifest):
    net = _read_network(args.network)
    if args.round:
        net = round_repair_times(net)
    model = build_ilp(net, args.crews, args.horizon)
    _emit(export_model(model), args.output, manifest)
    print(f"variables,{model.n_variables}")
    print(f"constraints,{len(model.rows)}")


def cmd_score_schedule(args, manifest):
    net = _read_network(args.network)
    g = contract(net)
    forest = build_precedence(g)
    with open(args.schedule, encoding="utf-8") as fh:
        rows = csvio.read_schedule_csv(fh.read())
    sched = schedule_from_rows(forest, rows, args.crews)
    result = node_energization(net, g, energization_times(forest, sched.completions()))
    if args.out:
        _emit(csvio.schedule_csv(sched), args.out, manifest)
    print(f"harm,{csvio.num(result.harm)}")


def _spec(args, seed=None):
    return InstanceSpec(args.topology, _damage(args.damage), args.perturb,
                        args.seed if seed is None else seed, args.crews)


def cmd_gen(args, manifest):
    _emit(format_network(gen_instance(_spec(args))), args.output, manifest)


def cmd_gap_study(args, manifest):
    policies = [p for p in args.policies.split(",") if p]
    report = run_gap_study(_spec(args), args.runs, policies, args.reference, args.cap, args.workers)
    _emit(report.to_csv(), args.output, manifest)
    if args.summary:
        _emit(report.summary_csv(), args.summary, manifest)
    else:
        sys.stderr.write(report.summary_csv()) if args.output is None else sys.stdout.write(report.summary_csv())


def cmd_compare(args, manifest):
    net = _read_network(args.network)
    policies = [p for p in args.policies.split(",") if p]
    comp = compare_trajectories(net, args.crews, policies)
    os.makedirs(args.out_dir, exist_ok=True)
    for policy, traj in comp.trajectories.items():
        _emit(csvio.trajectory_csv(traj), os.path.join(args.out_dir, f"trajectory_{policy}.csv"), manifest)
    fractions = comp.midpoint_fractions()
    out = ["policy,harm,makespan,fraction_at_midpoint"]
    out += [f"{p},{csvio.num(comp.harms[p])},{csvio.num(comp.makespans[p])},{csvio.num(fractions[p])}"
            for p in policies]
    _emit("\n".join(out) + "\n", os.path.join(args.out_dir, "summary.csv"), manifest)
    print(f"midpoint,{csvio.num(comp.midpoint)}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridmend", description="Post-disaster repair scheduling for radial distribution networks.")
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def net_cmd(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("network", help="network file")
        p.set_defaults(func=func)
        return p

    p = net_cmd("schedule", cmd_schedule, "schedule repairs with one policy")
    p.add_argument("--crews", type=int, default=1)
    p.add_argument("--policy", choices=POLICIES, default="ca")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="job limit for --policy enum")
    p.add_argument("--out", help="schedule CSV path (default: stdout)")
    p.add_argument("--energization", help="node energization CSV path")
    p.add_argument("--trajectory", help="trajectory CSV path")

    p = net_cmd("seq1", cmd_seq1, "optimal single-crew repair order")
    p.add_argument("--out")

    p = net_cmd("rho", cmd_rho, "rho-factor of every damaged line")
    p.add_argument("--out")

    p = net_cmd("lp", cmd_lp, "LP relaxation by cutting planes")
    p.add_argument("--crews", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--dump-cuts")
    p.add_argument("--out")

    p = net_cmd("export-ilp", cmd_export_ilp, "write the time-indexed ILP in LP format")
    p.add_argument("--crews", type=int, default=1)
    p.add_argument("--horizon", type=int)
    p.add_argument("--round", action="store_true", help="round repair times to integers first")
    p.add_argument("-o", "--output")

    p = net_cmd("score-schedule", cmd_score_schedule, "re-time a schedule CSV with the network's repair times")
    p.add_argument("schedule")
    p.add_argument("--crews", type=int)
    p.add_argument("--out")

    def inst_flags(p):
        p.add_argument("--topology", default="ieee13", help="ieee13, radial:<nodes> or a network file")
        p.add_argument("--damage", default="all", help="all, a line count or a fraction")
        p.add_argument("--perturb", action="store_true", help="add -0.1/0/+0.1 to repair times")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--crews", type=int, default=2)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    inst_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("gap-study", help="optimality gaps over many seeds")
    inst_flags(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--policies", default="ca,lp")
    p.add_argument("--reference", choices=("enum", "lp-bound"), default="enum")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--workers", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_gap_study)

    p = net_cmd("compare", cmd_compare, "restoration trajectories of several policies")
    p.add_argument("--crews", type=int, default=1)
    p.add_argument("--policies", default="dispatch,fe,eei")
    p.add_argument("--out-dir", default=".")
    return parser


def _config_defaults(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    manifest: List[str] = []
    try:
        if not argv:
            raise UsageError(parser.format_usage().strip())
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.config:
            defaults = _config_defaults(args.config)
            sub = parser._subparsers._group_actions[0].choices[args.command]
            known = {a.dest: a for a in sub._actions}
            for key, value in defaults.items():
                if key not in known:
                    raise UsageError(f"{args.config}: unknown setting {key!r}")
                action = known[key]
                if action.type is not None:
                    value = action.type(value)
                elif isinstance(action, argparse._StoreTrueAction):
                    value = value.lower() in ("1", "true", "yes", "on")
                sub.set_defaults(**{key: value})
            args = parser.parse_args(argv)
        args.func(args, manifest)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_INPUT
    except EnumerationCapError as exc:
        sys.stderr.write(f"gridmend: {exc}\n")
        return EXIT_INFEASIBLE
    except LpError as exc:
        sys.stderr.write(f"gridmend: {exc}\n")
        return EXIT_INFEASIBLE
    except (NetworkError, IlpError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"gridmend: {exc}\n")
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - last-resort guard
        sys.stderr.write(f"gridmend: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    for path in manifest:
        print(f"wrote,{path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
