"""Repair-crew scheduling for damaged radial power distribution networks."""
from .network import (
    DamagedComponentGraph,
    Line,
    Network,
    NetworkError,
    Node,
    PrecedenceForest,
    build_precedence,
    contract,
    forest_from_network,
    format_network,
    parse_network,
)
from .schedule import (
    Schedule,
    energization_times,
    harm,
    infinite_crew_harm,
    list_schedule,
    node_energization,
    schedule_harm,
    trajectory,
)
from .single import dispatch_single, merge_groups, optimal_single_sequence, rho_factors
from .multi import baseline_eei, baseline_fe, conversion_schedule, convert, dispatch_multi
from .lp import LpError, lp_list_schedule, separation_oracle, solve_lp_relaxation
from .ilp import EnumerationCapError, IlpError, build_ilp, exact_enum, export_model
from .policies import POLICIES, run_policy
from .experiments import InstanceSpec, compare_trajectories, gen_instance, run_gap_study

__version__ = "0.1.0"
