"""Exact RCPSP solving by A* over the reachability graph of a timed Petri net with resources."""

from .astar import Budget, SearchNode, SearchStats, SolveOutcome, expand_trace, extract_schedule, solve
from .heuristics import HeuristicKind, cached_child_h, h_cp, h_max, h_res
from .instance import Activity, CycleError, InstanceError, RcpspInstance, close_dummies, topological_order, validate_instance
from .net import TtpnrNet, build_net, enabled_transitions
from .oracle import Schedule, brute_force_optimum, random_instance, validate_schedule
from .psplib_io import parse_optima, parse_sm, read_sm, write_sm
from .state import FireResult, TimedState, canonical_key, fire, initial_state, is_goal

__version__ = "0.1.0"
