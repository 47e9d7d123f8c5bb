"""Generalized minimum-bid-to-win feedback for video pod auctions."""

from .assignment import (AssignmentInstance, DualPoint, lattice_meet_join, pod_equivalent,
                         solve_assignment_dual, verify_lattice_and_extremes)
from .coalitional import NEG_INF, CoalitionalGame, FeedbackVector, value_bi, vcg_feedback
from .dynamics import DynamicsConfig, DynamicsTrace, Outcome, Policy, RandomTargets, efficiency_of, run, step
from .feedback import (bicore_constraints, bicore_feedback, bicore_membership_oracle, core_feedback,
                       in_bicore, in_core, is_valid)
from .generator import GeneratorParams, generate_instance
from .lp import LinearProgram, LpOutcome, LpStatus, leximin_max, solve_lp
from .model import (MICRO, AgentProfile, AgentStatus, Allocation, AuctionInstance, InstanceError, PodSpec,
                    make_instance, parse_instance, serialize_instance, zero_vcg_instance)
from .solver import SolveConstraints, SolveResult, brute_force_solve, classify_agents, solve_constrained

__version__ = "0.1.0"
