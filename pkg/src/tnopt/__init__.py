"""Imaginary-time tensor-chain solvers for knapsack and n-step shortest path.

Amplitudes ``exp(±tau * objective)`` are threaded through a chain of sparse
transitions; variables are fixed one at a time by the argmax of their
projected amplitude vector.  Large ``tau`` concentrates the amplitude on the
optimum.
"""

from .chain import BandedTransition, ChainCache, ChainProblem, Solution, SparseTransition, backward_sweep, decimate, psi_vector, solve_chain
from .exceptions import CapExceeded, InstanceError, ModeMismatch, NoFeasible, Unreachable
from .knapsack import ItemClass, KnapsackChain, KnapsackInstance, OuterConstraint, expand_01, objective, solve_knapsack, suggest_tau
from .numerics import Amplitude, Mode, NumericReport
from .oracles import (
    ComparisonReport,
    brute_force_amplitudes,
    brute_force_path,
    dijkstra,
    dp_knapsack,
    greedy_knapsack,
    knapsack_relative_error,
    path_relative_error,
)
from .shortest_path import Graph, PathChain, PathProblem, path_cost, solve_path

__version__ = "0.1.0"

__all__ = [
    "Amplitude",
    "BandedTransition",
    "CapExceeded",
    "ChainCache",
    "ChainProblem",
    "ComparisonReport",
    "Graph",
    "InstanceError",
    "ItemClass",
    "KnapsackChain",
    "KnapsackInstance",
    "Mode",
    "ModeMismatch",
    "NoFeasible",
    "NumericReport",
    "OuterConstraint",
    "PathChain",
    "PathProblem",
    "Solution",
    "SparseTransition",
    "Unreachable",
    "backward_sweep",
    "brute_force_amplitudes",
    "brute_force_path",
    "decimate",
    "dijkstra",
    "dp_knapsack",
    "expand_01",
    "greedy_knapsack",
    "knapsack_relative_error",
    "objective",
    "path_cost",
    "path_relative_error",
    "psi_vector",
    "solve_chain",
    "solve_knapsack",
    "solve_path",
    "suggest_tau",
]
