"""Chimp optimization algorithm with spiral exploitation behavior.

Quick start::

    from sebchoa import optimize, make_config, standard_problem

    record = optimize(standard_problem("F1"), make_config("seb-hss1", seed=7))
    record.best_fitness
"""

__version__ = "0.1.0"

from .algorithms import VARIANTS, make_config, random_search, run_variant
from .choa import ChimpOptimizer, ChoaConfig, optimize
from .constraints import ConstrainedProblem, engineering_suite
from .harness import aggregate, export_csv, run_experiment, wilcoxon_rank_sum
from .problems import Problem, evaluate, register, standard_problem, standard_suite
from .records import RunRecord
from .rng_chaos import ChaoticMapKind, RngStream
from .spiral import Spiral, SpiralKind, spiral_modulus, spiral_radius

__all__ = [
    "VARIANTS", "make_config", "random_search", "run_variant",
    "ChimpOptimizer", "ChoaConfig", "optimize",
    "ConstrainedProblem", "engineering_suite",
    "aggregate", "export_csv", "run_experiment", "wilcoxon_rank_sum",
    "Problem", "evaluate", "register", "standard_problem", "standard_suite",
    "RunRecord", "ChaoticMapKind", "RngStream",
    "Spiral", "SpiralKind", "spiral_modulus", "spiral_radius",
]
