"""Named algorithm variants and the random-search baseline."""

from __future__ import annotations

import dataclasses
import time

import numpy as np

from .choa import ChoaConfig, optimize
from .records import RunRecord
from .rng_chaos import RngStream
from .spiral import Spiral, SpiralKind

RANDOM_SEARCH = "random-search"
SEB_VARIANTS = tuple(f"seb-{k.value}" for k in SpiralKind)
VARIANTS = ("choa",) + SEB_VARIANTS + (RANDOM_SEARCH,)


def check_variant(name: str) -> str:
    if name not in VARIANTS:
        seb = ", ".join(SEB_VARIANTS)
        raise ValueError(
            f"unknown algorithm {name!r}; valid variants: choa, {seb}, {RANDOM_SEARCH}"
        )
    return name


def make_config(name: str, slope: float = 1.0, **overrides) -> ChoaConfig:
    """ChoaConfig for a named variant, with field overrides applied."""
    check_variant(name)
    spiral = None
    if name.startswith("seb-"):
        spiral = Spiral(SpiralKind.parse(name[4:]), slope)
    return ChoaConfig(spiral=spiral, **overrides)


def random_search(problem, config: ChoaConfig, algorithm: str = RANDOM_SEARCH) -> RunRecord:
    """Uniform sampling of the box with the same budget as a ChOA run.

    One batch of `population_size` points stands in for each iteration, so the
    trace and evaluation count line up with `optimize`.
    """
    start = time.perf_counter()
    rng = RngStream(config.seed)
    noise = rng.spawn("noise")
    lower = np.asarray(problem.lower, dtype=float)
    upper = np.asarray(problem.upper, dtype=float)
    if np.any(upper <= lower):
        raise ValueError(f"{problem.name}: the search box has zero volume")
    n, dim = config.population_size, problem.dimension

    best_x, best_f = None, np.inf
    trace = []
    for _ in range(config.max_iterations + 1):
        X = lower + (upper - lower) * rng.uniform((n, dim))
        fit = np.asarray(problem.evaluate_batch(X, noise), dtype=float)
        i = int(np.argmin(fit))
        if fit[i] < best_f:
            best_f, best_x = float(fit[i]), X[i].copy()
        trace.append(best_f)

    record = RunRecord(
        algorithm=algorithm,
        problem=problem.name,
        seed=config.seed,
        trace=np.array(trace),
        best_position=best_x,
        best_fitness=best_f,
        evaluations_used=n * (config.max_iterations + 1),
        wall_time=time.perf_counter() - start,
    )
    if getattr(problem, "constrained", False):
        record.objective, record.violation = problem.describe(best_x)
    return record


def run_variant(name: str, problem, config: ChoaConfig) -> RunRecord:
    """Run the named variant; `config.spiral` is overridden to match the name."""
    check_variant(name)
    if name == RANDOM_SEARCH:
        return random_search(problem, config)
    if name == "choa":
        config = dataclasses.replace(config, spiral=None)
    else:
        slope = config.spiral.slope if config.spiral is not None else 1.0
        config = dataclasses.replace(config, spiral=Spiral(SpiralKind.parse(name[4:]), slope))
    return optimize(problem, config, algorithm=name)
