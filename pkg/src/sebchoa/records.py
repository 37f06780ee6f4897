from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class RunRecord:
    """Outcome of one (algorithm, problem, seed) run.

    `trace[t]` is the best fitness found after iteration t, with `trace[0]`
    taken after the initial population. For constrained problems fitness is
    the penalized value, and `objective`/`violation` describe the final best
    point. A failed cell carries `error` and an empty trace.
    """

    algorithm: str
    problem: str
    seed: int
    trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    best_position: Optional[np.ndarray] = None
    best_fitness: float = float("nan")
    evaluations_used: int = 0
    wall_time: float = 0.0
    objective: Optional[float] = None
    violation: Optional[float] = None
    run_index: int = 0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def feasible(self) -> bool:
        return self.violation is None or self.violation == 0.0

    @property
    def final_objective(self) -> float:
        return self.best_fitness if self.objective is None else self.objective
