"""Static-penalty constraint handling and three engineering design problems.

A constrained problem is minimized through its penalized fitness

    objective(x) + rho * violation(x)
    violation(x) = sum_i max(0, g_i(x)) + sum_j max(0, |h_j(x)| - eps)

which equals the raw objective on the feasible set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .problems import Category, Problem
from .rng_chaos import RngStream

DEFAULT_PENALTY = 1e6
DEFAULT_EQUALITY_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class ConstrainedProblem:
    """A `Problem` plus inequality (g(x) <= 0) and equality (h(x) = 0) constraints.

    Constraint callables follow the base objective's convention: with a
    vectorized base they receive an ``(n, D)`` array and return ``n`` values.
    """

    base: Problem
    inequality_constraints: Sequence[Callable] = ()
    equality_constraints: Sequence[Callable] = ()
    equality_tol: float = DEFAULT_EQUALITY_TOL
    penalty_coefficient: float = DEFAULT_PENALTY
    best_known: Optional[float] = None

    def __post_init__(self):
        if not self.penalty_coefficient > 0:
            raise ValueError("penalty coefficient must be positive")
        if not self.equality_tol >= 0:
            raise ValueError("equality tolerance must be nonnegative")
        object.__setattr__(self, "inequality_constraints", tuple(self.inequality_constraints))
        object.__setattr__(self, "equality_constraints", tuple(self.equality_constraints))

    # Problem-like surface used by the optimizers and the harness.
    name = property(lambda self: self.base.name)
    title = property(lambda self: self.base.title)
    dimension = property(lambda self: self.base.dimension)
    lower = property(lambda self: self.base.lower)
    upper = property(lambda self: self.base.upper)
    bounds = property(lambda self: self.base.bounds)
    category = property(lambda self: self.base.category)
    known_optimum = property(lambda self: self.best_known)
    constrained = True

    def _apply(self, fns, X):
        if not fns:
            return np.zeros((0, len(X)))
        if self.base.vectorized:
            return np.array([np.asarray(g(X), dtype=float).reshape(len(X)) for g in fns])
        return np.array([[float(g(x)) for x in X] for g in fns])

    def violation_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        g = self._apply(self.inequality_constraints, X)
        h = self._apply(self.equality_constraints, X)
        total = np.sum(np.maximum(0.0, g), axis=0)
        if len(h):
            total = total + np.sum(np.maximum(0.0, np.abs(h) - self.equality_tol), axis=0)
        return total

    def objective_batch(self, X: np.ndarray, rng: Optional[RngStream] = None) -> np.ndarray:
        return self.base.evaluate_batch(np.atleast_2d(X), rng)

    def evaluate_batch(self, X: np.ndarray, rng: Optional[RngStream] = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        raw = self.objective_batch(X, rng)
        v = self.violation_batch(X)
        # Adding an exact 0.0 keeps feasible values bit-identical.
        return np.where(v > 0, raw + self.penalty_coefficient * v, raw)

    def describe(self, x) -> tuple[float, float]:
        """(raw objective, violation) at a single point."""
        x = np.asarray(x, dtype=float)[None, :]
        return float(self.objective_batch(x)[0]), float(self.violation_batch(x)[0])


def violation(problem: ConstrainedProblem, x) -> float:
    return float(problem.violation_batch(np.asarray(x, dtype=float)[None, :])[0])


def penalized_fitness(problem: ConstrainedProblem, x) -> float:
    return float(problem.evaluate_batch(np.asarray(x, dtype=float)[None, :])[0])


# ---------------------------------------------------------------------------
# Tension/compression spring: x = (wire diameter d, coil diameter D, active coils N).


def spring_weight(x):
    d, D, N = x[..., 0], x[..., 1], x[..., 2]
    return (N + 2.0) * D * d**2


def _spring_g1(x):
    d, D, N = x[..., 0], x[..., 1], x[..., 2]
    return 1.0 - D**3 * N / (71785.0 * d**4)


def _spring_g2(x):
    d, D = x[..., 0], x[..., 1]
    return (4.0 * D**2 - d * D) / (12566.0 * (D * d**3 - d**4)) + 1.0 / (5108.0 * d**2) - 1.0


def _spring_g3(x):
    d, D, N = x[..., 0], x[..., 1], x[..., 2]
    return 1.0 - 140.45 * d / (D**2 * N)


def _spring_g4(x):
    d, D = x[..., 0], x[..., 1]
    return (d + D) / 1.5 - 1.0


def spring_design() -> ConstrainedProblem:
    base = Problem(
        name="spring",
        title="Tension/compression spring design",
        dimension=3,
        lower=(0.05, 0.25, 2.0),
        upper=(2.0, 1.3, 15.0),
        objective=spring_weight,
        category=Category.MULTIMODAL,
        vectorized=True,
    )
    return ConstrainedProblem(
        base, (_spring_g1, _spring_g2, _spring_g3, _spring_g4), best_known=0.012665232788
    )


# ---------------------------------------------------------------------------
# Pressure vessel: x = (shell thickness Ts, head thickness Th, radius R, length L).
# Thicknesses are treated as continuous.


def vessel_cost(x):
    ts, th, r, l = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    return 0.6224 * ts * r * l + 1.7781 * th * r**2 + 3.1661 * ts**2 * l + 19.84 * ts**2 * r


def _vessel_g1(x):
    return -x[..., 0] + 0.0193 * x[..., 2]


def _vessel_g2(x):
    return -x[..., 1] + 0.00954 * x[..., 2]


def _vessel_g3(x):
    r, l = x[..., 2], x[..., 3]
    return -math.pi * r**2 * l - 4.0 / 3.0 * math.pi * r**3 + 1296000.0


def _vessel_g4(x):
    return x[..., 3] - 240.0


def pressure_vessel_design() -> ConstrainedProblem:
    base = Problem(
        name="pressure-vessel",
        title="Pressure vessel design",
        dimension=4,
        lower=(0.0, 0.0, 10.0, 10.0),
        upper=(99.0, 99.0, 200.0, 200.0),
        objective=vessel_cost,
        category=Category.MULTIMODAL,
        vectorized=True,
    )
    return ConstrainedProblem(
        base, (_vessel_g1, _vessel_g2, _vessel_g3, _vessel_g4), best_known=5885.3327736
    )


# ---------------------------------------------------------------------------
# Welded beam: x = (weld thickness h, weld length l, bar height t, bar thickness b).

_P, _L, _E, _G = 6000.0, 14.0, 30e6, 12e6
_TAU_MAX, _SIGMA_MAX, _DELTA_MAX = 13600.0, 30000.0, 0.25


def beam_cost(x):
    h, l, t, b = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    return 1.10471 * h**2 * l + 0.04811 * t * b * (14.0 + l)


def _shear_stress(x):
    h, l, t = x[..., 0], x[..., 1], x[..., 2]
    tau1 = _P / (math.sqrt(2.0) * h * l)
    moment = _P * (_L + l / 2.0)
    radius = np.sqrt(l**2 / 4.0 + ((h + t) / 2.0) ** 2)
    inertia = 2.0 * (math.sqrt(2.0) * h * l * (l**2 / 12.0 + ((h + t) / 2.0) ** 2))
    tau2 = moment * radius / inertia
    return np.sqrt(tau1**2 + 2.0 * tau1 * tau2 * l / (2.0 * radius) + tau2**2)


def _buckling_load(x):
    t, b = x[..., 2], x[..., 3]
    return (
        4.013 * _E * np.sqrt(t**2 * b**6 / 36.0) / _L**2
        * (1.0 - t / (2.0 * _L) * math.sqrt(_E / (4.0 * _G)))
    )


def _beam_g1(x):
    return _shear_stress(x) - _TAU_MAX


def _beam_g2(x):
    t, b = x[..., 2], x[..., 3]
    return 6.0 * _P * _L / (b * t**2) - _SIGMA_MAX


def _beam_g3(x):
    return x[..., 0] - x[..., 3]


def _beam_g4(x):
    h, l, t, b = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    return 0.10471 * h**2 + 0.04811 * t * b * (14.0 + l) - 5.0


def _beam_g5(x):
    return 0.125 - x[..., 0]


def _beam_g6(x):
    t, b = x[..., 2], x[..., 3]
    return 4.0 * _P * _L**3 / (_E * t**3 * b) - _DELTA_MAX


def _beam_g7(x):
    return _P - _buckling_load(x)


def welded_beam_design() -> ConstrainedProblem:
    base = Problem(
        name="welded-beam",
        title="Welded beam design",
        dimension=4,
        lower=(0.1, 0.1, 0.1, 0.1),
        upper=(2.0, 10.0, 10.0, 2.0),
        objective=beam_cost,
        category=Category.MULTIMODAL,
        vectorized=True,
    )
    return ConstrainedProblem(
        base,
        (_beam_g1, _beam_g2, _beam_g3, _beam_g4, _beam_g5, _beam_g6, _beam_g7),
        best_known=1.724852,
    )


def engineering_suite() -> list[ConstrainedProblem]:
    return [spring_design(), pressure_vessel_design(), welded_beam_design()]
