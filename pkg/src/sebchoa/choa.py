"""Chimp optimization algorithm with optional spiral exploitation.

Each iteration every chimp is steered by the four best solutions found so far
(attacker, barrier, chaser, driver). For role k the chimp computes

    d_k = |c_k * x_k - m_k * x|
    y_k = x_k - a_k * d_k

and its candidate position is the mean of y_1..y_4. A per-chimp draw lambda
then picks between that candidate (lambda < threshold) and an exploitation
move around the prey (the attacker):

* baseline ChOA: chaotic replacement  ``prey - m' * (prey - x)``
* SEB-ChOA:      spiral move          ``prey + (prey - x) * M * cos(2 pi l)``

where M is the spiral amplitude for the current progress and l the uniform
draw that also set the spiral angle.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .records import RunRecord
from .rng_chaos import ChaoticMap, ChaoticMapKind, RngStream

F_START = 2.5
N_ROLES = 4
ROLE_NAMES = ("attacker", "barrier", "chaser", "driver")


class FSchedule(enum.Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"


@dataclass
class ChoaConfig:
    population_size: int = 30
    max_iterations: int = 500
    spiral: Optional[object] = None  # spiral.Spiral; None runs baseline ChOA
    chaotic_map: ChaoticMapKind = ChaoticMapKind.LOGISTIC
    seed: int = 0
    lambda_threshold: float = 0.5
    f_schedule: FSchedule = FSchedule.LINEAR
    f_exponent: float = 2.0
    theta_max: float = 4.0 * math.pi
    theta_min: float = 1e-3
    m_max: float = 1.0

    def __post_init__(self):
        self.chaotic_map = ChaoticMapKind.parse(self.chaotic_map)
        self.f_schedule = FSchedule(self.f_schedule)
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if not 0.0 <= self.lambda_threshold <= 1.0:
            raise ValueError("lambda_threshold must lie in [0, 1]")
        if not self.f_exponent > 0:
            raise ValueError("f_exponent must be positive")


def compute_f(t: int, T: int, schedule: "FSchedule | str" = FSchedule.LINEAR, exponent: float = 2.0) -> float:
    """Control value shrinking from 2.5 at t=0 to 0 at t=T."""
    if T < 1 or not 0 <= t <= T:
        raise ValueError(f"need 0 <= t <= T and T >= 1, got t={t}, T={T}")
    frac = t / T
    if FSchedule(schedule) is FSchedule.NONLINEAR:
        frac = frac**exponent
    return F_START * (1.0 - frac)


@dataclass
class Coefficients:
    f: float
    a: np.ndarray
    c: np.ndarray
    m: np.ndarray


def compute_coefficients(f: float, rng: RngStream, chaos: ChaoticMap) -> Coefficients:
    """Fresh a, c, m arrays shaped like the chaotic state (one entry per draw)."""
    shape = chaos.state.shape
    r1 = rng.uniform(shape)
    r2 = rng.uniform(shape)
    return Coefficients(f=f, a=2.0 * f * r1 - f, c=2.0 * r2, m=chaos.next())


def role_based_position(x, role_positions, coeffs: Coefficients) -> np.ndarray:
    """Average of the four role-guided positions.

    `x` is one chimp (D,) or a population (N, D); `role_positions` is (4, D).
    Coefficient arrays broadcast against ``(4,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    roles = np.asarray(role_positions, dtype=float)
    roles = roles.reshape((N_ROLES,) + (1,) * (x.ndim - 1) + (roles.shape[-1],))
    d = np.abs(coeffs.c * roles - coeffs.m * x)
    return np.mean(roles - coeffs.a * d, axis=0)


def spiral_move(x, prey, modulus, draw):
    """Spiral step around the prey; `modulus` and `draw` are per chimp."""
    x = np.asarray(x, dtype=float)
    prey = np.asarray(prey, dtype=float)
    amp = np.asarray(modulus, dtype=float) * np.cos(2.0 * np.pi * np.asarray(draw, dtype=float))
    if x.ndim == 2:
        amp = amp[:, None]
    return (prey - x) * amp + prey


def seb_update(x, x_prey, coefficients: Coefficients, lambda_draw: float, M: float, l: float,
               threshold: float = 0.5) -> np.ndarray:
    """Piecewise single-chimp update: encircle the prey below `threshold`, spiral above."""
    x = np.asarray(x, dtype=float)
    x_prey = np.asarray(x_prey, dtype=float)
    if lambda_draw < threshold:
        d = np.abs(coefficients.c * x_prey - coefficients.m * x)
        return x_prey - coefficients.a * d
    return spiral_move(x, x_prey, M, l)


@dataclass
class Population:
    positions: np.ndarray
    fitness: np.ndarray
    evaluations_used: int = 0


@dataclass
class Roles:
    """The four best solutions, best first."""

    positions: np.ndarray  # (4, D)
    fitness: np.ndarray  # (4,)

    attacker = property(lambda self: (self.positions[0], float(self.fitness[0])))
    barrier = property(lambda self: (self.positions[1], float(self.fitness[1])))
    chaser = property(lambda self: (self.positions[2], float(self.fitness[2])))
    driver = property(lambda self: (self.positions[3], float(self.fitness[3])))

    @property
    def prey(self) -> np.ndarray:
        return self.positions[0]

    @classmethod
    def select(cls, positions: np.ndarray, fitness: np.ndarray) -> "Roles":
        """Pick the four best distinct candidates; a stable sort breaks ties by index.

        Duplicates only fill in when fewer than four distinct points exist.
        """
        order = np.argsort(fitness, kind="stable")
        chosen: list[int] = []
        for i in order:
            if not any(np.array_equal(positions[i], positions[j]) for j in chosen):
                chosen.append(int(i))
                if len(chosen) == N_ROLES:
                    break
        for i in order:
            if len(chosen) == N_ROLES:
                break
            if int(i) not in chosen:
                chosen.append(int(i))
        while len(chosen) < N_ROLES:
            chosen.append(chosen[-1])
        idx = np.array(chosen)
        return cls(positions[idx].copy(), fitness[idx].copy())


def _check_box(problem) -> None:
    lower, upper = np.asarray(problem.lower), np.asarray(problem.upper)
    if lower.shape != (problem.dimension,) or upper.shape != (problem.dimension,):
        raise ValueError(f"{problem.name}: bounds do not match the dimension")
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError(f"{problem.name}: bounds must be finite")
    if np.any(upper <= lower):
        raise ValueError(f"{problem.name}: the search box has zero volume")


class ChimpOptimizer:
    """Stateful ChOA / SEB-ChOA run on one problem.

    Random streams: the run stream (seeded by ``config.seed``) feeds the
    initial population and every uniform draw of the update; the chaotic maps
    and objective noise use streams derived from it.
    """

    def __init__(self, problem, config: ChoaConfig):
        _check_box(problem)
        self.problem = problem
        self.config = config
        self.rng = RngStream(config.seed)
        self._noise_rng = self.rng.spawn("noise")
        n, dim = config.population_size, problem.dimension
        self._lower = np.asarray(problem.lower, dtype=float)
        self._upper = np.asarray(problem.upper, dtype=float)

        self._role_chaos = ChaoticMap(config.chaotic_map, (N_ROLES, n, dim), self.rng.spawn("chaos"))
        self._schedule = None
        self._replace_chaos = None
        if config.spiral is None:
            self._replace_chaos = ChaoticMap(config.chaotic_map, (n, dim), self.rng.spawn("replace"))
        else:
            from .spiral import SpiralSchedule

            self._schedule = SpiralSchedule(
                config.spiral, theta_max=config.theta_max, theta_min=config.theta_min, m_max=config.m_max
            )

        X = self._lower + (self._upper - self._lower) * self.rng.uniform((n, dim))
        fit = self._evaluate(X)
        self.population = Population(X, fit, evaluations_used=n)
        self.roles = Roles.select(X, fit)
        self.t = 0
        self.trace = [float(self.roles.fitness[0])]
        self.spiral_fired = 0

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.problem.evaluate_batch(X, self._noise_rng), dtype=float)

    def step(self) -> Population:
        """Advance one iteration and return the new population."""
        cfg = self.config
        T = cfg.max_iterations
        if self.t >= T:
            raise RuntimeError("iteration budget exhausted")
        X = self.population.positions
        n = len(X)
        prey = self.roles.prey

        f = compute_f(self.t, T, cfg.f_schedule, cfg.f_exponent)
        coeffs = compute_coefficients(f, self.rng, self._role_chaos)
        guided = role_based_position(X, self.roles.positions, coeffs)

        exploit = self.rng.uniform(n) >= cfg.lambda_threshold
        if self._schedule is None:
            m = self._replace_chaos.next()
            alternative = prey - m * (prey - X)
        else:
            draws = self.rng.uniform(n)
            _, _, modulus = self._schedule.moduli(self.t / T, draws, self.rng)
            alternative = spiral_move(X, prey, modulus, draws)
            self.spiral_fired += int(exploit.sum())

        new = np.where(exploit[:, None], alternative, guided)
        new = np.clip(new, self._lower, self._upper)
        fit = self._evaluate(new)

        self.population = Population(new, fit, self.population.evaluations_used + n)
        self.roles = Roles.select(
            np.concatenate([new, self.roles.positions]), np.concatenate([fit, self.roles.fitness])
        )
        self.t += 1
        self.trace.append(float(self.roles.fitness[0]))
        return self.population

    def run(self, algorithm: str = "") -> RunRecord:
        start = time.perf_counter()
        while self.t < self.config.max_iterations:
            self.step()
        best = self.roles.prey.copy()
        record = RunRecord(
            algorithm=algorithm or variant_name(self.config),
            problem=self.problem.name,
            seed=self.config.seed,
            trace=np.array(self.trace),
            best_position=best,
            best_fitness=float(self.roles.fitness[0]),
            evaluations_used=self.population.evaluations_used,
            wall_time=time.perf_counter() - start,
        )
        if getattr(self.problem, "constrained", False):
            record.objective, record.violation = self.problem.describe(best)
        return record


def variant_name(config: ChoaConfig) -> str:
    if config.spiral is None:
        return "choa"
    return f"seb-{config.spiral.kind.value}"


def optimize(problem, config: ChoaConfig, algorithm: str = "") -> RunRecord:
    """Run ChOA (or SEB-ChOA when ``config.spiral`` is set) to its iteration budget."""
    return ChimpOptimizer(problem, config).run(algorithm)
