"""Benchmark problems: the classical 23-function suite and a name registry.

Every objective in the suite is written against the last axis of its input, so
a whole population can be evaluated with one call. F1-F13 scale with the
dimension (30 by default); F14-F23 have a fixed dimension.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .rng_chaos import RngStream

DEFAULT_DIMENSION = 30


class Category(enum.Enum):
    UNIMODAL = "unimodal"
    MULTIMODAL = "multimodal"
    FIXED_DIMENSION = "fixed-dimension"


@dataclass(frozen=True, eq=False)
class Problem:
    """A box-bounded minimization problem.

    `objective` maps a vector of length `dimension` to a float. When
    `vectorized` is set it must also accept an ``(n, dimension)`` array and
    return ``n`` values. A `noisy` problem adds one uniform [0, 1) draw per
    evaluation from the rng passed to `evaluate`; `objective` itself stays
    noise-free.
    """

    name: str
    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    objective: Callable
    category: Category = Category.UNIMODAL
    known_optimum: Optional[float] = None
    optimum_location: Optional[np.ndarray] = None
    title: str = ""
    noisy: bool = False
    vectorized: bool = False

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"{self.name}: dimension must be a positive integer")
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dimension,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dimension,)).copy()
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError(f"{self.name}: bounds must be finite")
        if np.any(lower >= upper):
            raise ValueError(f"{self.name}: every lower bound must be below its upper bound")
        lower.flags.writeable = upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "category", Category(self.category))
        if self.optimum_location is not None:
            loc = np.asarray(self.optimum_location, dtype=float)
            loc.flags.writeable = False
            object.__setattr__(self, "optimum_location", loc)

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return list(zip(self.lower.tolist(), self.upper.tolist()))

    @property
    def constrained(self) -> bool:
        return False

    def evaluate_batch(self, X: np.ndarray, rng: Optional[RngStream] = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dimension:
            raise ValueError(f"{self.name}: expected shape (n, {self.dimension}), got {X.shape}")
        if self.vectorized:
            values = np.asarray(self.objective(X), dtype=float).reshape(len(X))
        else:
            values = np.array([float(self.objective(x)) for x in X])
        if self.noisy:
            if rng is None:
                raise ValueError(f"{self.name} is noisy and needs an rng")
            values = values + rng.uniform(len(X))
        return values


def evaluate(problem: Problem, x, rng: Optional[RngStream] = None) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dimension,):
        raise ValueError(
            f"{problem.name}: expected a vector of length {problem.dimension}, got shape {x.shape}"
        )
    return float(problem.evaluate_batch(x[None, :], rng)[0])


# ---------------------------------------------------------------------------
# F1-F7: unimodal


def sphere(x):
    return np.sum(x**2, axis=-1)


def schwefel_2_22(x):
    a = np.abs(x)
    return np.sum(a, axis=-1) + np.prod(a, axis=-1)


def schwefel_1_2(x):
    return np.sum(np.cumsum(x, axis=-1) ** 2, axis=-1)


def schwefel_2_21(x):
    return np.max(np.abs(x), axis=-1)


def rosenbrock(x):
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head**2) ** 2 + (head - 1.0) ** 2, axis=-1)


def step(x):
    return np.sum(np.floor(x + 0.5) ** 2, axis=-1)


def quartic(x):
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(i * x**4, axis=-1)


# ---------------------------------------------------------------------------
# F8-F13: multimodal


def schwefel_2_26(x):
    return np.sum(-x * np.sin(np.sqrt(np.abs(x))), axis=-1)


def rastrigin(x):
    return np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def ackley(x):
    n = x.shape[-1]
    s1 = np.sqrt(np.sum(x**2, axis=-1) / n)
    s2 = np.sum(np.cos(2.0 * np.pi * x), axis=-1) / n
    return -20.0 * np.exp(-0.2 * s1) - np.exp(s2) + 20.0 + math.e


def griewank(x):
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(x**2, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1) + 1.0


def _u(x, a, k, m):
    return np.where(x > a, k * (x - a) ** m, np.where(x < -a, k * (-x - a) ** m, 0.0))


def penalized_1(x):
    n = x.shape[-1]
    y = 1.0 + (x + 1.0) / 4.0
    core = (
        10.0 * np.sin(np.pi * y[..., 0]) ** 2
        + np.sum((y[..., :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[..., 1:]) ** 2), axis=-1)
        + (y[..., -1] - 1.0) ** 2
    )
    return np.pi / n * core + np.sum(_u(x, 10.0, 100.0, 4), axis=-1)


def penalized_2(x):
    core = (
        np.sin(3.0 * np.pi * x[..., 0]) ** 2
        + np.sum((x[..., :-1] - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * x[..., 1:]) ** 2), axis=-1)
        + (x[..., -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * x[..., -1]) ** 2)
    )
    return 0.1 * core + np.sum(_u(x, 5.0, 100.0, 4), axis=-1)


# ---------------------------------------------------------------------------
# F14-F23: fixed dimension

_FOXHOLES = np.array(
    [
        [-32, -16, 0, 16, 32] * 5,
        [v for v in (-32, -16, 0, 16, 32) for _ in range(5)],
    ],
    dtype=float,
)

_KOWALIK_A = np.array(
    [0.1957, 0.1947, 0.1735, 0.16, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246]
)
_KOWALIK_B = 1.0 / np.array([0.25, 0.5, 1, 2, 4, 6, 8, 10, 12, 14, 16])

_HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN3_A = np.array([[3, 10, 30], [0.1, 10, 35], [3, 10, 30], [0.1, 10, 35]], dtype=float)
_HARTMANN3_P = np.array(
    [
        [0.3689, 0.1170, 0.2673],
        [0.4699, 0.4387, 0.7470],
        [0.1091, 0.8732, 0.5547],
        [0.03815, 0.5743, 0.8828],
    ]
)
_HARTMANN6_A = np.array(
    [
        [10, 3, 17, 3.5, 1.7, 8],
        [0.05, 10, 17, 0.1, 8, 14],
        [3, 3.5, 1.7, 10, 17, 8],
        [17, 8, 0.05, 10, 0.1, 14],
    ]
)
_HARTMANN6_P = np.array(
    [
        [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
        [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
        [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
        [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
    ]
)

_SHEKEL_A = np.array(
    [
        [4, 4, 4, 4],
        [1, 1, 1, 1],
        [8, 8, 8, 8],
        [6, 6, 6, 6],
        [3, 7, 3, 7],
        [2, 9, 2, 9],
        [5, 5, 3, 3],
        [8, 1, 8, 1],
        [6, 2, 6, 2],
        [7, 3.6, 7, 3.6],
    ],
    dtype=float,
)
_SHEKEL_C = np.array([0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5])


def shekel_foxholes(x):
    diff = x[..., :, None] - _FOXHOLES  # (..., 2, 25)
    j = np.arange(1, 26)
    inner = 1.0 / (j + np.sum(diff**6, axis=-2))
    return 1.0 / (1.0 / 500.0 + np.sum(inner, axis=-1))


def kowalik(x):
    x1, x2, x3, x4 = (x[..., i, None] for i in range(4))
    b = _KOWALIK_B
    model = x1 * (b**2 + b * x2) / (b**2 + b * x3 + x4)
    return np.sum((_KOWALIK_A - model) ** 2, axis=-1)


def six_hump_camel(x):
    x1, x2 = x[..., 0], x[..., 1]
    return 4 * x1**2 - 2.1 * x1**4 + x1**6 / 3 + x1 * x2 - 4 * x2**2 + 4 * x2**4


def branin(x):
    x1, x2 = x[..., 0], x[..., 1]
    return (
        (x2 - 5.1 / (4 * np.pi**2) * x1**2 + 5 / np.pi * x1 - 6) ** 2
        + 10 * (1 - 1 / (8 * np.pi)) * np.cos(x1)
        + 10
    )


def goldstein_price(x):
    x1, x2 = x[..., 0], x[..., 1]
    a = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1**2 - 14 * x2 + 6 * x1 * x2 + 3 * x2**2)
    b = 30 + (2 * x1 - 3 * x2) ** 2 * (
        18 - 32 * x1 + 12 * x1**2 + 48 * x2 - 36 * x1 * x2 + 27 * x2**2
    )
    return a * b


def _hartmann(x, A, P):
    inner = np.sum(A * (x[..., None, :] - P) ** 2, axis=-1)
    return -np.sum(_HARTMANN_ALPHA * np.exp(-inner), axis=-1)


def hartmann_3(x):
    return _hartmann(x, _HARTMANN3_A, _HARTMANN3_P)


def hartmann_6(x):
    return _hartmann(x, _HARTMANN6_A, _HARTMANN6_P)


def _shekel(x, m):
    diff = x[..., None, :] - _SHEKEL_A[:m]
    return -np.sum(1.0 / (np.sum(diff**2, axis=-1) + _SHEKEL_C[:m]), axis=-1)


def shekel_5(x):
    return _shekel(x, 5)


def shekel_7(x):
    return _shekel(x, 7)


def shekel_10(x):
    return _shekel(x, 10)


# ---------------------------------------------------------------------------
# Suite table. Optimum locations and values for F14-F23 were refined with a
# local optimizer from the textbook locations and are stored to full precision.

@dataclass(frozen=True)
class _Entry:
    name: str
    title: str
    objective: Callable
    category: Category
    low: object
    high: object
    optimum: float
    location: object  # callable of dimension, or a fixed vector
    dimension: Optional[int] = None  # None: scalable
    noisy: bool = False


_SUITE = (
    _Entry("F1", "Sphere", sphere, Category.UNIMODAL, -100, 100, 0.0, lambda d: np.zeros(d)),
    _Entry("F2", "Schwefel 2.22", schwefel_2_22, Category.UNIMODAL, -10, 10, 0.0, lambda d: np.zeros(d)),
    _Entry("F3", "Schwefel 1.2", schwefel_1_2, Category.UNIMODAL, -100, 100, 0.0, lambda d: np.zeros(d)),
    _Entry("F4", "Schwefel 2.21", schwefel_2_21, Category.UNIMODAL, -100, 100, 0.0, lambda d: np.zeros(d)),
    _Entry("F5", "Rosenbrock", rosenbrock, Category.UNIMODAL, -30, 30, 0.0, lambda d: np.ones(d)),
    _Entry("F6", "Step", step, Category.UNIMODAL, -100, 100, 0.0, lambda d: np.zeros(d)),
    _Entry("F7", "Quartic with noise", quartic, Category.UNIMODAL, -1.28, 1.28, 0.0,
           lambda d: np.zeros(d), noisy=True),
    _Entry("F8", "Schwefel 2.26", schwefel_2_26, Category.MULTIMODAL, -500, 500,
           -418.9828872724338, lambda d: np.full(d, 420.96874657644923)),
    _Entry("F9", "Rastrigin", rastrigin, Category.MULTIMODAL, -5.12, 5.12, 0.0, lambda d: np.zeros(d)),
    _Entry("F10", "Ackley", ackley, Category.MULTIMODAL, -32, 32, 0.0, lambda d: np.zeros(d)),
    _Entry("F11", "Griewank", griewank, Category.MULTIMODAL, -600, 600, 0.0, lambda d: np.zeros(d)),
    _Entry("F12", "Penalized 1", penalized_1, Category.MULTIMODAL, -50, 50, 0.0, lambda d: -np.ones(d)),
    _Entry("F13", "Penalized 2", penalized_2, Category.MULTIMODAL, -50, 50, 0.0, lambda d: np.ones(d)),
    _Entry("F14", "Shekel's Foxholes", shekel_foxholes, Category.FIXED_DIMENSION, -65.536, 65.536,
           0.9980038377944498, (-31.97833733176841, -31.97833860797579), dimension=2),
    _Entry("F15", "Kowalik", kowalik, Category.FIXED_DIMENSION, -5, 5,
           0.00030748598780560557,
           (0.19283345304275123, 0.1908362402759693, 0.12311729907602714, 0.13576599033984196),
           dimension=4),
    _Entry("F16", "Six-Hump Camel", six_hump_camel, Category.FIXED_DIMENSION, -5, 5,
           -1.0316284534898776, (0.08984201652927098, -0.7126564013807202), dimension=2),
    _Entry("F17", "Branin", branin, Category.FIXED_DIMENSION, (-5, 0), (10, 15),
           0.39788735772973816, (math.pi, 2.275), dimension=2),
    _Entry("F18", "Goldstein-Price", goldstein_price, Category.FIXED_DIMENSION, -2, 2,
           3.0, (0.0, -1.0), dimension=2),
    _Entry("F19", "Hartmann 3", hartmann_3, Category.FIXED_DIMENSION, 0, 1,
           -3.8627821478207554,
           (0.11461432786938144, 0.5556488498545934, 0.8525469529266695),
           dimension=3),
    _Entry("F20", "Hartmann 6", hartmann_6, Category.FIXED_DIMENSION, 0, 1,
           -3.322368011415515,
           (0.2016895128922905, 0.15001069323742897, 0.4768739767611768,
            0.2753324307839508, 0.31165161848739587, 0.6573005349989142), dimension=6),
    _Entry("F21", "Shekel 5", shekel_5, Category.FIXED_DIMENSION, 0, 10,
           -10.153199679058229,
           (4.000037152376549, 4.000133278657566, 4.000037151057555, 4.000133277090425),
           dimension=4),
    _Entry("F22", "Shekel 7", shekel_7, Category.FIXED_DIMENSION, 0, 10,
           -10.402940566818662,
           (4.000572914277084, 4.000689366040889, 3.9994897107938447, 3.9996061600067923),
           dimension=4),
    _Entry("F23", "Shekel 10", shekel_10, Category.FIXED_DIMENSION, 0, 10,
           -10.536409816692045,
           (4.000746530253313, 4.000592936779709, 3.9996633957714787, 3.9995097993299975),
           dimension=4),
)

SUITE_NAMES = tuple(e.name for e in _SUITE)


def _build(entry: _Entry, dimension: int) -> Problem:
    d = entry.dimension or dimension
    if callable(entry.location):
        location = entry.location(d)
    else:
        location = np.array(entry.location, dtype=float)
    optimum = entry.optimum * d if entry.name == "F8" else entry.optimum
    return Problem(
        name=entry.name,
        dimension=d,
        lower=entry.low,
        upper=entry.high,
        objective=entry.objective,
        category=entry.category,
        known_optimum=optimum,
        optimum_location=location,
        title=entry.title,
        noisy=entry.noisy,
        vectorized=True,
    )


def standard_problem(name: str, dimension: int = DEFAULT_DIMENSION) -> Problem:
    """One member of the suite by name ("F1".."F23"); `dimension` applies to F1-F13."""
    for entry in _SUITE:
        if entry.name.lower() == name.lower():
            return _build(entry, dimension)
    raise KeyError(f"unknown suite function {name!r}")


def standard_suite(dimension: int = DEFAULT_DIMENSION) -> list[Problem]:
    """F1-F23 in canonical order: 7 unimodal, 6 multimodal, 10 fixed-dimension."""
    if dimension < 2:
        raise ValueError("the scalable functions need dimension >= 2")
    return [_build(e, dimension) for e in _SUITE]


# ---------------------------------------------------------------------------


class DuplicateProblemError(ValueError):
    pass


@dataclass
class Registry:
    """Name -> problem lookup shared by the harness and the CLI."""

    _problems: dict = field(default_factory=dict)

    def register(self, problem) -> str:
        if problem.name in self._problems:
            raise DuplicateProblemError(f"a problem named {problem.name!r} is already registered")
        self._problems[problem.name] = problem
        return problem.name

    def get(self, name: str):
        try:
            return self._problems[name]
        except KeyError:
            raise KeyError(f"unknown problem {name!r}") from None

    def names(self) -> list[str]:
        return list(self._problems)

    def problems(self) -> list:
        return list(self._problems.values())

    def __contains__(self, name) -> bool:
        return name in self._problems

    def __len__(self) -> int:
        return len(self._problems)


def default_registry(dimension: int = DEFAULT_DIMENSION) -> Registry:
    """Registry holding the 23 standard functions and the 3 engineering problems."""
    from .constraints import engineering_suite

    reg = Registry()
    for problem in standard_suite(dimension):
        reg.register(problem)
    for problem in engineering_suite():
        reg.register(problem)
    return reg


_registry: Optional[Registry] = None


def registry() -> Registry:
    global _registry
    if _registry is None:
        _registry = default_registry()
    return _registry


def register(problem) -> str:
    """Add `problem` to the process-wide registry; duplicate names are rejected."""
    return registry().register(problem)


def category_of(problem) -> str:
    return "constrained" if problem.constrained else problem.category.value


def resolve(names: Iterable[str], dimension: int = DEFAULT_DIMENSION, reg: Optional[Registry] = None):
    """Expand names, `standard-suite` and `engineering-suite` into problems."""
    from .constraints import engineering_suite

    reg = reg or registry()
    out = []
    for name in names:
        key = name.strip()
        if key == "standard-suite":
            out.extend(standard_suite(dimension))
        elif key == "engineering-suite":
            out.extend(engineering_suite())
        elif key.upper() in SUITE_NAMES:
            out.append(standard_problem(key, dimension))
        elif key in reg:
            out.append(reg.get(key))
        else:
            raise KeyError(f"unknown problem {key!r}")
    return out
