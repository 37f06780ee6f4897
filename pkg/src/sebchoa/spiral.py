"""Spiral radius laws and the amplitude they lend the spiral exploitation step.

Eight laws are supported, six explicit and two implicit::

    archimedean   r = a*theta
    logarithmic   log10(r) = a*theta
    fermat        r**2 = a**2 * theta
    lituus        r**2 = a**2 / theta
    equiangular   ln(r) = a*theta
    random        r = u*theta, u ~ U[0, 1) drawn per evaluation
    hss1          r * ln(r) = a*theta,    r >= 1
    hss2          r**2 * ln(r) = a*theta, r >= 1
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .rng_chaos import RngStream

THETA_MAX = 4.0 * math.pi
THETA_MIN = 1e-3
IMPLICIT_TOL = 1e-12
IMPLICIT_MAX_ITER = 200
_NEWTON_SWITCH = 0.1


class SpiralKind(enum.Enum):
    ARCHIMEDEAN = "archimedean"
    LOGARITHMIC = "logarithmic"
    FERMAT = "fermat"
    LITUUS = "lituus"
    EQUIANGULAR = "equiangular"
    RANDOM = "random"
    HSS1 = "hss1"
    HSS2 = "hss2"

    @classmethod
    def parse(cls, name: "str | SpiralKind") -> "SpiralKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown spiral {name!r}; valid spirals: {valid}") from None

    @property
    def implicit(self) -> bool:
        return self in (SpiralKind.HSS1, SpiralKind.HSS2)

    @property
    def needs_positive_theta(self) -> bool:
        return self in (SpiralKind.LITUUS, SpiralKind.HSS1, SpiralKind.HSS2)

    @property
    def shrinks_with_theta(self) -> bool:
        return self is SpiralKind.LITUUS


@dataclass(frozen=True)
class Spiral:
    """A spiral law together with its slope `a`."""

    kind: SpiralKind
    slope: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SpiralKind.parse(self.kind))
        if not (math.isfinite(self.slope) and self.slope > 0):
            raise ValueError(f"spiral slope must be a positive finite number, got {self.slope!r}")


def _as_spiral(spiral: "Spiral | SpiralKind | str", slope: Optional[float] = None) -> Spiral:
    if isinstance(spiral, Spiral):
        return spiral if slope is None else Spiral(spiral.kind, slope)
    return Spiral(SpiralKind.parse(spiral), 1.0 if slope is None else slope)


def _check_theta(kind: SpiralKind, theta: np.ndarray) -> None:
    if not np.all(np.isfinite(theta)):
        raise ValueError(f"theta must be finite for spiral {kind.value}")
    if kind.needs_positive_theta:
        if np.any(theta <= 0):
            raise ValueError(f"spiral {kind.value} is undefined for theta <= 0")
    elif np.any(theta < 0):
        raise ValueError(f"spiral {kind.value} is undefined for theta < 0")


def _implicit_law(kind: SpiralKind, r):
    power = 1.0 if kind is SpiralKind.HSS1 else 2.0
    return r**power * np.log(r)


def _implicit_slope(kind: SpiralKind, r):
    # d/dr of r**p * ln r
    if kind is SpiralKind.HSS1:
        return np.log(r) + 1.0
    return r * (2.0 * np.log(r) + 1.0)


def solve_implicit_radius(
    kind: "SpiralKind | str",
    a: float,
    theta,
    tol: float = IMPLICIT_TOL,
    max_iter: int = IMPLICIT_MAX_ITER,
):
    """Solve r*ln(r) = a*theta (hss1) or r**2*ln(r) = a*theta (hss2) for r >= 1.

    Both left-hand sides vanish at r = 1 and increase strictly beyond it, so
    the root is bracketed by [1, hi] and bisection cannot fail. Once the
    bracket is narrow, Newton steps that stay inside it polish the tail. The
    residual target is `tol * max(1, a*theta)`: an absolute target below one
    ulp of the right-hand side cannot be met in double precision.

    Accepts a scalar or array `theta`; returns the same shape.
    """
    kind = SpiralKind.parse(kind)
    if not kind.implicit:
        raise ValueError(f"spiral {kind.value} has an explicit radius law")
    if not (a > 0 and math.isfinite(a)):
        raise ValueError(f"slope must be positive, got {a!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    scalar = np.ndim(theta) == 0
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    _check_theta(kind, theta)

    target = a * theta
    limit = tol * np.maximum(1.0, target)
    lo = np.ones_like(target)
    if kind is SpiralKind.HSS1:
        hi = np.maximum(math.e, target)
    else:
        hi = np.maximum(math.e, np.sqrt(target))

    # Bisection narrows the bracket; safeguarded Newton then takes over and
    # falls back to a bisection step whenever it would leave the bracket.
    r = 0.5 * (lo + hi)
    resid = _implicit_law(kind, r) - target
    for _ in range(max_iter):
        done = np.abs(resid) <= limit
        if done.all():
            break
        hi = np.where(resid > 0, r, hi)
        lo = np.where(resid < 0, r, lo)
        bisect = 0.5 * (lo + hi)
        newton = r - resid / _implicit_slope(kind, r)
        use = (hi - lo <= _NEWTON_SWITCH * hi) & (newton > lo) & (newton < hi)
        bisect = np.where(use, newton, bisect)
        r = np.where(done, r, bisect)
        resid = _implicit_law(kind, r) - target

    # One more Newton step: quadratic convergence takes the root itself to
    # near machine precision, not just the residual under the target.
    polished = np.clip(r - resid / _implicit_slope(kind, r), lo, hi)
    polished_resid = _implicit_law(kind, polished) - target
    better = np.abs(polished_resid) < np.abs(resid)
    r = np.where(better, polished, r)
    resid = np.where(better, polished_resid, resid)

    if np.any(np.abs(resid) > limit):
        worst = float(np.max(np.abs(resid) - limit))
        raise RuntimeError(f"implicit radius solve did not converge (excess residual {worst:.3e})")
    return float(r[0]) if scalar else r


def radii(spiral: "Spiral | SpiralKind | str", theta, rng: Optional[RngStream] = None, slope=None):
    """Vectorized `spiral_radius`: one radius per entry of `theta`."""
    spiral = _as_spiral(spiral, slope)
    kind, a = spiral.kind, spiral.slope
    theta = np.asarray(theta, dtype=float)
    _check_theta(kind, theta)
    if kind is SpiralKind.ARCHIMEDEAN:
        return a * theta
    if kind is SpiralKind.LOGARITHMIC:
        return 10.0 ** (a * theta)
    if kind is SpiralKind.FERMAT:
        return a * np.sqrt(theta)
    if kind is SpiralKind.LITUUS:
        return a / np.sqrt(theta)
    if kind is SpiralKind.EQUIANGULAR:
        return np.exp(a * theta)
    if kind is SpiralKind.RANDOM:
        if rng is None:
            raise ValueError("the random spiral needs an rng to draw its slope")
        return rng.uniform(theta.shape) * theta
    return solve_implicit_radius(kind, a, theta)


def spiral_radius(
    spiral: "Spiral | SpiralKind | str",
    theta: float,
    rng: Optional[RngStream] = None,
    slope: Optional[float] = None,
) -> float:
    """Radius of `spiral` at polar angle `theta`.

    >>> spiral_radius("archimedean", 2.0)
    2.0
    >>> round(spiral_radius("hss1", math.e), 12) == round(math.e, 12)
    True
    """
    return float(radii(spiral, float(theta), rng=rng, slope=slope))


def satisfies_law(spiral: Spiral, theta: float, r: float) -> float:
    """Residual of `r` against the defining law of `spiral` at `theta`.

    The residual is taken in the form the law is written, e.g. log10(r) - a*theta
    for the logarithmic spiral. Not defined for the random spiral.
    """
    a, kind = spiral.slope, spiral.kind
    if kind is SpiralKind.ARCHIMEDEAN:
        return r - a * theta
    if kind is SpiralKind.LOGARITHMIC:
        return math.log10(r) - a * theta
    if kind is SpiralKind.FERMAT:
        return r * r - a * a * theta
    if kind is SpiralKind.LITUUS:
        return r * r - a * a / theta
    if kind is SpiralKind.EQUIANGULAR:
        return math.log(r) - a * theta
    if kind.implicit:
        return float(_implicit_law(kind, r)) - a * theta
    raise ValueError("the random spiral has no deterministic law")


@dataclass(frozen=True)
class SpiralSample:
    theta: float
    radius: float
    modulus: float
    draw: float


@dataclass
class SpiralSchedule:
    """Maps search progress to the amplitude of the spiral step.

    Each sample draws `l ~ U[0, 1)` and sets the angle
    ``theta = theta_max * (1 - progress) * l + theta_min``, so the reachable
    angle range shrinks as the run proceeds. The radius is normalized by the
    largest radius the law attains on ``[theta_min, theta_max]`` and clamped to
    `m_max`. For the lituus spiral, whose radius falls as theta grows, the
    angle is mirrored onto ``theta_max + theta_min - theta`` so that, as for
    every other law, the walk along the spiral moves inward as progress grows.
    """

    spiral: Spiral
    theta_max: float = THETA_MAX
    theta_min: float = THETA_MIN
    m_max: float = 1.0
    r_ref: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.theta_min < self.theta_max):
            raise ValueError("need 0 < theta_min < theta_max")
        if not self.m_max > 0:
            raise ValueError("m_max must be positive")
        kind = self.spiral.kind
        if kind is SpiralKind.RANDOM:
            self.r_ref = self.theta_max
        elif kind.shrinks_with_theta:
            self.r_ref = spiral_radius(self.spiral, self.theta_min)
        else:
            self.r_ref = spiral_radius(self.spiral, self.theta_max)

    def angles(self, progress: float, draws: np.ndarray) -> np.ndarray:
        theta = self.theta_max * (1.0 - progress) * draws + self.theta_min
        if self.spiral.kind.shrinks_with_theta:
            theta = self.theta_max + self.theta_min - theta
        return theta

    def moduli(self, progress: float, draws: np.ndarray, rng: Optional[RngStream] = None):
        """Return (theta, radius, modulus) arrays for a batch of uniform draws."""
        if not 0.0 <= progress <= 1.0:
            raise ValueError(f"progress must lie in [0, 1], got {progress!r}")
        theta = self.angles(progress, np.asarray(draws, dtype=float))
        r = radii(self.spiral, theta, rng=rng)
        return theta, r, np.minimum(r / self.r_ref, self.m_max)

    def sample(self, progress: float, rng: RngStream) -> SpiralSample:
        l = rng.next_uniform()
        theta, r, m = self.moduli(progress, np.array([l]), rng)
        return SpiralSample(float(theta[0]), float(r[0]), float(m[0]), l)


def spiral_modulus(
    spiral: "Spiral | SpiralKind | str",
    progress: float,
    rng: RngStream,
    schedule: Optional[SpiralSchedule] = None,
) -> SpiralSample:
    """Draw one spiral amplitude M for the given run progress t/T."""
    if schedule is None:
        schedule = SpiralSchedule(_as_spiral(spiral))
    return schedule.sample(progress, rng)


def spiral_table(spiral: "Spiral | SpiralKind | str", thetas, rng: Optional[RngStream] = None):
    """List of (theta, radius) pairs over a grid of angles."""
    spiral = _as_spiral(spiral)
    thetas = np.asarray(list(thetas), dtype=float)
    if thetas.size == 0:
        raise ValueError("theta grid is empty")
    r = radii(spiral, thetas, rng=rng)
    return [(float(t), float(x)) for t, x in zip(thetas, r)]
