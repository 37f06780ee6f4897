import numpy as np
import pytest

import sebchoa.spiral as spiral_mod
from sebchoa.algorithms import make_config
from sebchoa.choa import (
    ChimpOptimizer,
    ChoaConfig,
    Coefficients,
    Roles,
    compute_coefficients,
    compute_f,
    optimize,
    role_based_position,
    seb_update,
)
from sebchoa.problems import Problem, standard_problem
from sebchoa.rng_chaos import ChaoticMap, RngStream


def sphere(dim=2, bound=5.0):
    return Problem("sphere", dim, -bound, bound, lambda x: np.sum(np.asarray(x) ** 2, axis=-1),
                   vectorized=True)


# -- compute_f ------------------------------------------------------------------


def test_f_endpoints_exact():
    assert compute_f(0, 500) == 2.5
    assert compute_f(500, 500) == 0.0


def test_f_nonlinear_midpoint():
    assert compute_f(250, 500, "nonlinear", 2.0) == pytest.approx(1.875, abs=1e-15)


@pytest.mark.parametrize("schedule", ["linear", "nonlinear"])
def test_f_nonincreasing(schedule):
    vals = [compute_f(t, 97, schedule, 3.0) for t in range(98)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("t, T", [(-1, 10), (11, 10), (0, 0)])
def test_f_bad_arguments(t, T):
    with pytest.raises(ValueError):
        compute_f(t, T)


# -- coefficients -----------------------------------------------------------------


class FixedStream:
    """Stand-in for RngStream returning a constant."""

    def __init__(self, value):
        self.value = value

    def uniform(self, size=None):
        return np.full(size, self.value)


def test_zero_f_gives_zero_a():
    chaos = ChaoticMap("logistic", (4, 3, 5), RngStream(0))
    co = compute_coefficients(0.0, RngStream(1), chaos)
    assert co.a.shape == (4, 3, 5)
    assert np.all(co.a == 0)


def test_r1_one_gives_a_equal_f():
    chaos = ChaoticMap("logistic", (4, 2), RngStream(0))
    co = compute_coefficients(1.7, FixedStream(1.0), chaos)
    np.testing.assert_allclose(co.a, 1.7)


def test_r2_half_gives_c_one():
    chaos = ChaoticMap("logistic", (4, 2), RngStream(0))
    co = compute_coefficients(1.0, FixedStream(0.5), chaos)
    assert np.all(co.c == 1.0)
    assert np.all((co.m > 0) & (co.m < 1))


def test_coefficients_ranges():
    chaos = ChaoticMap("tent", (4, 50, 7), RngStream(0))
    co = compute_coefficients(2.0, RngStream(5), chaos)
    assert np.all(np.abs(co.a) <= 2.0)
    assert np.all((co.c >= 0) & (co.c < 2))


# -- role_based_position -------------------------------------------------------------


def _coeffs(a, c, m, shape):
    return Coefficients(f=1.0, a=np.full(shape, a), c=np.full(shape, c), m=np.full(shape, m))


def test_coincident_roles_fixed_point():
    x = np.array([0.3, -1.2, 4.0])
    out = role_based_position(x, np.tile(x, (4, 1)), _coeffs(2.0, 1.0, 1.0, (4, 3)))
    np.testing.assert_array_equal(out, x)


def test_zero_a_gives_role_mean():
    roles = np.arange(12.0).reshape(4, 3)
    out = role_based_position(np.zeros(3), roles, _coeffs(0.0, 1.3, 0.4, (4, 3)))
    np.testing.assert_allclose(out, roles.mean(axis=0))


def test_one_dimensional_hand_example():
    roles = np.array([[4.0], [3.0], [2.0], [1.0]])
    out = role_based_position(np.array([0.0]), roles, _coeffs(1.0, 1.0, 0.5, (4, 1)))
    assert out == pytest.approx([0.0])


def test_population_form_matches_single_chimp():
    g = np.random.default_rng(0)
    X = g.normal(size=(6, 3))
    roles = g.normal(size=(4, 3))
    co = Coefficients(1.0, g.normal(size=(4, 6, 3)), g.random((4, 6, 3)), g.random((4, 6, 3)))
    batch = role_based_position(X, roles, co)
    for i in range(6):
        one = Coefficients(1.0, co.a[:, i], co.c[:, i], co.m[:, i])
        np.testing.assert_allclose(batch[i], role_based_position(X[i], roles, one))


# -- seb_update ------------------------------------------------------------------------


def test_spiral_branch_zero_modulus():
    prey = np.array([1.5, -2.0])
    out = seb_update(np.array([9.0, 9.0]), prey, _coeffs(1, 1, 1, 2), 0.9, M=0.0, l=0.37)
    np.testing.assert_array_equal(out, prey)


def test_spiral_branch_full_cosine():
    p = np.array([1.0, -3.0, 0.5])
    out = seb_update(np.zeros(3), p, _coeffs(1, 1, 1, 3), 0.6, M=1.0, l=0.0)
    np.testing.assert_allclose(out, 2 * p)


def test_spiral_branch_cosine_zero():
    p = np.array([2.0, 7.0])
    out = seb_update(np.array([-4.0, 1.0]), p, _coeffs(1, 1, 1, 2), 0.5, M=0.8, l=0.25)
    np.testing.assert_allclose(out, p, atol=1e-15)


def test_encircle_branch():
    x, p = np.array([1.0, 2.0]), np.array([3.0, -1.0])
    co = _coeffs(0.5, 2.0, 0.25, 2)
    out = seb_update(x, p, co, 0.1, M=1.0, l=0.0)
    np.testing.assert_allclose(out, p - 0.5 * np.abs(2.0 * p - 0.25 * x))


# -- roles -------------------------------------------------------------------------------


def test_roles_select_sorted_distinct_stable():
    pos = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [1.0]])
    fit = np.array([5.0, 1.0, 3.0, 1.0, 2.0, 1.0])
    roles = Roles.select(pos, fit)
    np.testing.assert_array_equal(roles.fitness, [1.0, 1.0, 2.0, 3.0])
    np.testing.assert_array_equal(roles.positions[:, 0], [1.0, 3.0, 4.0, 2.0])
    assert roles.attacker[1] == 1.0 and roles.driver[1] == 3.0


# -- optimize --------------------------------------------------------------------------------


@pytest.mark.parametrize("variant", ["choa", "seb-hss1", "seb-archimedean"])
def test_sphere_smoke(variant):
    for seed in (0, 1, 2):
        rec = optimize(sphere(), make_config(variant, seed=seed, population_size=20, max_iterations=200))
        assert rec.best_fitness < 1e-3


def test_constant_objective_trace():
    p = Problem("seven", 3, -1.0, 1.0, lambda x: 7.0)
    rec = optimize(p, ChoaConfig(population_size=5, max_iterations=20, seed=1))
    assert np.all(rec.trace == 7.0)


def test_zero_iterations():
    rec = optimize(sphere(), ChoaConfig(population_size=8, max_iterations=0, seed=3))
    assert len(rec.trace) == 1
    assert rec.evaluations_used == 8


def test_zero_volume_box_rejected():
    p = Problem("thin", 2, [0.0, 0.0], [1.0, 1.0], lambda x: 0.0)
    object.__setattr__(p, "upper", np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        optimize(p, ChoaConfig(max_iterations=1))


def test_objective_errors_propagate():
    def boom(x):
        raise ArithmeticError("bad point")

    with pytest.raises(ArithmeticError):
        optimize(Problem("boom", 2, -1, 1, boom), ChoaConfig(max_iterations=1))


@pytest.mark.parametrize("variant", ["choa", "seb-hss2", "seb-random"])
def test_budget_and_trace_length(variant):
    cfg = make_config(variant, seed=4, population_size=7, max_iterations=33)
    rec = optimize(standard_problem("F9", 5), cfg)
    assert rec.evaluations_used == 7 * 34
    assert len(rec.trace) == 34
    assert np.all(np.diff(rec.trace) <= 0)


def test_determinism():
    cfg = make_config("seb-hss1", seed=99, population_size=10, max_iterations=40)
    a = optimize(standard_problem("F7", 6), cfg)
    b = optimize(standard_problem("F7", 6), cfg)
    np.testing.assert_array_equal(a.trace, b.trace)
    np.testing.assert_array_equal(a.best_position, b.best_position)


def test_seeds_differ():
    p = standard_problem("F1", 5)
    a = optimize(p, make_config("choa", seed=1, max_iterations=5))
    b = optimize(p, make_config("choa", seed=2, max_iterations=5))
    assert not np.array_equal(a.trace, b.trace)


def test_bounds_hold_under_adversarial_modulus():
    p = sphere(dim=4, bound=1.0)
    opt = ChimpOptimizer(p, make_config("seb-logarithmic", seed=0, population_size=15, max_iterations=30))
    real = opt._schedule.moduli

    def huge(progress, draws, rng=None):
        theta, r, _ = real(progress, draws, rng)
        return theta, r, np.full_like(draws, 1e6)

    opt._schedule.moduli = huge
    for _ in range(30):
        pop = opt.step()
        assert np.all(pop.positions >= -1.0) and np.all(pop.positions <= 1.0)


def test_role_invariants_every_step():
    p = standard_problem("F10", 5)
    opt = ChimpOptimizer(p, make_config("seb-fermat", seed=8, population_size=12, max_iterations=25))
    for _ in range(25):
        pop = opt.step()
        assert np.all(np.diff(opt.roles.fitness) >= 0)
        assert opt.roles.fitness[0] <= pop.fitness.min()
        assert opt.roles.fitness[0] == opt.trace[-1]


def test_step_past_budget_rejected():
    opt = ChimpOptimizer(sphere(), ChoaConfig(population_size=4, max_iterations=1))
    opt.step()
    with pytest.raises(RuntimeError):
        opt.step()


def test_spiral_branch_frequency():
    opt = ChimpOptimizer(sphere(), make_config("seb-archimedean", seed=5, population_size=100,
                                               max_iterations=1000))
    opt.run()
    assert opt.spiral_fired / 100_000 == pytest.approx(0.5, abs=0.02)


def test_baseline_never_touches_spiral_module(monkeypatch):
    def forbidden(*args, **kwargs):
        raise AssertionError("spiral module used by baseline")

    for name in ("SpiralSchedule", "radii", "spiral_radius", "spiral_modulus", "solve_implicit_radius"):
        monkeypatch.setattr(spiral_mod, name, forbidden)
    rec = optimize(standard_problem("F1", 4), make_config("choa", seed=0, population_size=6, max_iterations=10))
    assert len(rec.trace) == 11


def test_constrained_run_reports_violation():
    from sebchoa.constraints import spring_design

    rec = optimize(spring_design(), make_config("seb-hss1", seed=0, population_size=10, max_iterations=20))
    assert rec.violation is not None and rec.objective is not None


def test_config_validation():
    with pytest.raises(ValueError):
        ChoaConfig(population_size=0)
    with pytest.raises(ValueError):
        ChoaConfig(max_iterations=-1)
    with pytest.raises(ValueError):
        ChoaConfig(chaotic_map="henon")
