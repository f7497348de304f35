import numpy as np
import pytest

from csswaves.errors import ConvergenceError, GrowthError, UsageError
from csswaves.functional import gradient_field, make_problem, phi
from csswaves.grid import Grid, gaussian, inner, l2_norm, random_bumps, symmetry_defect
from csswaves.model import make_model
from csswaves.operator import assemble, equivalent_norm, project
from csswaves.solver import (
    SobolevPreconditioner,
    SolverConfig,
    find_descent_scale,
    lift,
    linking_verdict,
    local_linking_probe,
    maximize_minus,
    mountain_pass,
    ray_scan,
    residual_minimize,
    solve,
)

from .conftest import CONSTANT


@pytest.fixture(scope="module")
def ground64(constant64):
    return residual_minimize(constant64, SolverConfig(grad_tol=1e-8))


@pytest.fixture(scope="module")
def well_state64(well64):
    return residual_minimize(well64, SolverConfig(grad_tol=1e-7))


# ------------------------------------------------------------------ config


@pytest.mark.parametrize(
    "kwargs",
    [
        {"method": "newton"},
        {"grad_tol": 0.0},
        {"delta0": -1.0},
        {"path_nodes": 3},
        {"max_iters": 0},
        {"tau_min": 1.0, "descent_step": 0.5},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(UsageError):
        SolverConfig(**kwargs)


def test_seed_is_restricted_gaussian(grid64):
    seed = SolverConfig(seed_amplitude=3.0).seed(grid64, scale=2.0)
    assert seed[0].max() == 0.0 and seed[:, 0].max() == 0.0
    assert seed[32, 32] == pytest.approx(6.0)


def test_preconditioner_inverts_shifted_laplacian(grid64):
    prec = SobolevPreconditioner(grid64)
    op = assemble(CONSTANT, grid64)
    f = random_bumps(grid64, np.random.default_rng(0))
    assert np.allclose(op.apply(prec(f)), grid64.restrict(f), atol=1e-12)


# ------------------------------------------------------------------ residual route


def test_ground_state_certificate(constant64, ground64):
    res = ground64
    assert res.nontrivial and res.method == "residual_min"
    g = gradient_field(constant64, res.u)
    assert g.residual == pytest.approx(res.residual) and g.residual <= 1e-8
    assert res.phi == pytest.approx(phi(constant64, res.u))
    assert res.norm >= SolverConfig().delta0 and res.norm_minus == 0.0
    assert symmetry_defect(res.u) < 1e-10
    assert res.phi > 0


def test_fixed_point_start(constant64, ground64):
    res = residual_minimize(constant64, SolverConfig(grad_tol=1e-6), start=ground64.u)
    assert res.iterations == 0 and res.restarts == 0
    assert np.array_equal(res.u, ground64.u)


def test_zero_start_restarts(constant64):
    res = residual_minimize(constant64, SolverConfig(grad_tol=1e-6), start=constant64.grid.zeros())
    assert res.restarts >= 1 and res.nontrivial
    assert any(h["phase"] == "restart" for h in res.history)
    assert any("collapse" in n for n in res.notes)


def test_translation_consistency(constant64, ground64):
    grid = constant64.grid
    k = 4
    cfg = SolverConfig(grad_tol=1e-8)
    seed = grid.restrict(gaussian(grid, cfg.seed_amplitude, cfg.seed_width, center=(k * grid.h, 0.0)))
    shifted = residual_minimize(constant64, cfg, start=seed)
    expected = np.roll(ground64.u, k, axis=0)
    err = l2_norm(grid, grid.restrict(shifted.u - expected)) / l2_norm(grid, expected)
    # the profile decays like exp(-r); the wall is now L - k h away from its centre
    boundary = np.exp(-(grid.L - k * grid.h))
    assert err < 4 * boundary
    assert shifted.phi == pytest.approx(ground64.phi, rel=4 * boundary)


def test_merit_monotone_within_merit_phase(ground64, well_state64):
    for res in (ground64, well_state64):
        hist = res.history
        merit_rows = [i for i, h in enumerate(hist) if h["phase"] == "merit"]
        assert merit_rows
        for i in merit_rows:
            assert hist[i]["residual"] <= hist[i - 1]["residual"] * (1 + 1e-12)


def test_history_fields(ground64):
    row = ground64.history[-1]
    assert set(row) >= {"iter", "phi", "residual", "norm_minus", "norm_plus", "phase"}
    iters = [h["iter"] for h in ground64.history]
    assert iters == sorted(iters)


def test_max_iters_raises_with_history(constant64):
    with pytest.raises(ConvergenceError) as info:
        residual_minimize(constant64, SolverConfig(grad_tol=1e-12, max_iters=2))
    assert len(info.value.history) >= 2


def test_indefinite_solution(well64, well_state64):
    res = well_state64
    assert res.nontrivial and res.residual <= 1e-7
    assert res.norm >= 1e-3
    assert gradient_field(well64, res.u).residual <= 1e-7
    assert symmetry_defect(res.u) < 1e-6


def test_boundary_mass_warning():
    g = Grid(2.5, 32)
    problem = make_problem(g, CONSTANT, make_model())
    with pytest.warns(RuntimeWarning, match="boundary mass"):
        res = residual_minimize(problem, SolverConfig(grad_tol=1e-6))
    assert res.boundary_mass > 1e-6 and res.notes


def test_lift_and_maximize_minus(well64):
    grid = well64.grid
    u = random_bumps(grid, np.random.default_rng(3))
    v = maximize_minus(well64, u)
    # X+ part untouched, X- part optimal: <g, phi_1> = 0
    assert np.allclose(project(well64.split, v)[1], project(well64.split, u)[1], atol=1e-12)
    for f in well64.split.neg_eigenfields:
        assert abs(inner(grid, gradient_field(well64, v).g, f)) < 1e-8
    assert phi(well64, v) >= phi(well64, u) - 1e-12
    w = lift(well64, u)
    assert w is not None and phi(well64, w) >= phi(well64, v) - 1e-10


# ------------------------------------------------------------------ mountain pass


def test_mountain_pass_agrees_with_residual_route(constant64, ground64):
    res = solve(constant64, SolverConfig(method="mountain_pass", grad_tol=1e-6))
    assert res.method == "mountain_pass" and res.nontrivial
    assert res.phi >= 0
    assert res.phi == pytest.approx(ground64.phi, rel=1e-2)


def test_mountain_pass_fixed_point(constant64, ground64):
    # 0.5 * e = u* is a node of the initial straight path
    e = 2.0 * ground64.u
    assert phi(constant64, e) < 0
    res = mountain_pass(constant64, SolverConfig(method="mountain_pass", grad_tol=1e-6), e)
    assert res.iterations == 0
    assert l2_norm(constant64.grid, res.u - ground64.u) < 1e-6 * l2_norm(constant64.grid, ground64.u)


def test_mountain_pass_usage(constant64, ground64):
    cfg = SolverConfig(method="mountain_pass")
    with pytest.raises(UsageError):
        mountain_pass(constant64, cfg, None)
    with pytest.raises(UsageError):
        mountain_pass(constant64, cfg, 0.5 * ground64.u)


def test_mountain_pass_budget_exhausted(constant64, ground64):
    e = 3.0 * ground64.u / equivalent_norm(constant64.split, ground64.u)
    e = find_descent_scale(constant64, e) * e / equivalent_norm(constant64.split, e)
    with pytest.raises(ConvergenceError) as info:
        mountain_pass(constant64, SolverConfig(method="mountain_pass", grad_tol=1e-14, max_iters=2), e)
    assert info.value.history


# ------------------------------------------------------------------ landscape


def test_descent_scale_level(constant64):
    v = constant64.grid.restrict(gaussian(constant64.grid))
    s = find_descent_scale(constant64, v, A=1.0)
    unit = v / equivalent_norm(constant64.split, v)
    assert s > 0
    assert abs(phi(constant64, s * unit) + 1.0) <= 1e-8
    assert inner(constant64.grid, gradient_field(constant64, s * unit).g, unit) < 0


def test_descent_scale_errors(constant64):
    with pytest.raises(UsageError):
        find_descent_scale(constant64, constant64.grid.zeros())
    with pytest.raises(UsageError):
        find_descent_scale(constant64, gaussian(constant64.grid), A=0.0)


def test_growth_error_p6(grid64):
    problem = make_problem(grid64, CONSTANT, make_model("pure_power", 6.0))
    v = grid64.restrict(gaussian(grid64, 1.0, 3.0))
    with pytest.raises(GrowthError) as info:
        find_descent_scale(problem, v)
    s_values = [s for s, _ in info.value.witness]
    assert s_values[-1] >= 5e5 and s_values == sorted(s_values)


def test_p6_narrow_ray_still_descends(grid64):
    # the p = 6 balance depends on the profile: narrow data can still reach -A
    problem = make_problem(grid64, CONSTANT, make_model("pure_power", 6.0))
    assert find_descent_scale(problem, grid64.restrict(gaussian(grid64))) > 0


def test_ray_scan_shape(constant64):
    v = constant64.grid.restrict(gaussian(constant64.grid))
    v = v / equivalent_norm(constant64.split, v)
    scan = ray_scan(constant64, v, s_max=6.0, samples=61)
    assert scan.rows.shape == (61, 3)
    assert tuple(scan.rows[0]) == (0.0, 0.0, 0.0)
    assert scan.sign_changes() == 1
    assert scan.flagged.size == 0
    with pytest.raises(UsageError):
        ray_scan(constant64, constant64.grid.zeros())


def test_linking_constant_has_no_minus_branch(constant64):
    rep = local_linking_probe(constant64, 1e-2, 4, np.random.default_rng(0))
    assert rep.ell == 0 and len(rep.levels) == 3
    assert [lv.eps for lv in rep.levels] == [1e-2, 5e-3, 2.5e-3]
    for lv in rep.levels:
        assert lv.minus_status == "not-applicable" and lv.minus_max is None
        assert lv.plus_min > 0 and lv.plus_max_dev <= 0.05
    assert rep.holds()
    assert linking_verdict(rep).status == "holds-on-samples"
    assert rep.to_dict()["levels"][0]["minus_status"] == "not-applicable"


def test_linking_well_minus_branch(well64):
    rep = local_linking_probe(well64, 1e-2, 4, np.random.default_rng(1))
    for lv in rep.levels:
        assert lv.minus_status == "holds-on-samples" and lv.minus_max < 0
        assert lv.minus_max_dev <= 0.05
    with pytest.raises(UsageError):
        local_linking_probe(well64, 0.0)
