"""Solver: configuration, initialization, the multiplier search, the outer
ascent loop, and the optimality residual."""

import dataclasses

import numpy as np
import pytest

from vortexring.errors import ConfigurationError
from vortexring.grid import ScalarField, integrate_nu
from vortexring.greens import apply_stream_operator
from vortexring.profiles import make_generator
from vortexring.solver import (ProblemConfig, SolveState, background_field,
                               energy, initialize, kkt_residual, l1_change,
                               patch_measure, pointwise_update, run, solve_mu)


def test_problem_config_validation():
    for bad_eps in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ConfigurationError):
            ProblemConfig(epsilon=bad_eps)
    with pytest.raises(ConfigurationError):
        ProblemConfig(epsilon=0.1, kappa=-1.0)
    with pytest.raises(ConfigurationError):
        ProblemConfig(epsilon=0.1, W=0.0)
    with pytest.raises(ConfigurationError):
        ProblemConfig(epsilon=0.1, lambda_cap=-3.0)


def test_problem_config_derived_quantities():
    cfg = ProblemConfig(epsilon=0.1)
    np.testing.assert_allclose(cfg.r_star, 1.0, rtol=1e-15)
    np.testing.assert_allclose(cfg.log_inv_eps, np.log(10.0), rtol=1e-15)
    assert not cfg.degenerate_epsilon
    assert ProblemConfig(epsilon=0.5, kappa=8 * np.pi).degenerate_epsilon
    spec = cfg.domain_grid()
    assert (spec.r_min, spec.r_max) == (0.5, 2.0)
    assert (spec.z_min, spec.z_max) == (-1.0, 1.0)

    pl = make_generator("power_law", p=1.0)
    tk = make_generator("turkington", alpha=2.0)
    assert cfg.resolved_lambda(pl) == 40.0
    assert cfg.resolved_lambda(tk) == 80.0
    with pytest.raises(ConfigurationError):
        ProblemConfig(epsilon=0.1, lambda_cap=0.5).resolved_lambda(pl)


def test_background_field_values():
    cfg = ProblemConfig(epsilon=0.1, n_r=6, n_z=4)
    spec = cfg.domain_grid()
    bg = background_field(cfg, spec)
    expect = 0.5 * spec.r_centers[:, None] ** 2 * np.log(10.0)
    np.testing.assert_allclose(bg, np.broadcast_to(expect, bg.shape),
                               rtol=1e-15)


def test_initialize_ball_geometry():
    cfg = ProblemConfig(epsilon=0.1, n_r=96, n_z=96)
    gen = make_generator("power_law", p=1.0)
    zeta = initialize(cfg, gen)
    np.testing.assert_allclose(integrate_nu(zeta), cfg.kappa, rtol=1e-12)
    spec = zeta.spec
    rr = spec.r_centers[:, None]
    zz = spec.z_centers[None, :]
    supp = zeta.values > 0
    dist = np.hypot(rr - 1.0, np.broadcast_to(zz, zeta.values.shape))
    radius = cfg.epsilon * np.sqrt(cfg.kappa / np.pi)
    cell = np.hypot(spec.dr, spec.dz)
    assert np.all(dist[supp] <= radius + cell)
    # uniform density with eps^2 zeta near one, far below the cap
    c = np.max(zeta.values)
    assert np.all((zeta.values == 0) | (zeta.values == c))
    np.testing.assert_allclose(cfg.epsilon ** 2 * c, 1.0, rtol=0.1)


def test_initialize_rejects_oversized_ball():
    gen = make_generator("power_law", p=1.0)
    with pytest.raises(ConfigurationError):
        initialize(ProblemConfig(epsilon=0.9, n_r=32, n_z=32), gen)
    with pytest.raises(ConfigurationError):
        initialize(ProblemConfig(epsilon=0.3, n_r=32, n_z=32), gen)


def test_energy_zero_field_and_scaling():
    cfg = ProblemConfig(epsilon=0.1, n_r=24, n_z=24)
    gen = make_generator("power_law", p=1.0)
    spec = cfg.domain_grid()
    zero = ScalarField(spec, np.zeros((24, 24)))
    assert energy(cfg, gen, zero, zero) == 0.0

    zeta = initialize(cfg, gen)
    psi0 = apply_stream_operator(zeta)
    e1 = energy(cfg, gen, zeta, psi0)
    two = ScalarField(spec, 2.0 * zeta.values)
    psi0_two = ScalarField(spec, 2.0 * psi0.values)
    e2 = energy(cfg, gen, two, psi0_two)
    # power_law(1): kernel and penalty terms are quadratic, the impulse
    # term is linear, so E(2 zeta) - 4 E(zeta) = 2 * impulse term
    w = spec.nu_weights()
    impulse = 0.5 * cfg.W * cfg.log_inv_eps * float(
        np.sum(zeta.values * spec.r_centers[:, None] ** 2 * w))
    np.testing.assert_allclose(e2 - 4.0 * e1, 2.0 * impulse,
                               rtol=1e-10, atol=1e-12)


def test_pointwise_update_cases():
    cfg = ProblemConfig(epsilon=0.1, n_r=4, n_z=4)
    gen = make_generator("power_law", p=1.0)
    spec = cfg.domain_grid()
    vals = np.zeros((4, 4))
    vals[0, 0] = -1.0
    vals[1, 1] = 0.5
    vals[2, 2] = 100.0
    out = pointwise_update(cfg, gen, ScalarField(spec, vals))
    eps2 = cfg.epsilon ** 2
    assert out.values[0, 0] == 0.0
    np.testing.assert_allclose(out.values[1, 1], 0.5 / eps2, rtol=1e-15)
    np.testing.assert_allclose(out.values[2, 2], 40.0 / eps2, rtol=1e-15)


def test_solve_mu_zero_stream():
    cfg = ProblemConfig(epsilon=0.1, n_r=16, n_z=16)
    gen = make_generator("power_law", p=1.0)
    spec = cfg.domain_grid()
    mu, zeta = solve_mu(cfg, gen, ScalarField(spec, np.zeros((16, 16))))
    assert mu == 0.0
    assert np.all(zeta.values == 0.0)


def test_solve_mu_active_mass_constraint():
    cfg = ProblemConfig(epsilon=0.1, n_r=32, n_z=32)
    gen = make_generator("power_law", p=1.0)
    spec = cfg.domain_grid()
    bg = background_field(cfg, spec)
    # a broad quadratic hump over the background so the raw update holds
    # far more than kappa
    rr = spec.r_centers[:, None]
    zz = spec.z_centers[None, :]
    hump = 3.0 * np.maximum(0.25 - (rr - 1.0) ** 2 - zz ** 2, 0.0)
    mu, zeta = solve_mu(cfg, gen, ScalarField(spec, bg + hump))
    assert mu > 0.0
    mass = integrate_nu(zeta)
    assert mass <= cfg.kappa
    np.testing.assert_allclose(mass, cfg.kappa, rtol=1e-9)
    assert np.max(cfg.epsilon ** 2 * zeta.values) <= 40.0


def test_solve_mu_ledge_fill_for_jump_generator():
    cfg = ProblemConfig(epsilon=0.1, n_r=32, n_z=32)
    gen = make_generator("turkington", alpha=1.0)
    spec = cfg.domain_grid()
    bg = background_field(cfg, spec)
    # a flat plateau of height one: the update mass is a step function of
    # mu and never equals kappa on the continuous part, forcing the
    # bracket to collapse onto the jump and the ledge cells to fill
    # fractionally
    rr = spec.r_centers[:, None]
    zz = spec.z_centers[None, :]
    plateau = ((np.abs(rr - 1.0) < 0.35) & (np.abs(zz) < 0.35)).astype(float)
    mu, zeta = solve_mu(cfg, gen, ScalarField(spec, bg + plateau))
    assert 0.9 < mu < 1.0
    np.testing.assert_allclose(integrate_nu(zeta), cfg.kappa, rtol=1e-9)
    u = cfg.epsilon ** 2 * zeta.values
    supp = u > 0
    # every filled cell sits strictly inside the jump: 0 < u < alpha
    assert np.all(u[supp] < 1.0)
    assert np.all(plateau[supp] == 1.0)
    # an even stream field yields an even update
    np.testing.assert_array_equal(zeta.values, zeta.values[:, ::-1])


def test_l1_change():
    cfg = ProblemConfig(epsilon=0.1, n_r=8, n_z=8)
    spec = cfg.domain_grid()
    a = np.ones((8, 8))
    assert l1_change(spec, a, a) == 0.0
    np.testing.assert_allclose(l1_change(spec, a, 1.5 * a), 0.5, rtol=1e-14)


def _admissibility_checks(result):
    cfg = result.config
    zeta = result.state.zeta
    lam = cfg.resolved_lambda(result.gen)
    assert np.all(zeta.values >= 0.0)
    assert np.max(cfg.epsilon ** 2 * zeta.values) <= lam
    mass = integrate_nu(zeta)
    assert mass <= cfg.kappa
    np.testing.assert_allclose(mass, cfg.kappa, rtol=1e-8)
    np.testing.assert_allclose(result.mass, mass, rtol=1e-15)


def _shape_checks(result):
    zeta = result.state.zeta
    np.testing.assert_array_equal(zeta.values, zeta.values[:, ::-1])
    half = zeta.spec.n_z // 2
    neg = zeta.values[:, :half][:, ::-1]
    pos = zeta.values[:, half:]
    assert np.all(np.diff(neg, axis=1) <= 0.0)
    assert np.all(np.diff(pos, axis=1) <= 0.0)
    # support strictly inside the box
    supp = zeta.values > 0
    assert not supp[0, :].any() and not supp[-1, :].any()
    assert not supp[:, 0].any() and not supp[:, -1].any()


def _trace_checks(result):
    trace = result.energy_trace
    assert trace.size == result.iterations + 1
    floor = -1e-9 * np.maximum(np.abs(trace[:-1]), 1.0)
    assert np.all(np.diff(trace) >= floor)
    assert result.state.energy == trace[-1]


def test_run_invariants_turkington(coarse_turkington):
    result = coarse_turkington
    assert result.converged
    _admissibility_checks(result)
    _shape_checks(result)
    _trace_checks(result)
    assert result.kkt <= 1e-6
    assert result.patch_measure == 0.0
    assert result.state.mu > 0.0
    # the shifted stream is negative on the box boundary
    psi = result.state.psi.values
    boundary_max = max(psi[0, :].max(), psi[-1, :].max(),
                       psi[:, 0].max(), psi[:, -1].max())
    assert boundary_max < 0.0


def test_run_invariants_power_law(coarse_power_law):
    result = coarse_power_law
    _admissibility_checks(result)
    _shape_checks(result)
    _trace_checks(result)
    assert result.state.mu > 0.0
    assert result.patch_measure == 0.0


def test_kkt_residual_detects_perturbation(coarse_turkington):
    base = coarse_turkington
    assert base.kkt <= 1e-6
    vals = base.state.zeta.values.copy()
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    vals[i, j] *= 1.1
    zeta = ScalarField(base.state.zeta.spec, vals)
    state = SolveState(zeta=zeta, psi0=base.state.psi0, mu=base.state.mu,
                       psi=base.state.psi, energy=base.state.energy,
                       iteration=base.state.iteration)
    bumped = dataclasses.replace(base, state=state)
    res = kkt_residual(bumped)
    assert res > 100.0 * base.kkt
    assert res > 1e-3


def test_patch_measure_reports_capped_cells():
    cfg = ProblemConfig(epsilon=0.1, n_r=8, n_z=8)
    gen = make_generator("power_law", p=1.0)
    spec = cfg.domain_grid()
    vals = np.zeros((8, 8))
    vals[3, 3] = 40.0 / cfg.epsilon ** 2
    assert patch_measure(cfg, gen, ScalarField(spec, vals)) > 0.0
    vals[3, 3] *= 0.5
    assert patch_measure(cfg, gen, ScalarField(spec, vals)) == 0.0


def test_run_warns_in_degenerate_regime():
    cfg = ProblemConfig(epsilon=0.5, kappa=8.0 * np.pi, n_r=24, n_z=24,
                        max_iterations=2)
    gen = make_generator("power_law", p=1.0)
    with pytest.warns(RuntimeWarning):
        result = run(cfg, gen)
    assert result.degenerate_epsilon


def test_run_rejects_odd_grid_with_symmetrization():
    cfg = ProblemConfig(epsilon=0.1, n_r=24, n_z=25)
    gen = make_generator("power_law", p=1.0)
    with pytest.raises(ConfigurationError):
        run(cfg, gen)


def test_energy_gain_over_initial_ball(coarse_turkington):
    trace = coarse_turkington.energy_trace
    assert trace[-1] > trace[0]
