"""Diagnostics: support geometry, centroids, scaled core profiles,
topology, velocities, far field, and sweep asymptotics."""

import numpy as np
import pytest

from vortexring.diagnostics import (DiagnosticsRecord, angular_variation,
                                    asymptotic_fit, center_of_vorticity,
                                    core_radius, diagnostics_record,
                                    far_field_check, kelvin_hicks_check,
                                    predicted_slopes, radial_shell_profile,
                                    scaled_profile, support_mask,
                                    support_stats, topology_check,
                                    velocity_field)
from vortexring.errors import ConfigurationError, NumericalError
from vortexring.grid import ScalarField, build_grid
from vortexring.profiles import make_generator
from vortexring.solver import ProblemConfig, initialize


def test_support_mask_validation():
    spec = build_grid(0.5, 2.0, -1.0, 1.0, 4, 4)
    zero = ScalarField(spec, np.zeros((4, 4)))
    with pytest.raises(NumericalError):
        support_mask(zero)
    one = ScalarField(spec, np.ones((4, 4)))
    with pytest.raises(ConfigurationError):
        support_mask(one, threshold_fraction=0.0)
    with pytest.raises(ConfigurationError):
        support_mask(one, threshold_fraction=1.0)


def test_support_stats_single_cell():
    spec = build_grid(0.5, 2.0, -1.0, 1.0, 5, 5)
    vals = np.zeros((5, 5))
    vals[2, 2] = 1.0
    c = spec.r_centers[2]
    assert spec.z_centers[2] == 0.0
    tm, tp, diam, dist = support_stats(ScalarField(spec, vals), r_star=c)
    assert (tm, tp, diam, dist) == (c, c, 0.0, 0.0)


def test_support_stats_on_initial_ball():
    cfg = ProblemConfig(epsilon=0.1, n_r=96, n_z=96)
    zeta = initialize(cfg, make_generator("power_law", p=1.0))
    tm, tp, diam, dist = support_stats(zeta, r_star=1.0)
    radius = 0.2
    cell = np.hypot(zeta.spec.dr, zeta.spec.dz)
    np.testing.assert_allclose(diam, 2.0 * radius, atol=3.0 * cell)
    np.testing.assert_allclose(dist, radius, atol=2.0 * cell)
    np.testing.assert_allclose(tm, 1.0 - radius, atol=2.0 * cell)
    np.testing.assert_allclose(tp, 1.0 + radius, atol=2.0 * cell)
    assert tm <= tp


def test_centroid_translation_by_one_cell():
    spec = build_grid(0.5, 2.0, -1.0, 1.0, 8, 8)
    a = np.zeros((8, 8))
    b = np.zeros((8, 8))
    a[2, 3] = 5.0
    b[2, 4] = 5.0
    ra, za = center_of_vorticity(ScalarField(spec, a))
    rb, zb = center_of_vorticity(ScalarField(spec, b))
    assert ra == rb
    assert zb - za == spec.dz == 0.25


def test_centroid_even_field_has_exactly_zero_z(rng, coarse_turkington):
    spec = build_grid(0.5, 2.0, -1.0, 1.0, 6, 10)
    half = rng.uniform(0.0, 1.0, (6, 5))
    vals = np.concatenate([half, half[:, ::-1]], axis=1)
    _, z = center_of_vorticity(ScalarField(spec, vals))
    assert z == 0.0
    _, z_solved = center_of_vorticity(coarse_turkington.state.zeta)
    assert z_solved == 0.0


def _disc_field(n=128, center=(1.1, 0.0), rho=0.12, height=3.0):
    spec = build_grid(0.5, 2.0, -1.0, 1.0, n, n)
    rr = spec.r_centers[:, None]
    zz = spec.z_centers[None, :]
    vals = np.where(np.hypot(rr - center[0], zz - center[1]) <= rho,
                    height, 0.0)
    return ScalarField(spec, vals)


def test_scaled_profile_disc_mass():
    zeta = _disc_field()
    eps = 0.1
    prof = scaled_profile(zeta, (1.1, 0.0), eps)
    expect = 3.0 * np.pi * 0.12 ** 2
    np.testing.assert_allclose(prof.planar_mass, expect, rtol=5e-2)
    assert prof.window_halfwidth >= 0.24 / eps


def test_scaled_profile_clip_error():
    zeta = _disc_field()
    with pytest.raises(NumericalError):
        scaled_profile(zeta, (1.9, 0.9), 0.1)


def test_radial_shell_profile_of_disc():
    prof = scaled_profile(_disc_field(), (1.1, 0.0), 0.1)
    mids, means = radial_shell_profile(prof, n_shells=16)
    assert mids.shape == means.shape == (16,)
    # flat near the center, zero well outside the core
    np.testing.assert_allclose(means[0], 3.0 * 0.1 ** 2 / 0.1 ** 2 * 0.01,
                               rtol=0.1)
    assert means[-1] == 0.0
    assert np.all(np.diff(means) <= 1e-12)


def test_angular_variation_radial_disc():
    prof = scaled_profile(_disc_field(), (1.1, 0.0), 0.1)
    var = angular_variation(prof)
    assert var < 0.1


def test_topology_check_shapes():
    spec = build_grid(0.5, 2.0, -1.0, 1.0, 64, 64)
    rr = spec.r_centers[:, None]
    zz = spec.z_centers[None, :]
    d = np.hypot(rr - 1.2, zz)
    disc = ScalarField(spec, np.where(d <= 0.3, 1.0, 0.0))
    assert topology_check(disc)
    annulus = ScalarField(spec, np.where((d <= 0.3) & (d >= 0.12), 1.0, 0.0))
    assert not topology_check(annulus)
    blobs = np.zeros((64, 64))
    blobs[10, 10] = 1.0
    blobs[50, 50] = 1.0
    assert not topology_check(ScalarField(spec, blobs))


def test_velocity_field_of_quadratic_stream():
    spec = build_grid(0.5, 2.0, -1.0, 1.0, 32, 32)
    W, L = 1.0, np.log(10.0)
    psi = ScalarField(spec, -0.5 * W * spec.r_centers[:, None] ** 2 * L
                      + 0.0 * spec.z_centers[None, :])
    gen = make_generator("power_law", p=1.0)
    v_r, v_theta, v_z = velocity_field(psi, gen, 0.1)
    np.testing.assert_allclose(v_r.values, 0.0, atol=1e-14)
    assert np.all(v_theta.values == 0.0)
    # centered differences are exact on a parabola away from the edges
    np.testing.assert_allclose(v_z.values[1:-1, :], -W * L, rtol=1e-12)


def test_swirl_support_matches_stream_sign(coarse_turkington,
                                           coarse_power_law):
    res = coarse_turkington
    _, v_theta, _ = velocity_field(res.state.psi, res.gen,
                                   res.config.epsilon)
    np.testing.assert_array_equal(v_theta.values > 0.0,
                                  res.state.psi.values > 0.0)
    res0 = coarse_power_law
    _, v0, _ = velocity_field(res0.state.psi, res0.gen, res0.config.epsilon)
    assert np.all(v0.values == 0.0)


def test_asymptotic_fit_recovers_synthetic_slopes():
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    x = np.log(1.0 / eps)
    fit = asymptotic_fit(eps, 1.5 * x + 0.3, 2.0 * np.pi * x - 2.0)
    np.testing.assert_allclose(fit.slope_mu, 1.5, rtol=1e-12)
    np.testing.assert_allclose(fit.intercept_mu, 0.3, rtol=1e-10)
    np.testing.assert_allclose(fit.slope_E, 2.0 * np.pi, rtol=1e-12)
    np.testing.assert_allclose(fit.r_squared_mu, 1.0, atol=1e-12)
    with pytest.raises(ConfigurationError):
        asymptotic_fit([0.1, 0.05], [1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ConfigurationError):
        asymptotic_fit([0.1, 0.1, 0.1], [1, 2, 3], [1, 2, 3])


def test_predicted_slopes_defaults():
    slope_mu, slope_e = predicted_slopes(4.0 * np.pi, 1.0)
    np.testing.assert_allclose(slope_mu, 1.5, rtol=1e-15)
    np.testing.assert_allclose(slope_e, 2.0 * np.pi, rtol=1e-15)


def test_kelvin_hicks_proportional_core():
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    out = kelvin_hicks_check(eps, 0.9 * eps, 4.0 * np.pi, 1.0)
    np.testing.assert_allclose(out["difference_spread"], 0.0, atol=1e-12)
    np.testing.assert_allclose(out["core_ratio_spread"], 1.0, rtol=1e-12)
    with pytest.raises(ConfigurationError):
        kelvin_hicks_check(eps, eps[:2], 4.0 * np.pi, 1.0)


def test_core_radius_of_disc():
    np.testing.assert_allclose(core_radius(_disc_field()), 0.12, rtol=5e-2)


def test_far_field_check_on_solved_ring(coarse_turkington):
    out = far_field_check(coarse_turkington)
    assert out["radius"] >= 6.0
    assert out["n_samples"] > 0
    assert out["target"] == pytest.approx(-np.log(10.0))
    assert out["worst_rel_dev"] <= 0.2
    np.testing.assert_allclose(out["far_vz"], out["target"], rtol=0.15)


def test_diagnostics_record_assembly(coarse_turkington):
    rec = diagnostics_record(coarse_turkington)
    assert rec.converged
    assert rec.simply_connected
    assert rec.swirl_max > 0.0
    assert rec.theta_minus <= rec.center_r <= rec.theta_plus
    assert rec.center_z == 0.0
    assert rec.mass == pytest.approx(4.0 * np.pi, rel=1e-8)
    assert rec.patch_measure == 0.0
    assert rec.kkt_residual <= 1e-6
    assert rec.mu > 0.0


def test_record_invariant_guard():
    rec = DiagnosticsRecord(
        epsilon=0.1, theta_minus=1.5, theta_plus=1.6, diam_supp=0.1,
        dist_to_ring=0.5, center_r=1.0, center_z=0.0, mu=1.0, energy=1.0,
        simply_connected=True, far_field_vz=-2.3, far_field_rel_dev=0.05,
        swirl_max=0.0, core_radius=0.1, mass=1.0, kkt_residual=0.0,
        patch_measure=0.0, converged=True)
    with pytest.raises(NumericalError):
        rec.check_invariants()
