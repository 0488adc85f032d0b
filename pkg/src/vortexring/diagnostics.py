"""Post-processing of solver output: support geometry, concentration
measures, flow fields, and sweep asymptotics.

All quantities are pure functions of solve results. Support is always the
numerical support, meaning cells above a small fraction of the peak
vorticity; the solver zeroes cells exactly where the stream variable is
nonpositive, so the threshold only guards against interpolation dust.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ConfigurationError, NumericalError
from .greens import default_extended_box, fd_solve
from .grid import GridSpec, ScalarField, integrate_planar
from .profiles import eval_H
from .solver import background_field


DEFAULT_SUPPORT_FRACTION = 1e-6


def support_mask(zeta, threshold_fraction=DEFAULT_SUPPORT_FRACTION):
    """Boolean cell mask of the numerical support."""
    if not (0.0 < threshold_fraction < 1.0):
        raise ConfigurationError("threshold fraction must lie in (0, 1)")
    peak = float(np.max(zeta.values))
    if peak <= 0.0:
        raise NumericalError("field has empty support")
    return zeta.values > threshold_fraction * peak


def support_stats(zeta, threshold_fraction=DEFAULT_SUPPORT_FRACTION,
                  r_star=1.0):
    """Support geometry: (theta_minus, theta_plus, diam, dist_to_ring).

    theta_minus / theta_plus are the smallest and largest radii of support
    cells in the row nearest z = 0, diam is the largest pairwise distance
    between support cell centers, and dist_to_ring is the farthest any
    support cell sits from the ring circle (r_star, 0) in the meridional
    plane.
    """
    mask = support_mask(zeta, threshold_fraction)
    spec = zeta.spec
    rr = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
    zz = np.repeat(spec.z_centers[None, :], spec.n_r, axis=0)
    pts_r = rr[mask]
    pts_z = zz[mask]

    j_mid = int(np.argmin(np.abs(spec.z_centers)))
    near = np.abs(np.abs(spec.z_centers) - np.abs(spec.z_centers[j_mid])) \
        <= 1e-12 * max(1.0, abs(spec.z_centers[j_mid]))
    row_mask = mask[:, near]
    row_r = spec.r_centers[np.any(row_mask, axis=1)]
    if row_r.size == 0:
        # support misses the middle row entirely; fall back to all rows
        row_r = pts_r
    theta_minus = float(np.min(row_r))
    theta_plus = float(np.max(row_r))

    if pts_r.size == 1:
        diam = 0.0
    elif pts_r.size <= 4000:
        dr2 = (pts_r[:, None] - pts_r[None, :]) ** 2
        dz2 = (pts_z[:, None] - pts_z[None, :]) ** 2
        diam = float(np.sqrt(np.max(dr2 + dz2)))
    else:
        # hull of the support is enough for the farthest pair
        edge = _boundary_cells(mask)
        er, ez = rr[edge], zz[edge]
        dr2 = (er[:, None] - er[None, :]) ** 2
        dz2 = (ez[:, None] - ez[None, :]) ** 2
        diam = float(np.sqrt(np.max(dr2 + dz2)))
    dist = float(np.max(np.hypot(pts_r - r_star, pts_z)))
    return theta_minus, theta_plus, diam, dist


def _boundary_cells(mask):
    interior = ndimage.binary_erosion(mask, structure=np.array(
        [[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool))
    return mask & ~interior


def center_of_vorticity(zeta):
    """Centroid (R, Z) of zeta under the planar measure dr dz.

    For a field exactly even in z on a z-symmetric grid the returned Z is
    exactly zero: the z-moment is accumulated in mirror pairs, each of
    which cancels in floating point.
    """
    spec = zeta.spec
    vals = zeta.values
    mass = float(np.sum(vals)) * spec.cell_area
    if mass <= 0.0:
        raise NumericalError("cannot take the centroid of a massless field")
    mr = float(np.sum(vals * spec.r_centers[:, None])) * spec.cell_area
    wz = vals * spec.z_centers[None, :]
    if spec.z_symmetric():
        half = spec.n_z // 2
        folded = wz[:, :half] + wz[:, :half - spec.n_z - 1:-1]
        mz = float(np.sum(folded)) * spec.cell_area
    else:
        mz = float(np.sum(wz)) * spec.cell_area
    return mr / mass, mz / mass


@dataclass
class ScaledProfile:
    """Core profile in blown-up coordinates x = (point - center) / eps."""

    field: ScalarField
    planar_mass: float
    window_halfwidth: float
    center: tuple


def scaled_profile(zeta, center, epsilon, n_cells=96,
                   threshold_fraction=DEFAULT_SUPPORT_FRACTION):
    """Resample eps^2 zeta around the center in core units.

    The window is the square |x_i| <= 2 * (diam / eps), which always
    contains the support when the center lies in its convex hull; if any
    support cell still falls outside the window this raises. The returned
    grid axes are scaled offsets, not radii, so only planar (cell-area)
    integrals of the profile are meaningful.
    """
    spec = zeta.spec
    mask = support_mask(zeta, threshold_fraction)
    rr = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
    zz = np.repeat(spec.z_centers[None, :], spec.n_r, axis=0)
    cr, cz = center
    sup_r = rr[mask]
    sup_z = zz[mask]
    if sup_r.size > 1:
        diam = support_stats(zeta, threshold_fraction)[2]
    else:
        diam = 0.0
    halfwidth = 2.0 * max(diam, 4.0 * max(spec.dr, spec.dz)) / epsilon
    far = np.max(np.maximum(np.abs(sup_r - cr), np.abs(sup_z - cz))) / epsilon
    if far > halfwidth:
        raise NumericalError(
            "scaled-profile window clips the support: %.3g > %.3g"
            % (far, halfwidth))

    win = GridSpec(-halfwidth, halfwidth, -halfwidth, halfwidth,
                   int(n_cells), int(n_cells))
    xs = win.r_centers
    sample_r = cr + epsilon * xs[:, None] + 0.0 * xs[None, :]
    sample_z = cz + 0.0 * xs[:, None] + epsilon * xs[None, :]
    phi = epsilon ** 2 * _bilinear_sample(zeta, sample_r, sample_z)
    fld = ScalarField(win, phi)
    pmass = float(np.sum(phi)) * win.cell_area
    return ScaledProfile(field=fld, planar_mass=pmass,
                         window_halfwidth=halfwidth, center=(cr, cz))


def _bilinear_sample(field, rq, zq):
    """Bilinear interpolation of a cell-centered field, zero outside."""
    spec = field.spec
    fr = (rq - spec.r_centers[0]) / spec.dr
    fz = (zq - spec.z_centers[0]) / spec.dz
    i0 = np.floor(fr).astype(int)
    j0 = np.floor(fz).astype(int)
    tr = fr - i0
    tz = fz - j0
    out = np.zeros(np.shape(rq))
    padded = np.zeros((spec.n_r + 2, spec.n_z + 2))
    padded[1:-1, 1:-1] = field.values
    ii = np.clip(i0 + 1, 0, spec.n_r)
    jj = np.clip(j0 + 1, 0, spec.n_z)
    inside = (i0 >= -1) & (i0 <= spec.n_r - 1) & (j0 >= -1) & (j0 <= spec.n_z - 1)
    v00 = padded[ii, jj]
    v10 = padded[np.clip(ii + 1, 0, spec.n_r + 1), jj]
    v01 = padded[ii, np.clip(jj + 1, 0, spec.n_z + 1)]
    v11 = padded[np.clip(ii + 1, 0, spec.n_r + 1),
                 np.clip(jj + 1, 0, spec.n_z + 1)]
    val = (v00 * (1 - tr) * (1 - tz) + v10 * tr * (1 - tz)
           + v01 * (1 - tr) * tz + v11 * tr * tz)
    out = np.where(inside, val, 0.0)
    return out


def radial_shell_profile(profile, n_shells=24):
    """Angular average of a scaled profile over circular shells.

    Returns (shell_radii, shell_means). Useful for monotonicity checks.
    """
    fld = profile.field
    spec = fld.spec
    xx = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
    yy = np.repeat(spec.z_centers[None, :], spec.n_r, axis=0)
    rho = np.hypot(xx, yy)
    rmax = profile.window_halfwidth
    edges = np.linspace(0.0, rmax, n_shells + 1)
    idx = np.clip(np.digitize(rho.ravel(), edges) - 1, 0, n_shells - 1)
    sums = np.bincount(idx, weights=fld.values.ravel(), minlength=n_shells)
    counts = np.bincount(idx, minlength=n_shells)
    means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return mids, means


def angular_variation(profile, n_sectors=8, core_fraction=0.5):
    """Relative spread of sector averages of the scaled profile.

    Splits the disc rho <= core_fraction * halfwidth into equal angular
    sectors, averages the profile over each, and returns
    (max - min) / mean. Small values mean the core is nearly radial.
    """
    fld = profile.field
    spec = fld.spec
    xx = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
    yy = np.repeat(spec.z_centers[None, :], spec.n_r, axis=0)
    rho = np.hypot(xx, yy)
    inside = rho <= core_fraction * profile.window_halfwidth
    ang = np.mod(np.arctan2(yy, xx), 2.0 * np.pi)
    sector = np.minimum((ang / (2.0 * np.pi) * n_sectors).astype(int),
                        n_sectors - 1)
    means = np.zeros(n_sectors)
    for k in range(n_sectors):
        sel = inside & (sector == k)
        if not np.any(sel):
            raise NumericalError("empty angular sector in profile check")
        means[k] = float(np.mean(fld.values[sel]))
    mean_all = float(np.mean(means))
    if mean_all <= 0.0:
        raise NumericalError("profile vanishes on the core disc")
    return float((np.max(means) - np.min(means)) / mean_all)


def topology_check(zeta, threshold_fraction=DEFAULT_SUPPORT_FRACTION):
    """True when the support is one 4-connected piece with no holes.

    The complement is examined inside a one-cell-padded bounding box, so a
    support region touching the grid edge still counts as hole-free as
    long as its complement stays connected.
    """
    mask = support_mask(zeta, threshold_fraction)
    cross = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
    _, n_comp = ndimage.label(mask, structure=cross)
    if n_comp != 1:
        return False
    padded = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask
    _, n_holes = ndimage.label(~padded, structure=cross)
    return n_holes == 1


def velocity_field(psi, gen, epsilon):
    """Meridional and swirl velocities from a stream field.

    v_r = -(1/r) dpsi/dz, v_z = (1/r) dpsi/dr by centered differences
    (one-sided at edges), v_theta = H(psi) / (eps r), which vanishes
    wherever psi <= 0.
    """
    spec = psi.spec
    rr = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
    dpsi_dr = np.gradient(psi.values, spec.dr, axis=0)
    dpsi_dz = np.gradient(psi.values, spec.dz, axis=1)
    v_r = ScalarField(spec, -dpsi_dz / rr)
    v_z = ScalarField(spec, dpsi_dr / rr)
    v_theta = ScalarField(spec, eval_H(gen, psi.values) / (epsilon * rr))
    return v_r, v_theta, v_z


def far_field_check(result, n_angles=48, min_radius=None):
    """Far-field axial velocity against the traveling-frame value.

    Solves for the induced stream function on a large padded box, samples
    v_z on a circle of radius max(10 * diam, min_radius) around the core
    center, and compares with -W log(1/eps). The default floor of
    6 r_star keeps the circle outside the ring's dipole near zone, whose
    1/rho^3 tail otherwise dominates the comparison. Returns a dict with
    the mean sampled v_z, the worst relative deviation, and the radius.
    """
    config = result.config
    zeta = result.state.zeta
    _, _, diam, _ = support_stats(zeta, r_star=config.r_star)
    center_r, center_z = center_of_vorticity(zeta)
    if min_radius is None:
        min_radius = 6.0 * config.r_star
    radius = max(10.0 * diam, min_radius)

    spec = zeta.spec
    diag = float(np.hypot(spec.r_max - spec.r_min, spec.z_max - spec.z_min))
    factor = max(3.0, (radius + 1.0) / diag)
    box = default_extended_box(spec, margin_factor=factor)
    psi0_ext = fd_solve(zeta, box=box)
    rr = np.repeat(box.r_centers[:, None], box.n_z, axis=1)
    dpsi_dr = np.gradient(psi0_ext.values, box.dr, axis=0)
    vz_induced = dpsi_dr / rr

    target = -config.W * config.log_inv_eps
    angles = (np.arange(n_angles) + 0.5) * 2.0 * np.pi / n_angles
    pr = center_r + radius * np.cos(angles)
    pz = center_z + radius * np.sin(angles)
    keep = (pr > box.r_min + 2.0 * box.dr) & (pr < box.r_max - 2.0 * box.dr) \
        & (pz > box.z_min + 2.0 * box.dz) & (pz < box.z_max - 2.0 * box.dz) \
        & (pr >= 0.25 * config.r_star)
    if not np.any(keep):
        raise NumericalError("no usable far-field sample points")
    vz_field = ScalarField(box, vz_induced + target)
    samples = _bilinear_sample(vz_field, pr[keep], pz[keep])
    rel = np.abs(samples - target) / abs(target)
    return {
        "far_vz": float(np.mean(samples)),
        "target": float(target),
        "worst_rel_dev": float(np.max(rel)),
        "radius": float(radius),
        "n_samples": int(np.count_nonzero(keep)),
    }


def core_radius(zeta, threshold_fraction=DEFAULT_SUPPORT_FRACTION):
    """Radius of the circle with the same planar support area."""
    mask = support_mask(zeta, threshold_fraction)
    area = float(np.count_nonzero(mask)) * zeta.spec.cell_area
    return float(np.sqrt(area / np.pi))


@dataclass
class DiagnosticsRecord:
    """One solve summarized for sweep tables."""

    epsilon: float
    theta_minus: float
    theta_plus: float
    diam_supp: float
    dist_to_ring: float
    center_r: float
    center_z: float
    mu: float
    energy: float
    simply_connected: bool
    far_field_vz: float
    far_field_rel_dev: float
    swirl_max: float
    core_radius: float
    mass: float
    kkt_residual: float
    patch_measure: float
    converged: bool

    def check_invariants(self):
        if not (self.theta_minus <= self.center_r + 1e-12):
            raise NumericalError("center left of theta_minus")
        if not (self.center_r <= self.theta_plus + 1e-12):
            raise NumericalError("center right of theta_plus")


def diagnostics_record(result, threshold_fraction=DEFAULT_SUPPORT_FRACTION):
    """Assemble the full record for one solve result."""
    config = result.config
    zeta = result.state.zeta
    tm, tp, diam, dist = support_stats(zeta, threshold_fraction,
                                       r_star=config.r_star)
    cr, cz = center_of_vorticity(zeta)
    far = far_field_check(result)
    _, v_theta, _ = velocity_field(result.state.psi, result.gen,
                                   config.epsilon)
    rec = DiagnosticsRecord(
        epsilon=config.epsilon,
        theta_minus=tm,
        theta_plus=tp,
        diam_supp=diam,
        dist_to_ring=dist,
        center_r=cr,
        center_z=cz,
        mu=result.state.mu,
        energy=result.state.energy,
        simply_connected=topology_check(zeta, threshold_fraction),
        far_field_vz=far["far_vz"],
        far_field_rel_dev=far["worst_rel_dev"],
        swirl_max=float(np.max(np.abs(v_theta.values))),
        core_radius=core_radius(zeta, threshold_fraction),
        mass=result.mass,
        kkt_residual=result.kkt,
        patch_measure=result.patch_measure,
        converged=result.converged,
    )
    rec.check_invariants()
    return rec


@dataclass
class AsymptoticFit:
    """Linear fits of mu and E against log(1/eps)."""

    slope_mu: float
    intercept_mu: float
    r_squared_mu: float
    slope_E: float
    intercept_E: float
    r_squared_E: float


def asymptotic_fit(epsilons, mus, energies):
    """Least-squares slopes of mu and E in log(1/eps).

    The growth constants for the defaults are slope_mu = 3 kappa^2 /
    (32 pi^2 W) and slope_E = kappa^3 / (32 pi^2 W); callers compare the
    fitted slopes against those.
    """
    eps = np.asarray(epsilons, dtype=float)
    if eps.size < 3 or np.unique(eps).size < 3:
        raise ConfigurationError("need at least 3 distinct sweep points")
    x = np.log(1.0 / eps)
    fits = []
    for y in (np.asarray(mus, dtype=float), np.asarray(energies, dtype=float)):
        slope, intercept = np.polyfit(x, y, 1)
        pred = slope * x + intercept
        ss_res = float(np.sum((y - pred) ** 2))
        ss_tot = float(np.sum((y - np.mean(y)) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        fits.append((float(slope), float(intercept), r2))
    return AsymptoticFit(
        slope_mu=fits[0][0], intercept_mu=fits[0][1], r_squared_mu=fits[0][2],
        slope_E=fits[1][0], intercept_E=fits[1][1], r_squared_E=fits[1][2],
    )


def predicted_slopes(kappa, W):
    """Closed-form growth constants for mu and E."""
    slope_mu = 3.0 * kappa ** 2 / (32.0 * np.pi ** 2 * W)
    slope_e = kappa ** 3 / (32.0 * np.pi ** 2 * W)
    return slope_mu, slope_e


def kelvin_hicks_check(epsilons, core_radii, kappa, W):
    """Translation speed versus the classical thin-ring formula.

    Compares W log(1/eps) with (kappa / 4 pi r_star)(log(8 r_star /
    eps_hat) - 1/4), where eps_hat is the measured area-equivalent core
    radius. The leading log coefficients agree by the choice of r_star,
    so the difference should stay bounded across a sweep.
    """
    eps = np.asarray(epsilons, dtype=float)
    ehat = np.asarray(core_radii, dtype=float)
    if eps.shape != ehat.shape or eps.size == 0:
        raise ConfigurationError("epsilons and core_radii must match")
    r_star = kappa / (4.0 * np.pi * W)
    frame_speed = W * np.log(1.0 / eps)
    ring_speed = (kappa / (4.0 * np.pi * r_star)) \
        * (np.log(8.0 * r_star / ehat) - 0.25)
    diff = frame_speed - ring_speed
    ratio = ehat / eps
    return {
        "epsilons": eps.tolist(),
        "frame_speed": frame_speed.tolist(),
        "ring_speed": ring_speed.tolist(),
        "difference": diff.tolist(),
        "difference_spread": float(np.max(diff) - np.min(diff)),
        "core_ratio": ratio.tolist(),
        "core_ratio_spread": float(np.max(ratio) / np.min(ratio)),
    }
