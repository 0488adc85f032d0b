"""The ring kernel, the induced stream function, and a finite-difference
cross-check.

The stream operator inverts

    L = -(1/r) d/dr((1/r) d/dr) - (1/r^2) d^2/dz^2

on the half-plane r > 0 with decay at infinity. Its kernel is the stream
function of a unit circular vortex filament,

    K(r, z, r', z') = (r r' / 4 pi) * integral_{-pi}^{pi}
        cos t dt / sqrt((z - z')^2 + r^2 + r'^2 - 2 r r' cos t),

which reduces to complete elliptic integrals. Both forms are provided: the
quadrature form is the slow reference, the elliptic form the production
path. `apply_stream_operator` evaluates psi0 = K zeta on a grid with a
block-Toeplitz kernel table and FFT convolution in z; `fd_solve` solves
L psi0 = zeta by finite differences on a much larger box and serves as an
independent check on the kernel path.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.linalg import spsolve
from scipy.special import ellipe, ellipkm1

from .errors import (
    ConfigurationError,
    ConsistencyError,
    NumericalError,
    QuadratureToleranceError,
    SingularEvaluationError,
)
from .grid import ScalarField, build_grid, integrate_nu

TWO_PI = 2.0 * np.pi


@dataclass
class KernelEval:
    """One kernel evaluation with provenance."""

    value: float
    method: str
    estimated_error: float


def sigma(r, z, rp, zp):
    """Normalized separation sqrt((r-r')^2 + (z-z')^2) / sqrt(4 r r').

    Vanishes exactly at coincident points; scale-invariant under
    (r, z) -> (c r, c z).
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    if np.any(r <= 0) or np.any(rp <= 0):
        raise ConfigurationError("sigma needs strictly positive radii")
    d2 = (np.asarray(r) - rp) ** 2 + (np.asarray(z) - np.asarray(zp)) ** 2
    out = np.sqrt(d2 / (4.0 * r * rp))
    return float(out) if out.ndim == 0 else out


def kernel_bound(r, z, rp, zp, coef=0.25):
    """Envelope sqrt(r r') * (coef / pi) * asinh(1 / sigma).

    coef=0.25 is the 1/(4 pi) envelope the validation suite compares
    against; coef=0.5 gives the 1/(2 pi) envelope that also dominates the
    kernel in the near-coincidence logarithmic regime.
    """
    s = sigma(r, z, rp, zp)
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    out = np.sqrt(r * rp) * (coef / np.pi) * np.arcsinh(1.0 / s)
    return float(out) if np.ndim(out) == 0 else out


def _elliptic_kernel(r, z, rp, zp):
    """Vectorized kernel via complete elliptic integrals.

    With m = k^2 = 4 r r' / ((r+r')^2 + (z-z')^2),

        K = (sqrt(r r') / 2 pi) * ((2/k - k) K(m) - (2/k) E(m)).

    The complementary parameter m1 = 1 - m is formed cancellation-free
    from ((r-r')^2 + (z-z')^2) so K(m) stays accurate arbitrarily close
    to coincidence.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    rp = np.asarray(rp, dtype=float)
    zp = np.asarray(zp, dtype=float)
    dz2 = (z - zp) ** 2
    den = (r + rp) ** 2 + dz2
    m = 4.0 * r * rp / den
    m1 = ((r - rp) ** 2 + dz2) / den
    with np.errstate(divide="ignore", invalid="ignore"):
        kk = ellipkm1(m1)
        ee = ellipe(m)
        k = np.sqrt(m)
        val = (np.sqrt(r * rp) / TWO_PI) * ((2.0 / k - k) * kk - (2.0 / k) * ee)
    return val, m1


def kernel_closed_form(r, z, rp, zp):
    """Production kernel evaluation at a single point pair.

    Agrees with kernel_quadrature to better than 1e-10 relative (observed
    1e-13 worst case); raises SingularEvaluationError at coincidence.
    """
    s = sigma(r, z, rp, zp)
    if s == 0.0:
        raise SingularEvaluationError("kernel evaluated at coincident points")
    val, m1 = _elliptic_kernel(r, z, rp, zp)
    val = float(val)
    if not np.isfinite(val) or float(m1) < 1e-300:
        # so close to coincidence that the elliptic route degrades: use the
        # logarithmic expansion K ~ (sqrt(r r')/2 pi) (log(4/k') - 2)
        kprime = max(np.sqrt(float(m1)), 1e-320)
        val = float(np.sqrt(r * rp) / TWO_PI * (np.log(4.0 / kprime) - 2.0))
    return KernelEval(value=val, method="closed-form", estimated_error=1e-13 * abs(val))


def kernel_quadrature(r, z, rp, zp, tol=1e-10):
    """Reference kernel evaluation by adaptive quadrature in the angle.

    Slow but independent of the elliptic-integral identities; used as the
    oracle for kernel_closed_form. Raises SingularEvaluationError when the
    points coincide and QuadratureToleranceError when the requested
    relative tolerance is not reached.
    """
    if tol <= 0:
        raise ConfigurationError("quadrature tolerance must be positive")
    s = sigma(r, z, rp, zp)
    if s == 0.0:
        raise SingularEvaluationError("kernel evaluated at coincident points")
    dz2 = (z - zp) ** 2
    a = dz2 + r * r + rp * rp

    def integrand(t):
        return np.cos(t) / np.sqrt(a - 2.0 * r * rp * np.cos(t))

    # integrand is even in t: integrate half the range. full_output=1 keeps
    # scipy from warning; the error estimate is inspected instead.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = integrate.quad(integrand, 0.0, np.pi, epsabs=0.0, epsrel=tol,
                             limit=400, full_output=1)
    y, abserr = res[0], res[1]
    if len(res) > 3:
        raise QuadratureToleranceError("kernel quadrature failed: %s" % res[3])
    value = (r * rp / (4.0 * np.pi)) * 2.0 * y
    err = (r * rp / (4.0 * np.pi)) * 2.0 * abserr
    if value != 0.0 and err > 100.0 * tol * abs(value):
        raise QuadratureToleranceError(
            "kernel quadrature error %.3e exceeds tolerance at sigma=%.3e"
            % (err / abs(value), s)
        )
    return KernelEval(value=value, method="quadrature", estimated_error=err)


def expansion_remainder(r, z, rp, zp):
    """Bounded remainder of the near-coincidence kernel expansion.

    Returns l = [K - (sqrt(r r')/2 pi)(log(1/sigma) + log(1 + sqrt(sigma^2+1)))]
    / sqrt(r r'). The leading terms capture the logarithmic blowup, so l
    stays bounded down to sigma = 0 (limit (log 2 - 2)/(2 pi)) and decays
    for well-separated points. Accepts scalars or arrays.
    """
    s = sigma(r, z, rp, zp)
    if np.any(np.asarray(s) == 0.0):
        raise SingularEvaluationError("remainder evaluated at coincident points")
    val, _ = _elliptic_kernel(r, z, rp, zp)
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    root = np.sqrt(r * rp)
    lead = (root / TWO_PI) * (np.log(1.0 / s) + np.log(1.0 + np.sqrt(s * s + 1.0)))
    out = (val - lead) / root
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# grid operator


def _log_mean_rect(x0, x1, y0, y1):
    """Exact mean of log(1/rho) over the rectangle [x0,x1] x [y0,y1].

    rho is the distance to the origin. Uses the antiderivative

        F(x, y) = x y log sqrt(x^2+y^2) - 3/2 x y
                  + x^2/2 atan(y/x) + y^2/2 atan(x/y)

    whose mixed second derivative is log sqrt(x^2+y^2); the singularity at
    the origin is integrable and F extends continuously by 0. All inputs
    may be arrays of matching shape.
    """

    def atan_ratio(num, den):
        # plain arctan(num/den) with the vertical-line limit at den = 0;
        # arctan2 would pick the wrong branch for negative den
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.arctan(num / den)
        out = np.where(den == 0.0, np.sign(num) * (0.5 * np.pi), out)
        return np.where((num == 0.0) & (den == 0.0), 0.0, out)

    def F(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        rho2 = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            logterm = x * y * 0.5 * np.log(rho2)
        # 0 * log rho = 0 on the axes and at the origin
        logterm = np.where(x * y == 0.0, 0.0, logterm)
        return (logterm - 1.5 * x * y
                + 0.5 * x * x * atan_ratio(y, x)
                + 0.5 * y * y * atan_ratio(x, y))

    x0, x1, y0, y1 = np.broadcast_arrays(
        np.asarray(x0, dtype=float), np.asarray(x1, dtype=float),
        np.asarray(y0, dtype=float), np.asarray(y1, dtype=float))
    area = (x1 - x0) * (y1 - y0)
    integral = F(x1, y1) - F(x1, y0) - F(x0, y1) + F(x0, y0)
    out = -integral / area
    return float(out) if out.ndim == 0 else out


def build_kernel_block(spec, ncorr=2):
    """Tabulate cell-to-cell kernel values K[i_target, i_source, |dj|].

    The z-translation invariance of the kernel collapses the table to the
    z-offset magnitude. Entries with source and target within ncorr cells
    of each other (and the self entry) replace the midpoint value of the
    logarithmic part by its exact average over the source cell, which is
    what keeps the near-diagonal of the discretized operator second-order
    despite the log singularity.
    """
    r = spec.r_centers
    dz = spec.dz
    dr = spec.dr
    n_r, n_z = spec.n_r, spec.n_z
    block = np.empty((n_r, n_r, n_z))
    rt = r[:, None]
    rs = r[None, :]
    for dj in range(n_z):
        val, _ = _elliptic_kernel(rt, 0.0, rs, dj * dz)
        if dj == 0:
            np.fill_diagonal(val, 0.0)
        block[:, :, dj] = val

    # near-diagonal correction: average the log(1/distance) part over the
    # offset source cell instead of evaluating it at the cell center
    root = np.sqrt(rt * rs)
    for dj in range(min(ncorr, n_z - 1) + 1):
        for di in range(-ncorr, ncorr + 1):
            if abs(di) > n_r - 1:
                continue
            x0 = di * dr - 0.5 * dr
            y0 = dj * dz - 0.5 * dz
            if di == 0 and dj == 0:
                continue
            avg = _log_mean_rect(x0, x0 + dr, y0, y0 + dz)
            dist = np.hypot(di * dr, dj * dz)
            corr = (avg - np.log(1.0 / dist)) / TWO_PI
            if di >= 0:
                idx_t = np.arange(0, n_r - di)
            else:
                idx_t = np.arange(-di, n_r)
            idx_s = idx_t + di
            block[idx_t, idx_s, dj] += root[idx_t, idx_s] * corr

    # self cell: near-coincidence law K ~ (r/2 pi)(log(8 r / rho) - 2)
    # averaged exactly in rho over the cell
    avg_self = _log_mean_rect(-0.5 * dr, 0.5 * dr, -0.5 * dz, 0.5 * dz)
    ii = np.arange(n_r)
    block[ii, ii, 0] = (r / TWO_PI) * (avg_self + np.log(8.0 * r) - 2.0)
    return block


class StreamOperator:
    """psi0 = K zeta on a fixed grid, applied by FFT convolution in z.

    The weighted kernel table A[a, b, dj] = K[a, b, dj] * nu(cell b) is
    zero-padded to length 2 n_z in the offset index and transformed once;
    each application is then a batch of length-2 n_z circular convolutions,
    exact for the linear convolution because of the padding. The transform
    of an even table is real, so only the real part is stored.
    """

    def __init__(self, spec, ncorr=2, keep_block=False):
        self.spec = spec
        self.ncorr = ncorr
        block = build_kernel_block(spec, ncorr=ncorr)
        self.block = block if keep_block else None
        w = spec.r_centers * spec.cell_area
        nfft = 2 * spec.n_z
        weighted = block * w[None, :, None]
        ker = np.zeros((spec.n_r, spec.n_r, nfft))
        ker[:, :, : spec.n_z] = weighted
        ker[:, :, nfft - spec.n_z + 1:] = weighted[:, :, 1:][:, :, ::-1]
        del weighted
        self._kf = np.fft.rfft(ker, axis=2).real
        self._nfft = nfft

    def apply(self, values):
        """Apply to an (n_r, n_z) array of cell values, returning psi0."""
        n_z = self.spec.n_z
        pad = np.zeros((self.spec.n_r, self._nfft))
        pad[:, :n_z] = values
        vhat = np.fft.rfft(pad, axis=1)
        phat = np.einsum("abf,bf->af", self._kf, vhat)
        out = np.fft.irfft(phat, n=self._nfft, axis=1)[:, :n_z]
        return out

    def apply_direct(self, values):
        """Slow reference: explicit summation over source cells. Only
        available when constructed with keep_block=True."""
        if self.block is None:
            raise ConsistencyError("operator was built without keep_block")
        spec = self.spec
        w = spec.r_centers * spec.cell_area
        out = np.zeros((spec.n_r, spec.n_z))
        jj = np.arange(spec.n_z)
        for i_s in range(spec.n_r):
            for j_s in range(spec.n_z):
                zv = values[i_s, j_s]
                if zv == 0.0:
                    continue
                out += self.block[:, i_s, np.abs(jj - j_s)] * (zv * w[i_s])
        return out


_OPERATOR_CACHE = {}


def get_stream_operator(spec, ncorr=2):
    """Shared per-grid operator instance (the kernel table is the
    expensive part; one table serves every solve on the grid)."""
    key = (spec.r_min, spec.r_max, spec.z_min, spec.z_max,
           spec.n_r, spec.n_z, ncorr)
    op = _OPERATOR_CACHE.get(key)
    if op is None:
        op = StreamOperator(spec, ncorr=ncorr)
        _OPERATOR_CACHE[key] = op
    return op


def apply_stream_operator(zeta, support=None):
    """psi0 = K zeta for a nonnegative vorticity field.

    support, when given, is a boolean mask (or iterable of (i, j) pairs)
    asserting where zeta may be nonzero; a nonzero cell outside it raises
    ConsistencyError. The returned field is strictly positive wherever
    zeta is not identically zero.
    """
    vals = zeta.values
    if np.any(vals < 0):
        raise ConfigurationError("stream operator expects zeta >= 0")
    if support is not None:
        mask = np.zeros(vals.shape, dtype=bool)
        sup = np.asarray(support)
        if sup.dtype == bool and sup.shape == vals.shape:
            mask = sup
        else:
            for i, j in support:
                mask[int(i), int(j)] = True
        if np.any((vals > 0) & ~mask):
            raise ConsistencyError("support set omits a nonzero cell")
    op = get_stream_operator(zeta.spec)
    return ScalarField(zeta.spec, op.apply(vals))


# ---------------------------------------------------------------------------
# finite-difference cross-check


def default_extended_box(spec, margin_factor=3.0, cells_per_unit=42.0,
                         max_cells=900):
    """Build the enlarged grid fd_solve uses.

    The box keeps a margin of margin_factor times the diagonal of the
    source domain on the outer sides, is symmetric in z, and starts at the
    axis offset r_min/8 where the solution is pinned to zero.
    """
    diam = float(np.hypot(spec.r_max - spec.r_min, spec.z_max - spec.z_min))
    margin = margin_factor * diam
    r_axis = spec.r_min / 8.0
    r_hi = spec.r_max + margin
    z_half = max(abs(spec.z_min), abs(spec.z_max)) + margin
    n_r = int(min(max_cells, np.ceil((r_hi - r_axis) * cells_per_unit)))
    n_z = int(min(max_cells, np.ceil(2.0 * z_half * cells_per_unit)))
    if n_z % 2:
        n_z += 1
    return build_grid(r_axis, r_hi, -z_half, z_half, n_r, n_z)


def _resample_conservative(zeta, ext):
    """Piecewise-constant transfer of zeta onto the extended grid with a
    global rescale that preserves the nu-integral exactly."""
    src = zeta.spec
    vals = np.zeros((ext.n_r, ext.n_z))
    rs = ext.r_centers
    zs = ext.z_centers
    ri = np.floor((rs - src.r_min) / src.dr).astype(int)
    zj = np.floor((zs - src.z_min) / src.dz).astype(int)
    ok_r = (ri >= 0) & (ri < src.n_r)
    ok_z = (zj >= 0) & (zj < src.n_z)
    ir = np.where(ok_r)[0]
    jz = np.where(ok_z)[0]
    if ir.size and jz.size:
        vals[np.ix_(ir, jz)] = zeta.values[np.ix_(ri[ir], zj[jz])]
    total_src = integrate_nu(zeta)
    out = ScalarField(ext, vals)
    total_ext = integrate_nu(out)
    if total_ext > 0.0 and total_src > 0.0:
        out.values *= total_src / total_ext
    return out


def fd_solve(zeta, box=None, margin_factor=3.0, cells_per_unit=42.0):
    """Solve L psi0 = zeta by second-order finite differences on a large
    box with zero Dirichlet data on its boundary and at the axis offset.

    zeta lives on the (small) solve grid and is extended by zero. Returns
    psi0 on the extended grid. Independent of the kernel table in every
    respect, which is what makes it useful as a cross-check.
    """
    if box is None:
        box = default_extended_box(zeta.spec, margin_factor=margin_factor,
                                   cells_per_unit=cells_per_unit)
    else:
        if not (box.r_min < zeta.spec.r_min and box.r_max > zeta.spec.r_max
                and box.z_min < zeta.spec.z_min and box.z_max > zeta.spec.z_max):
            raise ConfigurationError("extended box must strictly contain the source domain")
    src = _resample_conservative(zeta, box)

    n_r, n_z = box.n_r, box.n_z
    hr, hz = box.dr, box.dz
    r = box.r_centers
    a_plus = r / ((r + 0.5 * hr) * hr * hr)
    a_minus = r / ((r - 0.5 * hr) * hr * hr)
    b = 1.0 / (hz * hz)

    # unknowns ordered row-major (i * n_z + j); the r^2-scaled operator
    # -r d/dr((1/r) d/dr psi) - d^2 psi/dz^2 = r^2 zeta gives an M-matrix
    diag = np.repeat(a_plus + a_minus, n_z) + 2.0 * b
    # ghost-cell Dirichlet: reflected ghost adds the face coefficient back
    # onto the diagonal
    diag_2d = diag.reshape(n_r, n_z)
    diag_2d[0, :] += a_minus[0]
    diag_2d[-1, :] += a_plus[-1]
    diag_2d[:, 0] += b
    diag_2d[:, -1] += b

    off_rp = np.repeat(-a_plus[:-1], n_z)
    off_rm = np.repeat(-a_minus[1:], n_z)
    off_z = np.full(n_r * n_z - 1, -b)
    off_z[n_z - 1::n_z] = 0.0  # no coupling across the row boundary

    A = sparse.diags(
        [diag, off_rp, off_rm, off_z, off_z],
        [0, n_z, -n_z, 1, -1],
        format="csc",
    )
    rhs = (src.values * (r * r)[:, None]).ravel()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        psi = spsolve(A, rhs)
    if not np.all(np.isfinite(psi)):
        raise NumericalError("finite-difference solve produced non-finite values")
    return ScalarField(box, psi.reshape(n_r, n_z))


def restrict_to_grid(fext, spec):
    """Sample a field on the extended grid at the cell centers of the
    solve grid (bilinear interpolation)."""
    return ScalarField(spec, _bilinear(fext, spec.r_centers[:, None],
                                       spec.z_centers[None, :]))


def _bilinear(fld, r, z):
    """Bilinear interpolation of a ScalarField at points (r, z)."""
    sp = fld.spec
    gi = (np.asarray(r) - sp.r_min) / sp.dr - 0.5
    gj = (np.asarray(z) - sp.z_min) / sp.dz - 0.5
    i0 = np.clip(np.floor(gi).astype(int), 0, sp.n_r - 2)
    j0 = np.clip(np.floor(gj).astype(int), 0, sp.n_z - 2)
    fr = np.clip(gi - i0, 0.0, 1.0)
    fz = np.clip(gj - j0, 0.0, 1.0)
    v = fld.values
    out = ((1 - fr) * (1 - fz) * v[i0, j0]
           + fr * (1 - fz) * v[i0 + 1, j0]
           + (1 - fr) * fz * v[i0, j0 + 1]
           + fr * fz * v[i0 + 1, j0 + 1])
    return out
