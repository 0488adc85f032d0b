"""Cell-centered grids on the meridional half-plane and fields on them.

The working coordinates are (r, z) with r > 0 the distance to the symmetry
axis. All integrals use the measure nu = r dr dz, which is the planar
measure weighted by the ring circumference factor (up to 2 pi, which the
formulation absorbs). Grids are uniform and cell-centered so nothing is
ever evaluated on the axis r = 0.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GridMismatchError


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centered grid on [r_min, r_max] x [z_min, z_max].

    Cell (i, j) has center (r_min + (i + 1/2) dr, z_mid + (j + 1/2 - n_z/2) dz)
    with z_mid the midpoint of the z-extent. Writing the z centers relative
    to the midpoint keeps them exactly symmetric in floating point whenever
    the extent is symmetric, which the symmetrization step relies on.
    """

    r_min: float
    r_max: float
    z_min: float
    z_max: float
    n_r: int
    n_z: int

    @property
    def dr(self):
        return (self.r_max - self.r_min) / self.n_r

    @property
    def dz(self):
        return (self.z_max - self.z_min) / self.n_z

    @property
    def r_centers(self):
        return self.r_min + (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def z_centers(self):
        z_mid = 0.5 * (self.z_min + self.z_max)
        return z_mid + (np.arange(self.n_z) + 0.5 - self.n_z / 2) * self.dz

    @property
    def cell_area(self):
        return self.dr * self.dz

    def nu_weights(self):
        """Per-cell nu-measure as an (n_r, n_z) array: r_i * dr * dz."""
        w = self.r_centers * self.cell_area
        return np.repeat(w[:, None], self.n_z, axis=1)

    def z_symmetric(self):
        """True when the z-extent is centered on 0 with an even cell count,
        so that cells pair exactly under z -> -z."""
        return self.n_z % 2 == 0 and self.z_min == -self.z_max

    def same_as(self, other):
        return (
            self.r_min == other.r_min
            and self.r_max == other.r_max
            and self.z_min == other.z_min
            and self.z_max == other.z_max
            and self.n_r == other.n_r
            and self.n_z == other.n_z
        )


def build_grid(r_min, r_max, z_min, z_max, n_r, n_z):
    """Validate bounds and return a GridSpec.

    Raises ConfigurationError when the extent is empty, the radial strip
    touches the axis, or a cell count is below 2.
    """
    if not (0.0 < r_min < r_max):
        raise ConfigurationError(
            "need 0 < r_min < r_max, got r_min=%r r_max=%r" % (r_min, r_max)
        )
    if not (z_min < z_max):
        raise ConfigurationError(
            "need z_min < z_max, got z_min=%r z_max=%r" % (z_min, z_max)
        )
    if n_r < 2 or n_z < 2:
        raise ConfigurationError(
            "need n_r, n_z >= 2, got n_r=%r n_z=%r" % (n_r, n_z)
        )
    return GridSpec(float(r_min), float(r_max), float(z_min), float(z_max),
                    int(n_r), int(n_z))


@dataclass
class ScalarField:
    """A real field stored cell-wise on a GridSpec.

    values has shape (n_r, n_z), index (i, j) for the (r, z) cell.
    """

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.spec.n_r, self.spec.n_z):
            raise GridMismatchError(
                "field shape %s does not match grid (%d, %d)"
                % (self.values.shape, self.spec.n_r, self.spec.n_z)
            )
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("field contains non-finite values")

    def copy(self):
        return ScalarField(self.spec, self.values.copy())


def zeros_like_grid(spec):
    return ScalarField(spec, np.zeros((spec.n_r, spec.n_z)))


def field_from_function(spec, fn):
    """Sample fn(r, z) at cell centers (fn must broadcast over arrays)."""
    rr = spec.r_centers[:, None]
    zz = spec.z_centers[None, :]
    return ScalarField(spec, np.asarray(fn(rr, zz), dtype=float)
                       * np.ones((spec.n_r, spec.n_z)))


def _check_same_grid(a, b):
    if not a.spec.same_as(b.spec):
        raise GridMismatchError("fields live on different grids")


def integrate_nu(f):
    """Midpoint-rule integral of f against nu = r dr dz.

    Exact for integrands constant or linear in r on each cell column.
    The summation order is fixed (flattened C order) so repeated runs
    give bit-identical results.
    """
    return float(np.sum(f.values * f.spec.nu_weights()))


def inner_nu(a, b):
    """The nu-weighted inner product integral of a*b."""
    _check_same_grid(a, b)
    return float(np.sum(a.values * b.values * a.spec.nu_weights()))


def integrate_planar(f):
    """Integral of f against the unweighted planar measure dr dz."""
    return float(np.sum(f.values) * f.spec.cell_area)


def dump_field_csv(f, path):
    """Write a field as CSV rows r,z,value (row-major over cells).

    path may be a filesystem path or an open text stream.
    """
    rs = f.spec.r_centers
    zs = f.spec.z_centers

    def emit(fh):
        fh.write("r,z,value\n")
        for i in range(f.spec.n_r):
            for j in range(f.spec.n_z):
                fh.write("%.17g,%.17g,%.17g\n" % (rs[i], zs[j], f.values[i, j]))

    if hasattr(path, "write"):
        emit(path)
    else:
        with open(path, "w") as fh:
            emit(fh)


def load_field_csv(spec, path):
    """Read a field written by dump_field_csv back onto a known grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.shape[0] != spec.n_r * spec.n_z:
        raise GridMismatchError(
            "csv has %d rows, grid wants %d" % (data.shape[0], spec.n_r * spec.n_z)
        )
    vals = data[:, 2].reshape(spec.n_r, spec.n_z)
    return ScalarField(spec, vals)
