# stream_operator.py
# The grid stream operator psi0 = K zeta two ways: kernel summation (the
# solver's fast path) against a finite-difference solve of the
# axisymmetric elliptic operator on a padded box.
#
# Run from the repository root:  python3 demos/stream_operator.py

import numpy as np

from vortexring.greens import (apply_stream_operator, default_extended_box,
                               fd_solve, restrict_to_grid)
from vortexring.grid import ScalarField, build_grid

# A uniform patch of potential vorticity on the solver's working box.
spec = build_grid(0.5, 2.0, -1.0, 1.0, 64, 64)
rr = spec.r_centers[:, None]
zz = spec.z_centers[None, :]
patch = ScalarField(spec, np.where(np.hypot(rr - 1.0, zz) <= 0.25, 1.0, 0.0))

# Fast path: tabulated ring kernel, applied by FFT convolution in z.
psi_kernel = apply_stream_operator(patch)
print("kernel apply:  max psi0 = %.6f" % np.max(psi_kernel.values))

# Reference path: second-order finite differences for
#     -(1/r) d/dr((1/r) d psi/dr) - (1/r^2) d^2 psi/dz^2 = zeta
# with psi = 0 on the boundary of a much larger box, then restriction
# back to the working grid.
for margin in (2.0, 4.0):
    box = default_extended_box(spec, margin_factor=margin,
                               cells_per_unit=30.0, max_cells=1200)
    psi_fd = restrict_to_grid(fd_solve(patch, box=box), spec)
    err = np.sqrt(np.sum((psi_fd.values - psi_kernel.values) ** 2)
                  / np.sum(psi_kernel.values ** 2))
    print("fd on %3dx%3d box (margin %g): rel L2 difference %.4f"
          % (box.n_r, box.n_z, margin, err))

# The fd answer approaches the kernel answer as the box grows because the
# only modeling difference is the artificial psi = 0 wall: the kernel
# already encodes decay at infinity.
print("\nthe disagreement shrinks as the wall moves out; the kernel path")
print("needs no wall at all, which is why the solver iterates with it")
