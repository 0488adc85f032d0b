# ring_kernel.py
# The stream kernel of a circular vortex filament: closed form versus
# direct quadrature, the analytic bound, and the short-distance expansion.
#
# Run from the repository root:  python3 demos/ring_kernel.py

import numpy as np

from vortexring.greens import (expansion_remainder, kernel_bound,
                               kernel_closed_form, kernel_quadrature, sigma)

# Two points in the meridional half-plane. K(r, z, r', z') is the stream
# function at (r, z) induced by a unit ring through (r', z').
r, z = 1.0, 0.0
rp, zp = 1.2, 0.3

closed = kernel_closed_form(r, z, rp, zp)
quad = kernel_quadrature(r, z, rp, zp)
print("closed form   K = %.15f" % closed.value)
print("quadrature    K = %.15f  (estimated error %.1e)"
      % (quad.value, quad.estimated_error))
print("relative diff   = %.2e" % (abs(closed.value - quad.value)
                                  / quad.value))

# The normalized separation sigma = dist / sqrt(4 r r') controls
# everything: the kernel depends on the two points only through sigma and
# the product r r'.
print("\nsigma = %.4f" % sigma(r, z, rp, zp))

# An elementary bound with the same sigma-dependence. The 1/(2 pi)
# version holds at every separation; the tighter 1/(4 pi) version is only
# valid once sigma is not small, which the table below makes visible.
print("\n%8s %12s %12s %12s" % ("sigma", "K", "bound/2pi", "bound/4pi"))
for zp_near in (2.0, 0.8, 0.3, 0.1, 0.03, 0.01):
    k = kernel_closed_form(r, z, r, zp_near).value
    b2 = kernel_bound(r, z, r, zp_near, coef=0.5)
    b4 = kernel_bound(r, z, r, zp_near, coef=0.25)
    s = sigma(r, z, r, zp_near)
    flag = "" if k <= b4 else "   <- exceeds the 4 pi form"
    print("%8.4f %12.6f %12.6f %12.6f%s" % (s, k, b2, b4, flag))

# Near coincidence the kernel behaves like
#     sqrt(r r') / (2 pi) * [log(1/sigma) + log(1 + sqrt(1 + sigma^2))]
# plus a bounded remainder; the remainder tends to (log 2 - 2) / (2 pi)
# as the points merge.
print("\nremainder l(r, z, r', z') as the points approach:")
for dz in (0.3, 0.1, 0.01, 1e-4, 1e-6):
    rem = expansion_remainder(r, z, r, z + dz)
    print("  dz = %-8g l = %.8f" % (dz, rem))
print("coincidence value (log 2 - 2) / (2 pi) = %.8f"
      % ((np.log(2.0) - 2.0) / (2.0 * np.pi)))
