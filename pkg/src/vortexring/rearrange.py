"""Discrete rearrangement tools: a capped bathtub maximizer and Steiner
symmetrization in z.

Both are used inside the solver and exposed as standalone, property-tested
operations. The bathtub problem here is

    maximize sum_i w_i h_i om_i  over 0 <= om_i <= 1, sum_i w_i om_i <= cap,

whose solution fills super-level sets of h down to a level, with freedom
only on the level set itself; the symmetrization redistributes each
r-column of a field so it is even in z and nonincreasing in |z|, exactly
preserving the column's value multiset.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grid import ScalarField


@dataclass
class MeasureSpace:
    """Weighted atoms (w_i > 0, h_i) with a capacity 0 < cap < sum w_i."""

    weights: np.ndarray
    values: np.ndarray
    capacity: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.weights.size == 0:
            raise ConfigurationError("bathtub needs at least one atom")
        if self.weights.shape != self.values.shape or self.weights.ndim != 1:
            raise ConfigurationError("weights and values must be matching 1-d arrays")
        if np.any(self.weights <= 0):
            raise ConfigurationError("atom weights must be strictly positive")
        if not (0.0 < self.capacity < float(np.sum(self.weights))):
            raise ConfigurationError("capacity must lie in (0, total weight)")


@dataclass
class BathtubSolution:
    """Fill fractions per atom, the fill level, and the optimal value."""

    omega: np.ndarray
    level: float
    value: float


def bathtub_maximize(space):
    """Exact solution of the capped, mass-constrained linear maximization.

    The level is the smallest t at which the super-level weight drops to
    the capacity; atoms strictly above max(0, level) fill completely,
    atoms on the level set share the residual capacity proportionally to
    weight, and nothing below 0 ever fills.
    """
    h = space.values
    w = space.weights
    cap = space.capacity
    order = np.argsort(-h, kind="stable")
    cum = np.cumsum(w[order])
    j = int(np.searchsorted(cum, cap, side="right"))
    # cap < total weight so j is a valid index; the level is the value at
    # which cumulative weight first exceeds the capacity
    level = float(h[order[j]])

    omega = np.zeros_like(h)
    eff = max(level, 0.0)
    above = h > eff
    omega[above] = 1.0
    used = float(np.sum(w[above]))
    if level > 0.0:
        on_level = h == level
        level_weight = float(np.sum(w[on_level]))
        residual = max(cap - used, 0.0)
        if level_weight > 0.0:
            omega[on_level] = min(residual / level_weight, 1.0)
    value = float(np.sum(w * h * omega))
    return BathtubSolution(omega=omega, level=level, value=value)


def steiner_symmetrize_z(zeta):
    """Rearrange each r-column of a nonnegative field to be even in z and
    nonincreasing in |z|.

    Values sort descending into z-slots center-out, negative side first:
    the largest value lands just below z = 0, the next just above, and so
    on outward. Ties pair across z = 0, so a column whose values come in
    equal pairs ends up exactly even. The multiset of each column is
    preserved, hence so is every integral of the form sum phi(r, zeta).
    """
    spec = zeta.spec
    if not spec.z_symmetric():
        raise ConfigurationError(
            "symmetrization needs an even cell count on a z-interval centered at 0"
        )
    if np.any(zeta.values < 0):
        raise ConfigurationError("symmetrization expects a nonnegative field")
    n = spec.n_z
    half = n // 2
    order = np.empty(n, dtype=int)
    m = np.arange(half)
    order[0::2] = half - 1 - m
    order[1::2] = half + m
    sorted_desc = -np.sort(-zeta.values, axis=1)
    out = np.empty_like(sorted_desc)
    out[:, order] = sorted_desc
    return ScalarField(spec, out)
