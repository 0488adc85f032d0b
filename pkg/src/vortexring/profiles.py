"""Vorticity profile generators and their convex conjugates.

A generator pair (f, g) fixes the relation between the stream function and
the vorticity through

    i(r, t) = g(t) + f(t) / r^2,    i(r, t) = 0 for t <= 0,

with f feeding the swirl through H (H H' = f, H(0) = 0) and g the Bernoulli
part. The energy penalty uses the modified conjugate

    J(r, s) = sup_t [s t - I(r, t)]  for s >= 0,  J = 0 for s < 0,

where I is the t-primitive of i. The maps i(r, .) and dJds(r, .) are
inverse graphs of each other, which is what the pointwise solver update
relies on.

Four closed-form families are built in; a table-backed generator covers
everything else through the numeric conjugate path.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

_FAMILIES = ("power_law", "turkington", "beltrami", "mixed", "table")


@dataclass
class GeneratorPair:
    """A profile family with vectorized evaluators.

    family is one of power_law(p), turkington(alpha), beltrami(p),
    mixed(p), or table (piecewise-linear f, g given on a t-grid).
    g0plus is the jump of g at 0+, nonzero only for turkington-type
    generators; it sets the lower edge of the admissible cap parameter.
    """

    family: str
    p: float = 1.0
    alpha: float = 1.0
    table_t: np.ndarray | None = field(default=None, repr=False)
    table_f: np.ndarray | None = field(default=None, repr=False)
    table_g: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigurationError("unknown generator family %r" % self.family)
        if self.family in ("power_law", "beltrami", "mixed") and self.p <= 0:
            raise ConfigurationError("power p must be positive")
        if self.family == "turkington" and self.alpha <= 0:
            raise ConfigurationError("turkington alpha must be positive")
        if self.family == "table":
            t = np.asarray(self.table_t, dtype=float)
            f = np.asarray(self.table_f, dtype=float)
            g = np.asarray(self.table_g, dtype=float)
            if t.ndim != 1 or t.size < 2 or f.shape != t.shape or g.shape != t.shape:
                raise ConfigurationError("table generator needs matching 1-d t,f,g")
            if np.any(np.diff(t) <= 0) or t[0] < 0:
                raise ConfigurationError("table t-grid must be increasing and >= 0")
            object.__setattr__(self, "table_t", t)
            object.__setattr__(self, "table_f", f)
            object.__setattr__(self, "table_g", g)
            # cumulative primitives for I and H on the table grid
            df = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))])
            dg = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))])
            self._f_prim = df
            self._g_prim = dg

    @property
    def g0plus(self):
        """Jump of g at 0+ (right limit; g(0) itself is irrelevant)."""
        if self.family == "turkington":
            return self.alpha
        if self.family == "table":
            return float(self.table_g[0]) if self.table_t[0] == 0.0 else float(
                np.interp(0.0, self.table_t, self.table_g))
        return 0.0

    @property
    def has_swirl(self):
        if self.family == "power_law":
            return False
        if self.family == "table":
            return bool(np.any(self.table_f > 0))
        return True

    # -- raw pair ----------------------------------------------------------

    def f(self, t):
        t = np.asarray(t, dtype=float)
        tp = np.maximum(t, 0.0)
        if self.family == "power_law":
            out = np.zeros_like(tp)
        elif self.family == "turkington":
            out = tp
        elif self.family in ("beltrami", "mixed"):
            out = tp ** self.p
        else:
            out = np.where(t > 0, np.interp(tp, self.table_t, self.table_f), 0.0)
        return float(out) if out.ndim == 0 else out

    def g(self, t):
        t = np.asarray(t, dtype=float)
        tp = np.maximum(t, 0.0)
        if self.family == "power_law":
            out = tp ** self.p
        elif self.family == "turkington":
            out = np.where(t > 0, self.alpha, 0.0)
        elif self.family == "beltrami":
            out = np.zeros_like(tp)
        elif self.family == "mixed":
            out = tp ** self.p
        else:
            out = np.where(t > 0, np.interp(tp, self.table_t, self.table_g), 0.0)
        return float(out) if out.ndim == 0 else out


def eval_i(gen, r, t):
    """i(r, t) = g(t) + f(t)/r^2, zero for t <= 0, right-continuous
    branch for t > 0 when g jumps at the origin."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigurationError("i(r, t) needs r > 0")
    t = np.asarray(t, dtype=float)
    out = np.where(t > 0, gen.g(t) + gen.f(t) / (r * r), 0.0)
    out = out * np.ones(np.broadcast(r, t).shape)
    return float(out) if out.ndim == 0 else out


def eval_I(gen, r, t):
    """Primitive of i in t with I(r, 0) = 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigurationError("I(r, t) needs r > 0")
    t = np.asarray(t, dtype=float)
    tp = np.maximum(t, 0.0)
    p = gen.p
    if gen.family == "power_law":
        out = tp ** (p + 1.0) / (p + 1.0)
    elif gen.family == "turkington":
        out = gen.alpha * tp + tp * tp / (2.0 * r * r)
    elif gen.family == "beltrami":
        out = tp ** (p + 1.0) / ((p + 1.0) * r * r)
    elif gen.family == "mixed":
        out = tp ** (p + 1.0) / (p + 1.0) * (1.0 + 1.0 / (r * r))
    else:
        gp = np.interp(tp, gen.table_t, gen._g_prim)
        fp = np.interp(tp, gen.table_t, gen._f_prim)
        # linear extension beyond the table end
        t_end = gen.table_t[-1]
        over = np.maximum(tp - t_end, 0.0)
        gp = gp + over * gen.table_g[-1]
        fp = fp + over * gen.table_f[-1]
        out = gp + fp / (r * r)
    out = out * np.ones(np.broadcast(r, t).shape)
    return float(out) if out.ndim == 0 else out


def eval_J(gen, r, s):
    """Closed-form conjugate per family; table generators fall through to
    the numeric path (scalar golden-section per evaluation)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigurationError("J(r, s) needs r > 0")
    s = np.asarray(s, dtype=float)
    sp = np.maximum(s, 0.0)
    p = gen.p
    if gen.family == "power_law":
        out = p / (p + 1.0) * sp ** (1.0 + 1.0 / p)
    elif gen.family == "turkington":
        out = 0.5 * np.maximum(s - gen.alpha, 0.0) ** 2 * r * r
    elif gen.family == "beltrami":
        out = p / (p + 1.0) * r ** (2.0 / p) * sp ** (1.0 + 1.0 / p)
    elif gen.family == "mixed":
        out = p / (p + 1.0) * (r * r / (r * r + 1.0)) ** (1.0 / p) \
            * sp ** (1.0 + 1.0 / p)
    else:
        fn = np.vectorize(lambda rr, ss: eval_J_numeric(gen, rr, ss))
        out = np.asarray(fn(r, sp), dtype=float)
    out = out * np.ones(np.broadcast(r, s).shape)
    return float(out) if out.ndim == 0 else out


def eval_J_numeric(gen, r, s, t_max=None, n=64):
    """Conjugate by direct maximization of s t - I(r, t) over t >= 0.

    The objective is concave in t (its derivative s - i(r, t) is
    nonincreasing), so a coarse scan plus golden-section refinement is
    exact to the requested precision. When t_max is not given it doubles
    until the derivative is negative there; a given t_max that fails to
    bracket the sup raises ConfigurationError.
    """
    if s < 0:
        return 0.0
    if s == 0.0:
        return 0.0
    if t_max is None:
        t_max = 1.0
        for _ in range(200):
            if s - eval_i(gen, r, t_max) < 0:
                break
            t_max *= 2.0
        else:
            raise ConfigurationError("conjugate sup not bracketed (i too flat)")
    else:
        if s - eval_i(gen, r, t_max) >= 0:
            raise ConfigurationError("given t_max does not bracket the sup")

    def obj(t):
        return s * t - eval_I(gen, r, t)

    ts = np.linspace(0.0, t_max, n)
    vals = np.array([obj(t) for t in ts])
    k = int(np.argmax(vals))
    lo = ts[max(k - 1, 0)]
    hi = ts[min(k + 1, n - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(120):
        if b - a < 1e-13 * (1.0 + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = obj(d)
    return max(obj(0.5 * (a + b)), vals[k], 0.0)


def eval_dJds(gen, r, s):
    """Derivative of the conjugate in s, the inverse graph of i(r, .).

    Closed forms per family; the generic fallback inverts the monotone
    i(r, .) by bisection, so it is single-valued even across a jump of g.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigurationError("dJds(r, s) needs r > 0")
    s = np.asarray(s, dtype=float)
    sp = np.maximum(s, 0.0)
    p = gen.p
    if gen.family == "power_law":
        out = sp ** (1.0 / p)
    elif gen.family == "turkington":
        out = np.maximum(s - gen.alpha, 0.0) * r * r
    elif gen.family == "beltrami":
        out = (r * r * sp) ** (1.0 / p)
    elif gen.family == "mixed":
        out = (r * r * sp / (r * r + 1.0)) ** (1.0 / p)
    else:
        fn = np.vectorize(lambda rr, ss: _invert_i(gen, rr, ss))
        out = np.asarray(fn(r, sp), dtype=float)
    out = out * np.ones(np.broadcast(r, s).shape)
    return float(out) if out.ndim == 0 else out


def _invert_i(gen, r, s):
    """Largest t with i(r, t) <= s, by doubling plus bisection."""
    if s <= 0:
        return 0.0
    hi = 1.0
    for _ in range(200):
        if eval_i(gen, r, hi) > s:
            break
        hi *= 2.0
    else:
        raise ConfigurationError("could not bracket the inverse of i")
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if eval_i(gen, r, mid) <= s:
            lo = mid
        else:
            hi = mid
    return lo


def eval_H(gen, t):
    """Swirl generator H(t) = sqrt(2 * integral_0^{t+} f), the nonnegative
    solution of H H' = f with H(0) = 0."""
    t = np.asarray(t, dtype=float)
    tp = np.maximum(t, 0.0)
    p = gen.p
    if gen.family == "power_law":
        out = np.zeros_like(tp)
    elif gen.family == "turkington":
        out = tp
    elif gen.family in ("beltrami", "mixed"):
        out = math.sqrt(2.0 / (p + 1.0)) * tp ** ((p + 1.0) / 2.0)
    else:
        fp = np.interp(tp, gen.table_t, gen._f_prim)
        over = np.maximum(tp - gen.table_t[-1], 0.0)
        fp = fp + over * gen.table_f[-1]
        out = np.sqrt(2.0 * fp)
    return float(out) if out.ndim == 0 else out


def make_generator(family, p=1.0, alpha=1.0, table=None, table_path=None):
    """Construct a GeneratorPair.

    family: power_law, turkington, beltrami, mixed, or table.
    table: (t, f, g) arrays for the table family; table_path: CSV with
    header t,f,g.
    """
    if family == "table":
        if table is None and table_path is None:
            raise ConfigurationError("table generator needs table or table_path")
        if table is None:
            data = np.loadtxt(table_path, delimiter=",", skiprows=1)
            table = (data[:, 0], data[:, 1], data[:, 2])
        t, f, g = table
        return GeneratorPair(family="table", table_t=np.asarray(t, dtype=float),
                             table_f=np.asarray(f, dtype=float),
                             table_g=np.asarray(g, dtype=float))
    return GeneratorPair(family=family, p=float(p), alpha=float(alpha))


def check_assumptions(gen, r_max=2.0, t_max=50.0, n_sample=200, seed=7):
    """Sampled verification of the structural assumptions on (f, g).

    (a1) f, g nonnegative and nondecreasing; (a2) i strictly increasing in
    t on (0, inf) and zero for t <= 0; (a3) existence of delta0 in (0, 1),
    delta1 >= 0 with I <= delta0 * i * t + delta1 * i on the sample; (a4)
    i(r, t) e^{-tau t} eventually decreasing to 0 along geometric t.

    Sampling cannot prove the universal statements; the report says which
    sampled checks passed and with which witnesses.
    """
    rng = np.random.default_rng(seed)
    ts = np.sort(rng.uniform(1e-6, t_max, n_sample))
    rs = rng.uniform(1e-3, r_max, 16)
    report = {}

    fv = np.asarray(gen.f(ts))
    gv = np.asarray(gen.g(ts))
    a1 = bool(np.all(fv >= -1e-14) and np.all(gv >= -1e-14)
              and np.all(np.diff(fv) >= -1e-10 * (1.0 + np.abs(fv[:-1])))
              and np.all(np.diff(gv) >= -1e-10 * (1.0 + np.abs(gv[:-1]))))
    report["a1"] = {"pass": a1}

    a2 = True
    for r in rs:
        iv = np.asarray(eval_i(gen, r, ts))
        if not np.all(np.diff(iv) > 0):
            a2 = False
            break
        if not np.all(np.asarray(eval_i(gen, r, -ts)) == 0.0):
            a2 = False
            break
    report["a2"] = {"pass": bool(a2)}

    found = None
    d0_grid = np.arange(0.1, 0.95, 0.1)
    d1_grid = np.array([0.0, 0.5, 1.0, 2.0, 5.0, 10.0])
    rr, tt = np.meshgrid(rs, ts, indexing="ij")
    iv = np.asarray(eval_i(gen, rr, tt))
    Iv = np.asarray(eval_I(gen, rr, tt))
    for d0 in d0_grid:
        for d1 in d1_grid:
            if np.all(Iv <= d0 * iv * tt + d1 * iv + 1e-12):
                found = (float(d0), float(d1))
                break
        if found:
            break
    report["a3"] = {"pass": found is not None, "witness": found}

    a4 = True
    t_seq = 2.0 ** np.arange(0, 16)
    for r in rs[:4]:
        for tau in (0.5, 1.0, 2.0):
            vals = np.asarray(eval_i(gen, r, t_seq)) * np.exp(-tau * t_seq)
            tail = vals[2:]
            if not (np.all(np.diff(tail) <= 1e-14) and tail[-1] <= 1e-6 * (1.0 + vals.max())):
                a4 = False
    report["a4"] = {"pass": bool(a4)}

    report["all_pass"] = all(report[k]["pass"] for k in ("a1", "a2", "a3", "a4"))
    return report
