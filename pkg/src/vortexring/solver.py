"""Constrained maximization of the ring energy over the capped vorticity
class.

The functional is

    E(zeta) = 1/2 <zeta, K zeta>_nu - (W/2) log(1/eps) int r^2 zeta dnu
              - eps^-2 int J(r, eps^2 zeta) dnu

over 0 <= zeta <= Lambda/eps^2 supported in the box D, with circulation
int zeta dnu <= kappa. Each outer step linearizes the quadratic kernel
term at the current iterate and solves the resulting separable concave
subproblem exactly: pointwise thresholding through the inverse graph of
the conjugate plus a bisection on the mass multiplier mu. Because the
kernel term is convex, every step is an ascent step on E, which the loop
asserts.

The optimality profile of the converged state is

    eps^2 zeta = Lambda        where psi >= dJds(r, Lambda),
    eps^2 zeta = i(r, psi)     where 0 < psi < dJds(r, Lambda),
    zeta = 0                   where psi < 0,

with psi = K zeta - (W r^2 / 2) log(1/eps) - mu, and freedom only on the
level set psi = 0 (the bathtub ledge), which is where generators with a
jump at the origin place their fractional cells.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NumericalError
from .grid import ScalarField, build_grid, integrate_nu, inner_nu
from .greens import get_stream_operator
from .profiles import check_assumptions, eval_dJds, eval_i, eval_J
from .rearrange import steiner_symmetrize_z


@dataclass
class ProblemConfig:
    """Physical and numerical parameters of one solve.

    The ring radius scale is r_star = kappa / (4 pi W) and the default
    domain is D = (r_star/2, 2 r_star) x (-1, 1). lambda_cap = None means
    40 * max(1, g(0+)), resolved once the generator is known.
    """

    epsilon: float
    kappa: float = 4.0 * np.pi
    W: float = 1.0
    lambda_cap: float | None = None
    n_r: int = 192
    n_z: int = 192
    tol_zeta: float = 1e-8
    tol_mu: float = 1e-10
    max_iterations: int = 500
    symmetrize: bool = True

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ConfigurationError(
                "epsilon must lie in (0, 1), got %r" % (self.epsilon,))
        if self.kappa <= 0 or self.W <= 0:
            raise ConfigurationError("kappa and W must be positive")
        if self.lambda_cap is not None and self.lambda_cap <= 0:
            raise ConfigurationError("lambda_cap must be positive")

    @property
    def r_star(self):
        return self.kappa / (4.0 * np.pi * self.W)

    @property
    def log_inv_eps(self):
        return float(np.log(1.0 / self.epsilon))

    @property
    def degenerate_epsilon(self):
        """Large-core regime: the solve still runs but the asymptotic
        diagnostics are unreliable."""
        return self.epsilon >= 0.5

    def domain_grid(self):
        rs = self.r_star
        return build_grid(0.5 * rs, 2.0 * rs, -1.0, 1.0, self.n_r, self.n_z)

    def resolved_lambda(self, gen):
        cap = self.lambda_cap
        if cap is None:
            cap = 40.0 * max(1.0, gen.g0plus)
        if cap <= max(1.0, gen.g0plus):
            raise ConfigurationError(
                "lambda_cap must exceed max(1, g(0+)) = %r"
                % (max(1.0, gen.g0plus),))
        return float(cap)


@dataclass
class SolveState:
    """One iterate: vorticity, its stream field, multiplier, and the
    shifted stream psi = psi0 - (W r^2/2) log(1/eps) - mu."""

    zeta: ScalarField
    psi0: ScalarField
    mu: float
    psi: ScalarField
    energy: float
    iteration: int


@dataclass
class SolveResult:
    """Final state plus the run record."""

    config: ProblemConfig
    gen: object
    state: SolveState
    converged: bool
    iterations: int
    energy_trace: np.ndarray = field(repr=False)
    kkt: float = np.nan
    patch_measure: float = np.nan
    mass: float = np.nan
    degenerate_epsilon: bool = False


def background_field(config, spec):
    """(W r^2 / 2) log(1/eps) sampled on the grid."""
    b = 0.5 * config.W * spec.r_centers ** 2 * config.log_inv_eps
    return np.repeat(b[:, None], spec.n_z, axis=1)


def energy(config, gen, zeta, psi0):
    """The three-term functional at (zeta, psi0 = K zeta)."""
    eps2 = config.epsilon ** 2
    kern = 0.5 * inner_nu(zeta, psi0)
    spec = zeta.spec
    r2 = spec.r_centers[:, None] ** 2
    impulse = float(np.sum(zeta.values * r2 * spec.nu_weights()))
    w = spec.nu_weights()
    u = eps2 * zeta.values
    nz = u > 0
    penalty = 0.0
    if np.any(nz):
        rr = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
        jvals = eval_J(gen, rr[nz], u[nz])
        penalty = float(np.sum(np.asarray(jvals) * w[nz]))
    return kern - 0.5 * config.W * config.log_inv_eps * impulse - penalty / eps2


def pointwise_update(config, gen, psi):
    """Exact maximizer of the linearized separable subproblem:
    eps^2 zeta = min(Lambda, i(r, psi_+)) cell by cell."""
    lam = config.resolved_lambda(gen)
    spec = psi.spec
    rr = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
    u = np.minimum(lam, eval_i(gen, rr, psi.values))
    return ScalarField(spec, u / config.epsilon ** 2)


def _mass_of_update(config, gen, lam, rc, wc, head):
    """Mass of the pointwise update on the candidate cells.

    head = psi0 - background; the update at multiplier mu only sees
    head - mu. Returns (mass, u-values)."""
    u = np.minimum(lam, eval_i(gen, rc, head))
    mass = float(np.sum(u * wc)) / config.epsilon ** 2
    return mass, u


def solve_mu(config, gen, psi0):
    """Multiplier and updated vorticity for one outer step.

    mass(mu) is nonincreasing (asserted); if the unconstrained update
    already fits the mass budget the multiplier is zero, otherwise mu is
    bisected on [0, max psi0]. Generators with a jump at the origin make
    mass(mu) a step function; once the bracket collapses, the cells
    sitting on the ledge psi = 0 are filled fractionally (proportional
    fill on the level set) so the mass constraint closes exactly.
    """
    spec = psi0.spec
    lam = config.resolved_lambda(gen)
    eps2 = config.epsilon ** 2
    bg = background_field(config, spec)
    head0 = psi0.values - bg
    w = spec.nu_weights()

    cand = head0 > 0.0
    rc = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)[cand]
    wc = w[cand]
    hc = head0[cand]

    def assemble(uc):
        vals = np.zeros(head0.shape)
        vals[cand] = uc / eps2
        return ScalarField(spec, vals)

    if hc.size == 0:
        return 0.0, assemble(np.zeros(0))

    mass0, u0 = _mass_of_update(config, gen, lam, rc, wc, hc)
    if mass0 <= config.kappa:
        return 0.0, assemble(u0)

    lo, lo_mass = 0.0, mass0
    hi = float(np.max(psi0.values))
    hi_mass, _ = _mass_of_update(config, gen, lam, rc, wc, hc - hi)
    if hi_mass > config.kappa:
        raise NumericalError(
            "mu bracket failure: mass at the upper bound is %.3e > kappa" % hi_mass)

    tol = config.tol_mu * config.kappa
    mu = hi
    for _ in range(300):
        mu = 0.5 * (lo + hi)
        m, u = _mass_of_update(config, gen, lam, rc, wc, hc - mu)
        if m > lo_mass + 1e-9 * (1.0 + lo_mass) or m < hi_mass - 1e-9 * (1.0 + hi_mass):
            raise NumericalError("mass(mu) failed to decrease monotonically")
        if abs(m - config.kappa) <= tol:
            return float(mu), _capped(assemble(u), config, lam)
        if m > config.kappa:
            lo, lo_mass = mu, m
        else:
            hi, hi_mass = mu, m
        if hi - lo <= 1e-17 * (1.0 + hi):
            break

    # step-function regime: fill the ledge cells at the lower bracket end
    mu = lo
    m, u = _mass_of_update(config, gen, lam, rc, wc, hc - mu)
    excess = m - config.kappa
    if excess < -tol:
        raise NumericalError("bisection left a mass deficit of %.3e" % (-excess))
    ledge = (hc - mu > 0.0) & (hc - hi <= 0.0)
    available = float(np.sum(u[ledge] * wc[ledge])) / eps2
    if available < excess - tol:
        raise NumericalError("ledge capacity %.3e cannot absorb excess %.3e"
                             % (available, excess))
    if available > 0.0 and excess > 0.0:
        u = u.copy()
        u[ledge] *= max(1.0 - excess / available, 0.0)
    m_final = float(np.sum(u * wc)) / eps2
    if abs(m_final - config.kappa) > config.tol_mu * config.kappa:
        raise NumericalError(
            "ledge fill missed the mass budget: %.3e vs %.3e"
            % (m_final, config.kappa))
    return float(mu), _capped(assemble(u), config, lam)


def _capped(zeta, config, lam):
    """Clamp roundoff so admissibility holds exactly: mass <= kappa and
    eps^2 zeta <= Lambda."""
    mass = integrate_nu(zeta)
    if mass > config.kappa:
        zeta.values *= (config.kappa / mass) * (1.0 - 1e-15)
    np.minimum(zeta.values, lam / config.epsilon ** 2, out=zeta.values)
    return zeta


def initialize(config, gen):
    """Starting vorticity: a uniform ball at (r_star, 0) of radius
    eps * sqrt(kappa / (pi r_star)), normalized to full mass.

    The scaling makes eps^2 zeta = 1 up to quadrature wobble, safely
    under the cap; if the discrete cap still binds the radius grows by
    25% steps. A ball that cannot fit inside the domain raises
    ConfigurationError.
    """
    lam = config.resolved_lambda(gen)
    spec = config.domain_grid()
    rs = config.r_star
    radius = config.epsilon * np.sqrt(config.kappa / (np.pi * rs))
    room = min(rs - spec.r_min, spec.r_max - rs,
               abs(spec.z_min), abs(spec.z_max))
    rr = spec.r_centers[:, None]
    zz = spec.z_centers[None, :]
    w = spec.nu_weights()
    for _ in range(40):
        if radius > room:
            raise ConfigurationError(
                "initialization ball of radius %.3g exceeds the domain "
                "(room %.3g); epsilon too large for this box" % (radius, room))
        mask = (rr - rs) ** 2 + zz ** 2 <= radius ** 2
        volume = float(np.sum(w[mask]))
        if volume > 0.0:
            c = config.kappa / volume
            if c * config.epsilon ** 2 <= lam:
                vals = np.where(mask, c, 0.0)
                return ScalarField(spec, vals)
        radius *= 1.25
    raise ConfigurationError("could not place the initialization ball")


def l1_change(spec, a, b):
    """Relative L1(nu) distance between successive iterates."""
    w = spec.nu_weights()
    denom = float(np.sum(np.abs(a) * w))
    return float(np.sum(np.abs(b - a) * w)) / max(denom, 1e-300)


def run(config, gen):
    """Outer majorize-maximize loop.

    Iterates psi0 = K zeta_k, (mu, zeta_{k+1}) = solve_mu, optional
    z-symmetrization, until the relative L1(nu) change drops below
    tol_zeta or max_iterations is hit. The energy trace is recorded per
    iterate and asserted nondecreasing (1e-9 relative slack). The final
    state gets a fresh stream field so the reported optimality residual
    and patch measure are self-consistent.
    """
    report = check_assumptions(gen, r_max=2.0 * config.r_star, t_max=50.0,
                               n_sample=80)
    if not report["all_pass"]:
        raise ConfigurationError(
            "generator fails its structural checks: %s"
            % {k: v for k, v in report.items() if k != "all_pass"})
    if config.symmetrize and config.n_z % 2:
        raise ConfigurationError("symmetrization needs an even n_z")

    spec = config.domain_grid()
    op = get_stream_operator(spec)
    zeta = initialize(config, gen)
    if config.symmetrize:
        zeta = steiner_symmetrize_z(zeta)

    trace = []
    mu = 0.0
    converged = False
    iterations = 0
    for it in range(1, config.max_iterations + 1):
        psi0_vals = op.apply(zeta.values)
        psi0_vals = 0.5 * (psi0_vals + psi0_vals[:, ::-1])
        psi0 = ScalarField(spec, psi0_vals)
        e_now = energy(config, gen, zeta, psi0)
        if trace and e_now < trace[-1] - 1e-9 * abs(trace[-1]):
            raise NumericalError(
                "energy decreased at iteration %d: %.15g -> %.15g"
                % (it, trace[-1], e_now))
        trace.append(e_now)

        mu, zeta_next = solve_mu(config, gen, psi0)
        if config.symmetrize:
            zeta_next = steiner_symmetrize_z(zeta_next)
        change = l1_change(spec, zeta.values, zeta_next.values)
        zeta = zeta_next
        iterations = it
        if change <= config.tol_zeta:
            converged = True
            break

    psi0_vals = op.apply(zeta.values)
    psi0_vals = 0.5 * (psi0_vals + psi0_vals[:, ::-1])
    psi0 = ScalarField(spec, psi0_vals)
    e_final = energy(config, gen, zeta, psi0)
    if trace and e_final < trace[-1] - 1e-9 * abs(trace[-1]):
        raise NumericalError("final energy fell below the trace")
    trace.append(e_final)

    bg = background_field(config, spec)
    psi = ScalarField(spec, psi0.values - bg - mu)
    state = SolveState(zeta=zeta, psi0=psi0, mu=float(mu), psi=psi,
                       energy=e_final, iteration=iterations)
    result = SolveResult(
        config=config, gen=gen, state=state, converged=converged,
        iterations=iterations, energy_trace=np.asarray(trace),
        degenerate_epsilon=config.degenerate_epsilon,
    )
    result.mass = integrate_nu(zeta)
    result.patch_measure = patch_measure(config, gen, zeta)
    result.kkt = kkt_residual(result)
    if config.degenerate_epsilon:
        warnings.warn("epsilon >= 0.5: asymptotic diagnostics are unreliable",
                      RuntimeWarning)
    return result


def patch_measure(config, gen, zeta):
    """nu-measure of the near-cap set {eps^2 zeta >= 0.999 Lambda}."""
    lam = config.resolved_lambda(gen)
    u = config.epsilon ** 2 * zeta.values
    mask = u >= 0.999 * lam
    return float(np.sum(zeta.spec.nu_weights()[mask]))


def kkt_residual(result):
    """Worst-cell optimality violation of the final state.

    Cases, each normalized (vorticity mismatches by Lambda, stream
    mismatches by max |psi|):

    - cells below the cap: distance of (psi, eps^2 zeta) to the update
      graph, as the smaller of the vorticity-side mismatch
      |eps^2 zeta - min(Lambda, i(r, psi_+))| and the stream-side
      mismatch |psi - dJds(r, eps^2 zeta)|. The two agree for continuous
      generators; the stream-side form is what vanishes on the ledge
      cells of jump generators.
    - capped cells: positive part of dJds(r, Lambda) - psi.
    - support cells: positive part of -psi.
    """
    config, gen = result.config, result.gen
    state = result.state
    lam = config.resolved_lambda(gen)
    eps2 = config.epsilon ** 2
    u = eps2 * state.zeta.values
    psi = state.psi.values
    spec = state.zeta.spec
    rr = np.repeat(spec.r_centers[:, None], spec.n_z, axis=1)
    scale_psi = float(np.max(np.abs(psi)))
    if scale_psi == 0.0:
        scale_psi = 1.0

    target = np.minimum(lam, eval_i(gen, rr, psi))
    a_form = np.abs(u - target) / lam
    b_form = np.empty_like(u)
    pos = u > 0.0
    b_form[~pos] = np.maximum(psi[~pos], 0.0) / scale_psi
    if np.any(pos):
        b_form[pos] = np.abs(psi[pos] - eval_dJds(gen, rr[pos], u[pos])) / scale_psi
    below = u < lam * (1.0 - 1e-12)
    viol = np.zeros_like(u)
    viol[below] = np.minimum(a_form[below], b_form[below])
    capped = ~below
    if np.any(capped):
        thresh = eval_dJds(gen, rr[capped], np.full(np.count_nonzero(capped), lam))
        viol[capped] = np.maximum(thresh - psi[capped], 0.0) / scale_psi
    neg_on_support = np.maximum(-psi, 0.0) / scale_psi
    viol[pos] = np.maximum(viol[pos], neg_on_support[pos])
    return float(np.max(viol)) if viol.size else 0.0
