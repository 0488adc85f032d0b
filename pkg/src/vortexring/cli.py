"""Command line front end: single solves, epsilon sweeps, validation
suites, and sweep reports.

Configs are JSON, field dumps are CSV, summaries are JSON. Solver output
is deterministic for a fixed config and package version, and result.json
is byte-identical across reruns; manifest.json carries wall-clock timings
and is the one file excluded from that guarantee.

Exit codes: 0 success (and convergence for `solve`), 2 a solve ran but
did not converge (files are still written), 1 configuration or usage
error.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import ConfigurationError
from .grid import dump_field_csv
from .profiles import (check_assumptions, eval_I, eval_J, eval_J_numeric,
                       eval_dJds, eval_i, make_generator)
from .solver import ProblemConfig, run
from . import diagnostics as dg


PROFILE_FAMILIES = ("power_law", "turkington", "beltrami", "mixed", "table")

_SOLVE_KEYS = {
    "epsilon", "kappa", "W", "Lambda", "grid", "profile", "tol",
    "max_iterations", "symmetrize",
}
_SWEEP_KEYS = (_SOLVE_KEYS - {"epsilon"}) | {"epsilons"}
_GRID_KEYS = {"n_r", "n_z"}
_PROFILE_KEYS = {"family", "p", "alpha", "table_path"}
_TOL_KEYS = {"zeta", "mu"}


class CliError(Exception):
    """Configuration or usage problem; carries all messages at once."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


def _check_number(cfg, key, errors, lo=None, hi=None, integer=False,
                  lo_strict=True, label=None):
    if key not in cfg:
        return
    v = cfg[key]
    label = label or key
    ok = isinstance(v, (int, float)) and not isinstance(v, bool)
    if ok and integer:
        ok = float(v).is_integer()
    if ok and lo is not None:
        ok = v > lo if lo_strict else v >= lo
    if ok and hi is not None:
        ok = v < hi
    if not ok:
        bounds = ""
        if lo is not None and hi is not None:
            bounds = " in (%g, %g)" % (lo, hi)
        elif lo is not None:
            bounds = " %s %g" % (">" if lo_strict else ">=", lo)
        kind = "an integer" if integer else "a number"
        errors.append("%s: must be %s%s, got %r" % (label, kind, bounds, v))


def _check_section(cfg, name, allowed, errors):
    sec = cfg.get(name, {})
    if not isinstance(sec, dict):
        errors.append("%s: must be an object, got %r" % (name, sec))
        return {}
    for key in sorted(set(sec) - allowed):
        errors.append("%s.%s: unknown key" % (name, key))
    return sec


def validate_config(cfg, allowed, require):
    """Schema check collecting every offending key before raising."""
    errors = []
    if not isinstance(cfg, dict):
        raise CliError(["config root must be a JSON object"])
    for key in sorted(set(cfg) - allowed):
        errors.append("%s: unknown key" % key)
    for key in require:
        if key not in cfg:
            errors.append("%s: required key is missing" % key)
    _check_number(cfg, "epsilon", errors, lo=0.0, hi=1.0)
    if "epsilons" in cfg:
        v = cfg["epsilons"]
        if (not isinstance(v, list) or not v
                or not all(isinstance(e, (int, float))
                           and not isinstance(e, bool) and 0.0 < e < 1.0
                           for e in v)):
            errors.append(
                "epsilons: must be a nonempty list of numbers in (0, 1), "
                "got %r" % (v,))
    _check_number(cfg, "kappa", errors, lo=0.0)
    _check_number(cfg, "W", errors, lo=0.0)
    if cfg.get("Lambda") is not None:
        _check_number(cfg, "Lambda", errors, lo=0.0)
    _check_number(cfg, "max_iterations", errors, lo=1, integer=True,
                  lo_strict=False)
    if "symmetrize" in cfg and not isinstance(cfg["symmetrize"], bool):
        errors.append("symmetrize: must be a boolean, got %r"
                      % (cfg["symmetrize"],))

    grid = _check_section(cfg, "grid", _GRID_KEYS, errors)
    for key in ("n_r", "n_z"):
        _check_number(grid, key, errors, lo=2, integer=True,
                      lo_strict=False, label="grid." + key)
    tol = _check_section(cfg, "tol", _TOL_KEYS, errors)
    for key in ("zeta", "mu"):
        _check_number(tol, key, errors, lo=0.0, label="tol." + key)
    prof = _check_section(cfg, "profile", _PROFILE_KEYS, errors)
    if isinstance(prof, dict):
        fam = prof.get("family", "power_law")
        if fam not in PROFILE_FAMILIES:
            errors.append("profile.family: must be one of %s, got %r"
                          % ("/".join(PROFILE_FAMILIES), fam))
        for key in ("p", "alpha"):
            _check_number(prof, key, errors, lo=0.0, label="profile." + key)
        if fam == "table" and "table_path" not in prof:
            errors.append("profile.table_path: required for table family")
        if "table_path" in prof and not isinstance(prof["table_path"], str):
            errors.append("profile.table_path: must be a string")
    if errors:
        raise CliError(errors)


def build_problem(cfg, epsilon=None):
    """ProblemConfig + GeneratorPair from a validated config dict."""
    grid = cfg.get("grid", {})
    tol = cfg.get("tol", {})
    kwargs = {}
    for key in ("kappa", "W", "max_iterations", "symmetrize"):
        if key in cfg:
            kwargs[key] = cfg[key]
    if "Lambda" in cfg:
        kwargs["lambda_cap"] = cfg["Lambda"]
    if "n_r" in grid:
        kwargs["n_r"] = int(grid["n_r"])
    if "n_z" in grid:
        kwargs["n_z"] = int(grid["n_z"])
    if "zeta" in tol:
        kwargs["tol_zeta"] = tol["zeta"]
    if "mu" in tol:
        kwargs["tol_mu"] = tol["mu"]
    eps = cfg.get("epsilon") if epsilon is None else epsilon
    problem = ProblemConfig(epsilon=float(eps), **kwargs)
    pspec = dict(cfg.get("profile", {}))
    family = pspec.pop("family", "power_law")
    gen = make_generator(family, **pspec)
    return problem, gen


def _problem_snapshot(problem, profile_cfg):
    snap = {
        "epsilon": problem.epsilon,
        "kappa": problem.kappa,
        "W": problem.W,
        "Lambda": problem.lambda_cap,
        "grid": {"n_r": problem.n_r, "n_z": problem.n_z},
        "tol": {"zeta": problem.tol_zeta, "mu": problem.tol_mu},
        "max_iterations": problem.max_iterations,
        "symmetrize": problem.symmetrize,
        "profile": {"family": "power_law", **profile_cfg},
    }
    return snap


def _grid_hash(spec):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(spec.r_centers).tobytes())
    h.update(np.ascontiguousarray(spec.z_centers).tobytes())
    return h.hexdigest()


def _atomic_write(path, data):
    tmp = path + ".tmp"
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(tmp, mode) as f:
        f.write(data)
    os.replace(tmp, path)


def _json_dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def solve_to_dir(problem, gen, gen_cfg, out_dir):
    """Run one solve, write result.json / zeta.csv / psi.csv /
    manifest.json into out_dir, and return (result, record)."""
    os.makedirs(out_dir, exist_ok=True)
    stages = {}
    t0 = time.perf_counter()
    result = run(problem, gen)
    stages["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    record = dg.diagnostics_record(result)
    stages["diagnostics"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    payload = {
        "version": __version__,
        "config": _problem_snapshot(problem, gen_cfg),
        "outcome": {
            "converged": result.converged,
            "iterations": result.iterations,
            "mu": result.state.mu,
            "energy": result.state.energy,
            "kkt_residual": result.kkt,
            "patch_measure": result.patch_measure,
            "mass": result.mass,
            "degenerate_epsilon": result.degenerate_epsilon,
        },
        "diagnostics": {k: (bool(v) if isinstance(v, (bool, np.bool_))
                            else v)
                        for k, v in record.__dict__.items()},
        "energy_trace": [float(x) for x in result.energy_trace],
    }
    files = {}
    for name, text in (
            ("result.json", _json_dumps(payload)),
            ("zeta.csv", _field_csv_text(result.state.zeta)),
            ("psi.csv", _field_csv_text(result.state.psi))):
        _atomic_write(os.path.join(out_dir, name), text)
        files[name] = os.path.join(out_dir, name)
    stages["write"] = time.perf_counter() - t0

    manifest = {
        "version": __version__,
        "config": payload["config"],
        "grid_sha256": _grid_hash(result.state.zeta.spec),
        "files": sorted(files),
        "wall_clock_seconds": {k: round(v, 6) for k, v in stages.items()},
    }
    manifest["files"] = sorted(files) + ["manifest.json"]
    _atomic_write(os.path.join(out_dir, "manifest.json"),
                  _json_dumps(manifest))
    return result, record


def _field_csv_text(fld):
    buf = io.StringIO()
    dump_field_csv(fld, buf)
    return buf.getvalue()


def _load_config(path):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise CliError(["cannot read config %s: %s" % (path, exc)])
    except json.JSONDecodeError as exc:
        raise CliError(["config %s is not valid JSON: %s" % (path, exc)])


def resolve_out_dir(arg):
    if arg:
        return arg
    env = os.environ.get("RING_DESING_OUT")
    if env:
        return env
    return "out"


def cmd_solve(args):
    cfg = _load_config(args.config)
    validate_config(cfg, _SOLVE_KEYS, require=("epsilon",))
    try:
        problem, gen = build_problem(cfg)
    except ConfigurationError as exc:
        raise CliError([str(exc)])
    out_dir = resolve_out_dir(args.out)
    result, _ = solve_to_dir(problem, gen, cfg.get("profile", {}), out_dir)
    if not result.converged:
        print("solve did not converge in %d iterations (results written to %s)"
              % (result.iterations, out_dir), file=sys.stderr)
        return 2
    print("converged in %d iterations; results in %s"
          % (result.iterations, out_dir))
    return 0


SWEEP_COLUMNS = [
    "epsilon", "log_inv_eps", "mu", "E", "R_center", "theta_minus",
    "theta_plus", "diam", "diam_over_eps", "dist_to_ring", "mass",
    "kkt_residual", "patch_measure", "simply_connected", "far_vz",
    "core_radius", "status",
]


def _sweep_row(problem, record, status):
    return {
        "epsilon": problem.epsilon,
        "log_inv_eps": problem.log_inv_eps,
        "mu": record.mu,
        "E": record.energy,
        "R_center": record.center_r,
        "theta_minus": record.theta_minus,
        "theta_plus": record.theta_plus,
        "diam": record.diam_supp,
        "diam_over_eps": record.diam_supp / problem.epsilon,
        "dist_to_ring": record.dist_to_ring,
        "mass": record.mass,
        "kkt_residual": record.kkt_residual,
        "patch_measure": record.patch_measure,
        "simply_connected": str(bool(record.simply_connected)).lower(),
        "far_vz": record.far_field_vz,
        "core_radius": record.core_radius,
        "status": status,
    }


def _format_cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def cmd_sweep(args):
    cfg = _load_config(args.config)
    validate_config(cfg, _SWEEP_KEYS, require=("epsilons",))
    eps_list = [float(e) for e in cfg["epsilons"]]
    seen = []
    for e in eps_list:
        if e in seen:
            print("warning: duplicate epsilon %g dropped" % e,
                  file=sys.stderr)
        else:
            seen.append(e)
    eps_list = sorted(seen, reverse=True)
    out_dir = resolve_out_dir(args.out)
    os.makedirs(out_dir, exist_ok=True)
    gen_cfg = cfg.get("profile", {})

    def one(eps):
        tag = "eps_%g" % eps
        try:
            problem, gen = build_problem(cfg, epsilon=eps)
            _, record = solve_to_dir(problem, gen, gen_cfg,
                                     os.path.join(out_dir, tag))
            status = "converged" if record.converged else "nonconverged"
            return _sweep_row(problem, record, status)
        except Exception as exc:  # recorded per row, sweep continues
            return {"epsilon": eps, "log_inv_eps": float(np.log(1.0 / eps)),
                    "status": "error: %s" % str(exc).replace(",", ";"),
                    **{c: "nan" for c in SWEEP_COLUMNS
                       if c not in ("epsilon", "log_inv_eps", "status")}}

    # the kernel table is shared across the sweep; build it once up front
    try:
        problem0, _ = build_problem(cfg, epsilon=eps_list[0])
        from .greens import get_stream_operator
        get_stream_operator(problem0.domain_grid())
    except Exception:
        pass
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(one, eps_list))
    else:
        rows = [one(e) for e in eps_list]

    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in SWEEP_COLUMNS))
    _atomic_write(os.path.join(out_dir, "sweep.csv"), "\n".join(lines) + "\n")
    n_bad = sum(1 for r in rows if str(r["status"]).startswith("error"))
    print("sweep wrote %d rows to %s (%d failed)"
          % (len(rows), os.path.join(out_dir, "sweep.csv"), n_bad))
    return 1 if n_bad == len(rows) else 0


def cmd_report(args):
    cfg = _load_config(args.config) if args.config else {}
    if cfg:
        validate_config(cfg, _SWEEP_KEYS | {"epsilon"}, require=())
    kappa = float(cfg.get("kappa", 4.0 * np.pi))
    w_speed = float(cfg.get("W", 1.0))
    out_dir = resolve_out_dir(args.out)
    sweep_path = os.path.join(out_dir, "sweep.csv")
    try:
        with open(sweep_path) as f:
            rows = list(csv.DictReader(f))
    except OSError as exc:
        raise CliError(["cannot read %s: %s" % (sweep_path, exc)])
    good = [r for r in rows if r.get("status") == "converged"]
    if len(good) < 3:
        raise CliError(["need at least 3 converged sweep rows, found %d"
                        % len(good)])
    eps = np.array([float(r["epsilon"]) for r in good])
    mus = np.array([float(r["mu"]) for r in good])
    ens = np.array([float(r["E"]) for r in good])
    ehat = np.array([float(r["core_radius"]) for r in good])
    fit = dg.asymptotic_fit(eps, mus, ens)
    pred_mu, pred_e = dg.predicted_slopes(kappa, w_speed)
    kh = dg.kelvin_hicks_check(eps, ehat, kappa, w_speed)
    payload = {
        "version": __version__,
        "kappa": kappa,
        "W": w_speed,
        "n_points": len(good),
        "fit": {
            "slope_mu": fit.slope_mu,
            "intercept_mu": fit.intercept_mu,
            "r_squared_mu": fit.r_squared_mu,
            "slope_E": fit.slope_E,
            "intercept_E": fit.intercept_E,
            "r_squared_E": fit.r_squared_E,
        },
        "predicted": {"slope_mu": pred_mu, "slope_E": pred_e},
        "relative_error": {
            "slope_mu": abs(fit.slope_mu - pred_mu) / abs(pred_mu),
            "slope_E": abs(fit.slope_E - pred_e) / abs(pred_e),
        },
        "kelvin_hicks": kh,
    }
    _atomic_write(os.path.join(out_dir, "report.json"),
                  _json_dumps(payload))
    print("report written to %s" % os.path.join(out_dir, "report.json"))
    return 0


def _validate_greens(seed, n_pairs=200):
    from .greens import (kernel_bound, kernel_closed_form,
                         kernel_quadrature, expansion_remainder, sigma)
    rng = np.random.default_rng(seed)
    rows = []
    worst = 0.0
    bound_ok = True
    four_pi_violations = 0
    made = 0
    while made < n_pairs:
        r, rp = rng.uniform(0.5, 2.0, 2)
        z, zp = rng.uniform(-1.0, 1.0, 2)
        if sigma(r, z, rp, zp) < 1e-6:
            continue
        made += 1
        closed = kernel_closed_form(r, z, rp, zp).value
        quad = kernel_quadrature(r, z, rp, zp).value
        rel = abs(closed - quad) / abs(quad)
        worst = max(worst, rel)
        if not (0.0 < closed <= kernel_bound(r, z, rp, zp, coef=0.5)
                * (1 + 1e-12)):
            bound_ok = False
        quarter_bound = kernel_bound(r, z, rp, zp, coef=0.25)
        if closed > quarter_bound:
            four_pi_violations += 1
        rows.append((r, z, rp, zp, sigma(r, z, rp, zp), quad, closed, rel,
                     quarter_bound))

    def rem_sup(n):
        rr = rng.uniform(0.5, 2.0, (n, 2))
        zz = rng.uniform(-1.0, 1.0, (n, 2))
        keep = sigma(rr[:, 0], zz[:, 0], rr[:, 1], zz[:, 1]) > 1e-9
        vals = expansion_remainder(rr[keep, 0], zz[keep, 0],
                                   rr[keep, 1], zz[keep, 1])
        return float(np.max(np.abs(vals)))

    coarse, fine = rem_sup(100), rem_sup(400)
    summary = {
        "pairs": n_pairs,
        "max_rel_diff": worst,
        "closed_vs_quadrature_ok": bool(worst <= 1e-10),
        "positive_and_under_halfpi_bound": bool(bound_ok),
        "quarter_pi_bound_violations": int(four_pi_violations),
        "remainder_sup_coarse": coarse,
        "remainder_sup_fine": fine,
        "remainder_bounded": bool(fine <= 1.05 * max(coarse, 1e-12)),
    }
    summary["pass"] = bool(summary["closed_vs_quadrature_ok"]
                           and bound_ok and summary["remainder_bounded"])
    csv_lines = ["r,z,rp,zp,sigma,K_quad,K_closed,rel_err,bound"]
    for row in rows:
        csv_lines.append(",".join("%.17g" % v for v in row))
    return summary, "\n".join(csv_lines) + "\n"


def _validate_profiles(seed):
    rng = np.random.default_rng(seed)
    families = [("power_law", dict(p=1.0)), ("power_law", dict(p=2.0)),
                ("turkington", dict(alpha=1.0)), ("beltrami", dict(p=1.0)),
                ("mixed", dict(p=1.0))]
    out = {}
    all_ok = True
    for fam, kw in families:
        gen = make_generator(fam, **kw)
        rs = rng.uniform(0.5, 2.0, 24)
        ts = rng.uniform(1e-3, 8.0, 24)
        svals = eval_i(gen, rs, ts)
        ok_pos = svals > gen.g0plus * (1 + 1e-9) + 1e-12
        jc = eval_J(gen, rs, svals)
        jn = np.array([eval_J_numeric(gen, r, s)
                       for r, s in zip(rs, svals)])
        scale = np.maximum(np.abs(jc), 1e-12)
        j_err = float(np.max(np.abs(jc - jn) / scale))
        back = eval_dJds(gen, rs[ok_pos], svals[ok_pos])
        round_err = float(np.max(np.abs(back - ts[ok_pos])
                                 / np.maximum(ts[ok_pos], 1e-12))) \
            if np.any(ok_pos) else 0.0
        fy = np.abs(jc - (ts * svals - eval_I(gen, rs, ts)))
        fy_err = float(np.max(fy / np.maximum(np.abs(jc), 1e-9)))
        checks = check_assumptions(gen, n_sample=120)
        entry = {
            "closed_vs_numeric_J": j_err,
            "inverse_roundtrip": round_err,
            "fenchel_young": fy_err,
            "assumptions": bool(checks["all_pass"]),
            "pass": bool(j_err <= 1e-6 and round_err <= 1e-8
                         and fy_err <= 1e-8 and checks["all_pass"]),
        }
        out["%s(%s)" % (fam, ",".join("%s=%g" % kv for kv in kw.items()))] \
            = entry
        all_ok = all_ok and entry["pass"]
    return out, all_ok


def _validate_bathtub(seed, trials=200):
    from .rearrange import MeasureSpace, bathtub_maximize
    rng = np.random.default_rng(seed)
    worst = 0.0
    structure_ok = True
    for _ in range(trials):
        n = int(rng.integers(2, 11))
        w = rng.uniform(0.2, 2.0, n)
        h = np.round(rng.uniform(-1.0, 3.0, n), 1)
        cap = rng.uniform(0.05, 0.95) * float(np.sum(w))
        space = MeasureSpace(weights=w, values=h, capacity=cap)
        sol = bathtub_maximize(space)
        best = _bathtub_brute(w, h, cap)
        worst = max(worst, abs(sol.value - best))
        lvl = sol.level
        om = sol.omega
        if np.any((h > max(lvl, 0.0)) & (om < 1 - 1e-12)):
            structure_ok = False
        if np.any((h < lvl) & (om > 1e-12)):
            structure_ok = False
        if lvl > 0 and abs(float(np.sum(om * w)) - cap) > 1e-9 * (1 + cap):
            structure_ok = False
    return {
        "trials": trials,
        "max_value_gap": worst,
        "structure_ok": bool(structure_ok),
        "pass": bool(worst <= 1e-12 and structure_ok),
    }


def _bathtub_brute(w, h, cap):
    """Exact LP optimum by vertex enumeration: full cells on a subset,
    at most one fractional cell."""
    n = len(w)
    masks = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    wsum = masks @ w
    gain = masks @ (h * w)  # objective is the weighted integral of omega h
    feas = wsum <= cap * (1 + 1e-12)
    best = float(np.max(np.where(feas, gain, -np.inf)))
    for j in range(n):
        free = (masks[:, j] == 0) & feas
        frac = np.clip((cap - wsum[free]) / w[j], 0.0, 1.0)
        vals = gain[free] + frac * h[j] * w[j]
        if vals.size:
            best = max(best, float(np.max(vals)))
    return best


def cmd_validate(args):
    suites = ("greens", "profiles", "bathtub")
    name = args.suite
    if name not in suites + ("all",):
        raise CliError(["unknown suite %r; choose from %s or all"
                        % (name, "/".join(suites))])
    chosen = suites if name == "all" else (name,)
    out_dir = resolve_out_dir(args.out)
    os.makedirs(out_dir, exist_ok=True)
    summary = {"version": __version__, "seed": args.seed}
    ok = True
    for suite in chosen:
        if suite == "greens":
            res, kernel_csv = _validate_greens(args.seed)
            _atomic_write(os.path.join(out_dir, "kernel_pairs.csv"),
                          kernel_csv)
        elif suite == "profiles":
            res, suite_ok = _validate_profiles(args.seed)
            res = {"families": res, "pass": suite_ok}
        else:
            res = _validate_bathtub(args.seed)
        summary[suite] = res
        ok = ok and res["pass"]
    summary["all_pass"] = bool(ok)
    _atomic_write(os.path.join(out_dir, "validation.json"),
                  _json_dumps(summary))
    print("validation %s; summary in %s"
          % ("passed" if ok else "FAILED",
             os.path.join(out_dir, "validation.json")))
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="vortexring",
        description="Steady vortex ring solver and diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None,
                       help="output directory (default: $RING_DESING_OUT "
                            "or ./out)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0,
                       help="sampling seed for validation suites")

    p_solve = sub.add_parser("solve", help="run one solve from a JSON config")
    p_solve.add_argument("--config", required=True)
    add_common(p_solve)

    p_sweep = sub.add_parser("sweep", help="run an epsilon sweep")
    p_sweep.add_argument("--config", required=True)
    add_common(p_sweep)

    p_val = sub.add_parser("validate", help="run module validation suites")
    p_val.add_argument("suite", nargs="?", default="all")
    add_common(p_val)

    p_rep = sub.add_parser("report", help="fit asymptotics on a sweep.csv")
    p_rep.add_argument("--config", default=None)
    add_common(p_rep)

    args = parser.parse_args(argv)
    handlers = {"solve": cmd_solve, "sweep": cmd_sweep,
                "validate": cmd_validate, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except CliError as exc:
        for msg in exc.messages:
            print("config error: %s" % msg, file=sys.stderr)
        return 1
    except ConfigurationError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # surface a one-line failure, not a traceback
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
