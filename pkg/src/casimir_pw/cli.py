"""Command-line front end: energies, sweeps and oracle suites as CSV or JSON.

Every numeric column carries its unit in brackets (``[1]`` for dimensionless
quantities). Each row ends with the hash of the effective configuration, so a
rerun of the same configuration reproduces the output byte for byte. Wall
times go to the log on stderr only.
"""
import argparse
import hashlib
import json
import logging
import math
import sys
import time

import numpy as np

from .asymptotics import (
    BETA_3_2_DIFF, FIT_CONSTANT, CriticalPointError, beta_coefficients, delta_crit,
    e1_closed, e_pfa_closed, ntlo_energy, ntlo_fit,
)
from .energy import (
    Geometry, MaterialPair, casimir_energy_pfa, casimir_energy_with_corrections, diff_energy,
    pfa_energy,
)
from .materials import Dielectric, PemcPair
from .quadrature import ConvergenceError
from .roundtrip import brute_force_roundtrips, matrix_power_roundtrips, p_function, single_roundtrip
from .spherescatter import mie_oracle_pec, wkb_amplitude

log = logging.getLogger("casimir_pw")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("compute", "sweep-delta", "sweep-x", "ntlo", "mie-check", "oracle")
U_PFA = "hbar*c*R_eff/L^2"
U_CORR = "hbar*c/L"

DEFAULTS = {
    "R1": "1e-4", "R2": "inf", "L": "1e-7", "theta1": "0", "theta2": "0", "n": "",
    "T": "0", "tol": "1e-10", "out": "-", "format": "csv",
    "delta_points": "31", "ratios": "1,4,10,inf",
    "x_grid": "1e-5,2e-5,5e-5,1e-4,2e-4,5e-4,1e-3,2e-3,5e-3,1e-2",
    "xi_grid": "25,50,100,200,400", "s": "1.25", "seed": "20220101",
}


class InputError(ValueError):
    pass


def _parser():
    p = argparse.ArgumentParser(prog="casimir-pw", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key=value file; command-line flags take precedence")
    for key in ("R1", "R2", "L", "theta1", "theta2", "n", "T", "tol"):
        p.add_argument(f"--{key}")
    p.add_argument("--out", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--delta-points", dest="delta_points")
    p.add_argument("--ratios", help="comma-separated R1/R2 ratios, 'inf' for plane-sphere")
    p.add_argument("--x-grid", dest="x_grid")
    p.add_argument("--xi-grid", dest="xi_grid")
    p.add_argument("--s", help="half-angle sine for mie-check")
    p.add_argument("--seed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def read_config(path):
    """Parse a flat ``key = value`` file (``#`` starts a comment)."""
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise InputError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = value
    return cfg


def resolve_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["command"] = args.command
    return cfg


def config_hash(cfg):
    canon = "\n".join(f"{k}={cfg[k]}" for k in sorted(cfg) if k != "out")
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _float(cfg, key):
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise InputError(f"{key} must be a number, got {cfg[key]!r}") from exc


def _floats(cfg, key):
    try:
        return [float(v) for v in cfg[key].split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"{key} must be a comma-separated list of numbers") from exc


def _geometry(cfg):
    R1, R2, L = _float(cfg, "R1"), _float(cfg, "R2"), _float(cfg, "L")
    if not (R1 > 0 and R2 > 0 and L > 0) or math.isinf(R1):
        raise InputError("R1, R2, L must be positive and R1 finite")
    return Geometry(R1, R2, L)


def _materials(cfg):
    if cfg["n"]:
        n = _float(cfg, "n")
        if not n > 1:
            raise InputError("refractive index must exceed 1")
        return (Dielectric(n), Dielectric(n)), None
    th1, th2 = _float(cfg, "theta1"), _float(cfg, "theta2")
    if not (0 <= th1 <= math.pi / 2 and 0 <= th2 <= math.pi / 2):
        raise InputError("theta1, theta2 must lie in [0, pi/2]")
    if th2 < th1:
        raise InputError("theta2 must be at least theta1 (delta = theta2 - theta1 >= 0)")
    pair = PemcPair(th1, th2)
    return pair, pair.delta


# ------------------------------------------------------------------- commands

def cmd_compute(cfg):
    geom = _geometry(cfg)
    pair, delta = _materials(cfg)
    T, tol = _float(cfg, "T"), _float(cfg, "tol")
    if T < 0:
        raise InputError("T must be non-negative")
    row = {
        "R1[m]": geom.R1, "R2[m]": geom.R2, "L[m]": geom.L, "T[K]": T,
        "R_eff[m]": geom.R_eff, "u[1]": geom.u, "x[1]": geom.x,
        "delta[rad]": delta if delta is not None else math.nan,
        "n[1]": _float(cfg, "n") if cfg["n"] else math.inf,
    }
    if delta is not None:
        br = casimir_energy_with_corrections(geom, pair, rtol=tol)
        row.update({
            f"e_pfa[{U_PFA}]": br.e_pfa, f"e_diff[{U_CORR}]": br.e_diff,
            f"e_geo[{U_CORR}]": br.e_geo, f"e1[{U_CORR}]": br.e1,
            "beta_diff[1]": br.beta_diff, "beta_geo[1]": br.beta_geo, "beta1[1]": br.beta1,
            "e_pfa_si[J]": br.e_pfa_si, "e1_si[J]": br.e1_si,
            f"e_pfa_closed[{U_PFA}]": e_pfa_closed(delta),
            f"e1_closed[{U_CORR}]": e1_closed(delta, geom.u),
            f"err_e_pfa[{U_PFA}]": br.errors["e_pfa"],
            f"err_e_diff[{U_CORR}]": br.errors["e_diff"],
            f"err_e_geo[{U_CORR}]": br.errors["e_geo"],
        })
        try:
            bd, bg, b1 = beta_coefficients(delta, geom.u)
        except CriticalPointError:
            bd = bg = b1 = math.nan
        row.update({"beta_diff_closed[1]": bd, "beta_geo_closed[1]": bg, "beta1_closed[1]": b1})
        row["e1_dominant[1]"] = float(abs(br.e_pfa_si) < abs(br.e1_si))
    else:
        model = MaterialPair.coerce(pair, *geom.rho)
        e_pfa, err = pfa_energy(model, rtol=tol)
        e_diff, err_d = diff_energy(model, rtol=tol)
        row.update({
            f"e_pfa[{U_PFA}]": e_pfa, f"e_diff[{U_CORR}]": e_diff,
            "beta_diff[1]": e_diff / e_pfa,
            f"err_e_pfa[{U_PFA}]": err, f"err_e_diff[{U_CORR}]": err_d,
        })
    if T > 0:
        res = casimir_energy_pfa(geom, pair, T=T, rtol=tol)
        row.update({f"f_pfa[{U_PFA}]": res["value"], "f_pfa_si[J]": res["si"],
                    "tau[1]": res["tau"]})
    return [row]


def _u_of_ratio(r):
    return 0.0 if math.isinf(r) else r / (1.0 + r) ** 2


def cmd_sweep_delta(cfg):
    npts = int(_float(cfg, "delta_points"))
    if npts < 2:
        raise InputError("delta_points must be at least 2")
    ratios = _floats(cfg, "ratios")
    if any(r <= 0 for r in ratios):
        raise InputError("ratios must be positive")
    deltas = np.linspace(0.0, 0.5 * math.pi, npts)
    dc = delta_crit()
    rows = []
    for ratio in ratios:
        u = _u_of_ratio(ratio)
        for d in list(deltas) + [dc]:
            try:
                b1 = beta_coefficients(d, u)[2]
                flag = 0.0
            except CriticalPointError:
                b1, flag = math.nan, 1.0
            rows.append({"delta[rad]": float(d), "ratio[1]": ratio, "u[1]": u,
                         f"e1[{U_CORR}]": e1_closed(d, u), f"e_pfa[{U_PFA}]": e_pfa_closed(d),
                         "beta1[1]": b1, "critical[1]": flag})
    return rows


def cmd_sweep_x(cfg):
    xs = _floats(cfg, "x_grid")
    if any(not 0 < x <= 0.1 for x in xs):
        raise InputError("x_grid must lie in (0, 0.1]")
    beta_diff = -15.0 / math.pi ** 2
    rows = []
    for x in xs:
        r = ntlo_energy(x)
        rows.append({
            "x[1]": x,
            "correction[1]": r.ratio - 1.0 - beta_diff * x,
            "analytic[1]": BETA_3_2_DIFF * x ** 1.5,
            "reference_fit[1]": FIT_CONSTANT * x ** 1.5,
            "beta_3_2_local[1]": r.beta_3_2_local,
        })
    return rows


def cmd_ntlo(cfg):
    xs = [x for x in _floats(cfg, "x_grid") if x <= 1e-3]
    if len(xs) < 3:
        raise InputError("ntlo needs at least three x_grid points <= 1e-3")
    fit = ntlo_fit(tuple(xs))
    return [{
        "beta_3_2_fit[1]": fit["beta_3_2"], "beta_3_2_analytic[1]": BETA_3_2_DIFF,
        "ratio_to_2.65[1]": fit["ratio_to_fit_constant"],
        "te_share_fit[1]": fit["te_share"],
        "te_share_analytic[1]": fit["results"][0].te_share_analytic,
        "beta_lin_fit[1]": fit["beta_lin"], "beta_lin_exact[1]": -15.0 / math.pi ** 2,
        "x_min[1]": min(xs), "x_max[1]": max(xs),
    }]


def mie_deviations(xis, s):
    mu = 1.0 - 2.0 * s * s
    rows = []
    for xi in xis:
        for p in ("TE", "TM"):
            lm, sm = mie_oracle_pec(p, xi, mu)
            l0, s0, _ = wkb_amplitude(p, p, xi, s)
            l1, s1, _ = wkb_amplitude(p, p, xi, s, corrected=True)
            if sm != s0 or sm != s1:
                raise ConvergenceError("Mie and WKB amplitudes differ in sign")
            rows.append({"xi_tilde[1]": xi, "s[1]": s, "pol": p,
                         "dev_leading[1]": abs(math.expm1(l0 - lm)),
                         "dev_corrected[1]": abs(math.expm1(l1 - lm))})
    return rows


def loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def cmd_mie_check(cfg):
    xis = _floats(cfg, "xi_grid")
    s = _float(cfg, "s")
    if s < 1 or any(not 1 <= x <= 500 for x in xis):
        raise InputError("need s >= 1 and xi_tilde in [1, 500]")
    rows = mie_deviations(xis, s)
    for p in ("TE", "TM"):
        sub = [r for r in rows if r["pol"] == p]
        xi = [r["xi_tilde[1]"] for r in sub]
        for r in sub:
            r["slope_leading[1]"] = loglog_slope(xi, [q["dev_leading[1]"] for q in sub])
            r["slope_corrected[1]"] = loglog_slope(xi, [q["dev_corrected[1]"] for q in sub])
    return rows


def tail_bound_ratio(rng, n_mat=100, r_max=8):
    """Worst ratio of truncation error to the geometric tail bound.

    Since ``tr A**r = lambda1**r + lambda2**r``, truncating after ``r_max``
    round trips errs by at most ``2 rho**(r_max+1)/((r_max+1)(1-rho))``.
    """
    worst = 0.0
    for _ in range(n_mat):
        r1, r2 = rng.uniform(-1.0, 1.0, (2, 2, 2))
        target = rng.uniform(0.1, 0.9)
        prod_rad = float(np.max(np.abs(np.linalg.eigvals(r1 @ r2))))
        kl = 0.5 * math.log(prod_rad / target)
        if kl <= 0:
            r1 = r1 * (target / prod_rad) * math.exp(0.2)
            kl = 0.1
        srt = single_roundtrip(r1, r2, kl)
        rad = float(np.max(np.abs(np.linalg.eigvals(srt.a))))
        bound = 2.0 * rad ** (r_max + 1) / ((r_max + 1) * (1.0 - rad)) + 1e-14
        err = abs(matrix_power_roundtrips(srt.a, r_max) - float(p_function(srt)))
        worst = max(worst, err / bound)
    return worst


def cmd_oracle(cfg):
    rng = np.random.default_rng(int(_float(cfg, "seed")))
    rows = []

    err = 0.0
    for _ in range(100):
        r1, r2 = rng.uniform(-0.5, 0.5, (2, 2, 2))
        srt = single_roundtrip(r1, r2, rng.uniform(0.05, 2.0))
        for r_max in range(1, 6):
            err = max(err, abs(brute_force_roundtrips(srt, r_max) - matrix_power_roundtrips(srt.a, r_max)))
    rows.append({"suite": "roundtrip_enumeration", "measured[1]": err, "tolerance[1]": 1e-12,
                 "passed[1]": float(err <= 1e-12)})

    worst = tail_bound_ratio(rng)
    rows.append({"suite": "roundtrip_tail_bound", "measured[1]": worst, "tolerance[1]": 1.0,
                 "passed[1]": float(worst <= 1.0)})

    mie = mie_deviations([25, 50, 100, 200, 400], 1.25)
    for p in ("TE", "TM"):
        sub = [r for r in mie if r["pol"] == p]
        xi = [r["xi_tilde[1]"] for r in sub]
        s0 = loglog_slope(xi, [r["dev_leading[1]"] for r in sub])
        s1 = loglog_slope(xi, [r["dev_corrected[1]"] for r in sub])
        rows.append({"suite": f"wkb_slope_leading_{p}", "measured[1]": s0, "tolerance[1]": 0.15,
                     "passed[1]": float(abs(s0 + 1.0) <= 0.15)})
        rows.append({"suite": f"wkb_slope_corrected_{p}", "measured[1]": s1, "tolerance[1]": 0.2,
                     "passed[1]": float(abs(s1 + 2.0) <= 0.2)})

    worst = 0.0
    for d in (0.0, 0.3, math.pi / 4, 1.2, math.pi / 2):
        val, _ = pfa_energy(d)
        worst = max(worst, abs(val / e_pfa_closed(d) - 1.0))
    rows.append({"suite": "pfa_quadrature_vs_closed", "measured[1]": worst, "tolerance[1]": 1e-7,
                 "passed[1]": float(worst <= 1e-7)})
    return rows


HANDLERS = {
    "compute": cmd_compute, "sweep-delta": cmd_sweep_delta, "sweep-x": cmd_sweep_x,
    "ntlo": cmd_ntlo, "mie-check": cmd_mie_check, "oracle": cmd_oracle,
}


# --------------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, str):
        return v
    return "%.11e" % v


def _json_value(v):
    if isinstance(v, str):
        return v
    v = float(v)
    # strict JSON has no inf/nan literals
    return v if math.isfinite(v) else repr(v)


def render(rows, cfg, fmt):
    h = config_hash(cfg)
    if fmt == "json":
        payload = {"command": cfg["command"], "config_hash": h,
                   "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
                   "records": [{k: _json_value(v) for k, v in r.items()} for r in rows]}
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    keys = list(rows[0].keys()) if rows else []
    lines = [",".join(keys + ["config_hash"])]
    for r in rows:
        lines.append(",".join([_fmt(r[k]) for k in keys] + [h]))
    return "\n".join(lines) + "\n"


def main(argv=None):
    args = _parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        cfg = resolve_config(args)
        if cfg["format"] not in ("csv", "json"):
            raise InputError("format must be csv or json")
        start = time.perf_counter()
        rows = HANDLERS[args.command](cfg)
        log.info("%s finished in %.3f s", args.command, time.perf_counter() - start)
    except (InputError, ValueError, OSError) as exc:
        print(f"casimir-pw: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, ArithmeticError, OverflowError) as exc:
        print(f"casimir-pw: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(rows, cfg, cfg["format"])
    if cfg["out"] == "-":
        sys.stdout.write(text)
    else:
        with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if args.command == "oracle" and not all(r["passed[1]"] == 1.0 for r in rows):
        print("casimir-pw: oracle suite failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
