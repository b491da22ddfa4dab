"""Validation suites driving the acceptance checks.

Each suite returns a list of check dicts in the stats JSON schema
(quantity, t, estimate, std_error, target, z, budget, pass) plus a
``check`` label. ``quick=True`` shrinks sample sizes and widens budgets per
``QUICK`` below.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .covering import drift_d_eps, hitting_prob, make_atom, sample_covering
from .errors import UsageError
from .hermite_paths import SimConfig, simulate
from .local_time import (
    LocalTimeConfig,
    approx_local_time,
    kingman_local_time,
    moment_oracle_closed,
    moment_oracle_numeric,
    moment_oracle_printed_exponent,
)
from .specfun import derive_params, log_gamma
from .stats import MomentReport, covariance_vs_fbm, ensemble_moment, ks_two_sample, sample_moment

__all__ = ["SUITES", "QUICK", "run_suite"]

# quick mode: sample sizes divided by `shrink`, budgets times `widen` (the MC
# error growth), and hard relative bands relaxed to the |z| <= 3 OR rule
QUICK = {"shrink": 10, "widen": math.sqrt(10), "min_samples": 200}

COVARIANCE_CASES = ((1, 0.6), (2, 0.8), (3, 0.9))
SELF_SIM_TIMES = (0.25, 0.5)
COV_TIMES = (0.2, 0.4, 0.6, 0.8, 1.0)


class _Scale:
    def __init__(self, quick: bool):
        self.quick = quick

    def n(self, full: int) -> int:
        if not self.quick:
            return full
        return max(QUICK["min_samples"], full // QUICK["shrink"])

    def b(self, budget: float) -> float:
        return budget * QUICK["widen"] if self.quick else budget

    def rule(self, rule: str) -> str:
        return "either" if self.quick else rule


def _sub_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


def _check(label: str, rep: MomentReport, **extra) -> dict:
    d = rep.to_json_dict()
    d["check"] = label
    d.update(extra)
    return d


def _plain(label, estimate, target, passed, budget=None, std_error=None, t=None, **extra) -> dict:
    d = {"check": label, "quantity": label, "t": t, "estimate": float(estimate),
         "std_error": std_error, "target": None if target is None else float(target),
         "z": None, "budget": budget, "pass": bool(passed)}
    d.update(extra)
    return d


# ------------------------------------------------------------------ covering

def check_hitting(seed: int, sc: _Scale) -> list[dict]:
    """Empirical P(x in R_eps) against the closed form on a 20-point x grid."""
    xs = np.linspace(0.0, 3.0, 20)
    n = sc.n(20_000)
    hits, total = 0, 0
    out = []
    for k, (beta, eps) in enumerate((b, e) for b in (0.3, 0.5, 0.7) for e in (0.05, 0.1)):
        rng = np.random.default_rng(_sub_seed(seed, 1, k))
        counts = np.zeros(xs.size)
        for _ in range(n):
            counts += sample_covering(beta, eps, 3.0, rng).uncovered.contains(xs)
        freq = counts / n
        target = hitting_prob(beta, eps, xs)
        se = np.sqrt(target * (1 - target) / n)
        ok = np.abs(freq - target) <= 3 * se + 1e-15
        hits += int(ok.sum())
        total += xs.size
        out.append(_plain(f"hitting beta={beta} eps={eps}", ok.mean(), 0.95, ok.mean() >= 0.95,
                          max_abs_err=float(np.max(np.abs(freq - target))), samples=n))
    frac = hits / total
    out.append(_plain("hitting: fraction of points within 3 binomial SE", frac, 0.95, frac >= 0.95))
    return out


def check_drift() -> list[dict]:
    out = []
    for beta in (0.3, 0.5, 0.8):
        for eps in (1e-1, 1e-2, 1e-3):
            d = drift_d_eps(beta, eps)
            lead = math.exp(log_gamma(beta)) * (eps / math.e) ** (1 - beta)
            dev = abs(d / lead - 1)
            out.append(_plain(f"drift asymptotics beta={beta} eps={eps:g}", d / lead, 1.0,
                              dev <= 2 * eps ** beta, budget=2 * eps ** beta))
            numeric = _drift_quadrature(beta, eps)
            rel = abs(d / numeric - 1)
            out.append(_plain(f"drift closed form vs quadrature beta={beta} eps={eps:g}", d, numeric,
                              rel <= 1e-9, budget=1e-9))
    return out


def _drift_quadrature(beta, eps):
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=400)
    head = integrate.quad(lambda x: math.exp(-x) * hitting_prob(beta, eps, x), 0.0, eps, **opts)[0]
    c = (eps / math.e) ** (1 - beta)
    # tail: substitute x = eps + u, weight e^-x x^(beta-1) is smooth past eps
    tail = integrate.quad(lambda x: math.exp(-x) * x ** (beta - 1), eps, math.inf, **opts)[0]
    return head + c * tail


def check_kingman(seed: int, sc: _Scale) -> list[dict]:
    beta, eps, t = 0.5, 1e-4, 1.0
    n = sc.n(10_000)
    rng = np.random.default_rng(_sub_seed(seed, 9))
    est = np.array([kingman_local_time(sample_covering(beta, eps, t, rng).uncovered, beta, t, [100, 1000])
                    for _ in range(n)])
    target = t ** beta / math.exp(log_gamma(1 + beta))
    out = []
    for j, level in enumerate((100, 1000)):
        rep = sample_moment(est[:, j], 1, quantity=f"Kingman mean, level n={level}", t=t)
        rep = rep.against(target, sc.b(0.10), rule=sc.rule("relative"))
        # the stated check uses level 1000; level 100 is reported for context
        out.append(_check(f"kingman n={level}", rep, informational=(level != 1000)))
    return out


# ------------------------------------------------------------------- moments

ORACLE_GRID = {1: (0.3, 0.5, 0.7), 2: (0.6, 0.75, 0.9)}


def check_moment_oracles(quick: bool = False) -> list[dict]:
    out = []
    for p, rs in ((1, (1, 2, 3)), (2, (1, 2))):
        for beta in ORACLE_GRID[p]:
            P = derive_params(beta, p)
            for r in rs:
                if quick and r == 3 and beta != 0.5:
                    continue
                closed = moment_oracle_closed(P, r, 1.0)
                numeric = moment_oracle_numeric(P, r, 1.0)
                out.append(_plain(f"oracle closed vs numeric p={p} r={r} beta={beta}", closed, numeric,
                                  abs(closed - numeric) <= 1e-6, budget=1e-6))
    # printed exponent: E[L_t] must grow linearly in t; reported, not asserted
    P = derive_params(0.5, 1)
    half = moment_oracle_printed_exponent(P, 1, 0.5) / moment_oracle_printed_exponent(P, 1, 1.0)
    out.append(_plain("printed exponent r=1: L(0.5)/L(1) (linear growth needs 0.5)", half, 0.5,
                      True, informational=True, linear=bool(abs(half - 0.5) < 1e-12)))
    return out


def check_standardization() -> list[dict]:
    out = []
    for p, beta in ((1, 0.6), (2, 0.8), (3, 0.9)):
        P = derive_params(beta, p)
        val = math.factorial(p) * moment_oracle_closed(P, 2, 1.0) * P.c_const ** 2
        out.append(_plain(f"standardization p={p} beta={beta}", val, 1.0, abs(val - 1) <= 1e-12, budget=1e-12))
    return out


MC_MOMENT_CASES = ((1, 0.5), (2, 0.8))


def mc_local_times(beta: float, p: int, eps: float, n: int, seed: int, t: float = 1.0) -> np.ndarray:
    """approx_local_time over ``n`` independent p-tuples of shifted atoms."""
    P = derive_params(beta, p)
    cfg = LocalTimeConfig(P, eps, (0.0, t), T=t)
    rng = np.random.default_rng(seed)
    return np.array([approx_local_time([make_atom(beta, eps, t, t, rng) for _ in range(p)], cfg, t)
                     for _ in range(n)])


def check_mc_moments(seed: int, sc: _Scale) -> list[dict]:
    eps = 1e-3
    n = sc.n(50_000)
    out = []
    for k, (p, beta) in enumerate(MC_MOMENT_CASES):
        P = derive_params(beta, p)
        L = mc_local_times(beta, p, eps, n, _sub_seed(seed, 4, k))
        for r in (1, 2):
            rep = sample_moment(L, r, quantity=f"E[L^{r}] p={p} beta={beta}", t=1.0)
            rep = rep.against(moment_oracle_closed(P, r, 1.0), sc.b(0.10), rule=sc.rule("sum"))
            out.append(_check(f"local-time moment p={p} r={r}", rep, samples=n))
    return out


# ------------------------------------------------------------ path ensembles

def _self_similarity(ens, hurst: float, label: str, budget: float) -> list[dict]:
    """Var Z(t)/t^2H relative to its value at t = 1, with a paired delta-method SE."""
    z1 = ens.column(1.0) ** 2
    out = []
    for t in SELF_SIM_TIMES:
        a = ens.column(t) ** 2 / t ** (2 * hurst)
        ratio = a.mean() / z1.mean()
        resid = a - ratio * z1
        se = float(np.std(resid, ddof=1) / math.sqrt(a.size) / z1.mean())
        rep = MomentReport(estimate=float(ratio), std_error=se,
                           quantity=f"{label}: Var Z(t)/t^2H over Var Z(1)", t=t)
        out.append(_check(f"self-similarity {label} t={t}", rep.against(1.0, budget)))
    return out


def _cov_pairs():
    return [(s, t) for s in COV_TIMES for t in COV_TIMES]


def check_chaos_covariance(seed: int, sc: _Scale, workers: int = 1) -> list[dict]:
    out = []
    reps = sc.n(2_000)
    for k, (p, beta) in enumerate(COVARIANCE_CASES):
        cfg = SimConfig(beta=beta, p=p, route="chaos", eps=5e-3, delta=1e-3, replicates=reps,
                        seed=_sub_seed(seed, 6, k))
        ens = simulate(cfg, workers)
        H = cfg.params.hurst
        var = ensemble_moment(ens, 1.0, 2)
        out.append(_check(f"chaos Var Z(1) p={p} beta={beta}",
                          var.against(1.0, sc.b(0.10), rule=sc.rule("relative"))))
        rmse, _ = covariance_vs_fbm(ens, H, _cov_pairs())
        lim = sc.b(0.05)
        out.append(_plain(f"chaos covariance RMSE p={p} beta={beta}", rmse, 0.0, rmse <= lim, budget=lim))
        out.extend(_self_similarity(ens, H, f"chaos p={p}", sc.b(0.10)))
    return out


def _compare(label, a: MomentReport, b: MomentReport, budget: float) -> dict:
    """Two independent estimates agree: |z| <= 3 on the difference or relative gap <= budget."""
    se = math.hypot(a.std_error, b.std_error)
    rep = MomentReport(estimate=a.estimate, std_error=se, quantity=label, t=a.t)
    d = _check(label, rep.against(b.estimate, budget))
    d["reference_std_error"] = b.std_error
    return d


def check_cross_route(seed: int, sc: _Scale, workers: int = 1) -> list[dict]:
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        # p = 1: chaos vs exact fBm
        n = sc.n(2_000)
        chaos1 = simulate(SimConfig(beta=0.6, p=1, route="chaos", eps=5e-3, delta=1e-3, replicates=n,
                                    seed=_sub_seed(seed, 7, 1)), workers)
        fbm = simulate(SimConfig(beta=0.6, p=1, route="fbm_exact", replicates=n,
                                 seed=_sub_seed(seed, 7, 2)), workers)
        stat, ok, crit = ks_two_sample(chaos1.column(1.0), fbm.column(1.0))
        out.append(_plain("KS chaos vs fbm_exact p=1 Z(1)", stat, crit, ok, budget=0.01, t=1.0))
        H1 = derive_params(0.6, 1).hurst
        out.extend(_self_similarity(fbm, H1, "fbm_exact p=1", sc.b(0.10)))

        # p = 2: chaos vs atoms
        chaos2 = simulate(SimConfig(beta=0.8, p=2, route="chaos", eps=5e-3, delta=1e-3, replicates=sc.n(2_000),
                                    seed=_sub_seed(seed, 7, 3)), workers)
        atoms = simulate(SimConfig(beta=0.8, p=2, route="atoms", eps=1e-3, M=256, replicates=sc.n(1_000),
                                   seed=_sub_seed(seed, 7, 4)), workers)
        for r in (2, 3):
            out.append(_compare(f"atoms vs chaos E[Z(1)^{r}] p=2",
                                ensemble_moment(atoms, 1.0, r), ensemble_moment(chaos2, 1.0, r), sc.b(0.15)))
        H2 = derive_params(0.8, 2).hurst
        out.append(_check("atoms Var Z(1) p=2", ensemble_moment(atoms, 1.0, 2).against(1.0, sc.b(0.15))))
        out.extend(_self_similarity(atoms, H2, "atoms p=2", sc.b(0.10)))

        # p = 2: time-domain
        td = simulate(SimConfig(beta=0.8, p=2, route="timedomain", delta=2.5e-3, replicates=sc.n(8_000),
                                seed=_sub_seed(seed, 7, 5)), workers)
        out.append(_check("timedomain Var Z(1) p=2",
                          ensemble_moment(td, 1.0, 2).against(1.0, sc.b(0.15), rule=sc.rule("relative"))))
        out.extend(_self_similarity(td, H2, "timedomain p=2", sc.b(0.10)))
    return out


# ------------------------------------------------------------------- driver

def suite_covering(seed, quick=False, workers=1):
    sc = _Scale(quick)
    return check_hitting(seed, sc) + check_drift() + check_kingman(seed, sc)


def suite_moments(seed, quick=False, workers=1):
    sc = _Scale(quick)
    return check_moment_oracles(quick) + check_standardization() + check_mc_moments(seed, sc)


def suite_covariance(seed, quick=False, workers=1):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return check_chaos_covariance(seed, _Scale(quick), workers)


def suite_cross_route(seed, quick=False, workers=1):
    return check_cross_route(seed, _Scale(quick), workers)


SUITES = {
    "covering": suite_covering,
    "moments": suite_moments,
    "covariance": suite_covariance,
    "cross-route": suite_cross_route,
}


def run_suite(name: str, seed: int = 1, quick: bool = False, workers: int = 1) -> dict:
    """Run one suite (or ``all``) and return the JSON-ready report."""
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    checks = []
    for n in names:
        for c in SUITES[n](seed, quick=quick, workers=workers):
            c["suite"] = n
            checks.append(c)
    judged = [c for c in checks if not c.get("informational")]
    return {
        "suite": name,
        "seed": seed,
        "quick": quick,
        "checks": checks,
        "pass": all(c["pass"] for c in judged),
    }
