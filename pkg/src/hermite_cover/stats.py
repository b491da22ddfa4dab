"""Ensemble estimators and the pass/fail rule used by the validation suites.

Standard errors are plain central-limit errors across replicates. Long-range
dependence correlates values along one path, not across independent
replicates, so i.i.d. errors are valid here. Do not reuse them for time
averages.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import UsageError

__all__ = [
    "MomentReport",
    "covariance_vs_fbm",
    "ensemble_moment",
    "ks_two_sample",
    "sample_moment",
]

Z_LIMIT = 3.0


@dataclass(frozen=True)
class MomentReport:
    """One estimated quantity, optionally judged against a target.

    Default pass rule (``rule="either"``): ``|z| <= 3`` or relative error
    ``<= budget``, whichever is looser. Both numbers are reported so MC noise
    and discretization bias can be told apart. ``rule="sum"`` accepts
    ``|diff| <= 3 SE + budget |target|``; ``rule="relative"`` ignores the SE.
    """

    estimate: float
    std_error: float
    target: float | None = None
    z_score: float | None = None
    passed: bool | None = None
    quantity: str = ""
    t: float | None = None
    budget: float | None = None

    def against(self, target: float, budget: float = 0.0, quantity: str | None = None,
                rule: str = "either") -> "MomentReport":
        diff = self.estimate - target
        if self.std_error > 0:
            z = diff / self.std_error
        else:
            z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
        allowed = budget * abs(target)
        if rule == "either":
            ok = abs(z) <= Z_LIMIT or abs(diff) <= allowed
        elif rule == "sum":
            ok = abs(diff) <= Z_LIMIT * self.std_error + allowed
        elif rule == "relative":
            ok = abs(diff) <= allowed
        else:
            raise UsageError(f"unknown pass rule {rule!r}")
        return replace(
            self,
            target=float(target),
            z_score=float(z),
            passed=bool(ok),
            budget=float(budget),
            quantity=self.quantity if quantity is None else quantity,
        )

    def to_json_dict(self) -> dict:
        d = asdict(self)
        return {
            "quantity": d["quantity"],
            "t": d["t"],
            "estimate": d["estimate"],
            "std_error": d["std_error"],
            "target": d["target"],
            "z": _finite_or_str(d["z_score"]),
            "budget": d["budget"],
            "pass": d["passed"],
        }


def _finite_or_str(x):
    if x is None or math.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


def sample_moment(x, r: int, quantity: str = "", t: float | None = None) -> MomentReport:
    """Raw r-th moment of i.i.d. samples with its standard error."""
    if r < 1:
        raise UsageError(f"moment order must be >= 1, got {r}")
    x = np.asarray(x, dtype=float)
    pw = x ** r
    se = float(np.std(pw, ddof=1) / math.sqrt(pw.size)) if pw.size > 1 else 0.0
    return MomentReport(estimate=float(pw.mean()), std_error=se, quantity=quantity or f"E[Z^{r}]", t=t)


def ensemble_moment(ens, t: float, r: int) -> MomentReport:
    """Raw r-th moment across replicates at time ``t`` (which must be on the grid).

    The raw second moment is used as the variance estimate: every route has
    mean exactly zero, so subtracting the sample mean only adds noise.
    """
    try:
        col = ens.column(t)
    except KeyError:
        raise UsageError(f"t={t} is not on the ensemble grid") from None
    return sample_moment(col, r, quantity=f"E[Z(t)^{r}]", t=float(t))


def covariance_vs_fbm(ens, hurst: float, pairs, budget: float = 0.0):
    """Empirical E[Z(t1) Z(t2)] against the fBm covariance for each pair.

    Returns ``(rmse, reports)``.
    """
    from .gaussian_field import fbm_covariance

    reports = []
    errs = []
    for t1, t2 in pairs:
        prod = ens.column(t1) * ens.column(t2)
        target = float(fbm_covariance(hurst, t1, t2))
        se = float(np.std(prod, ddof=1) / math.sqrt(prod.size))
        rep = MomentReport(estimate=float(prod.mean()), std_error=se,
                           quantity=f"Cov(Z({t1:g}),Z({t2:g}))", t=float(t2))
        rep = rep.against(target, budget)
        reports.append(rep)
        errs.append(rep.estimate - target)
    rmse = float(np.sqrt(np.mean(np.square(errs)))) if errs else 0.0
    return rmse, reports


# c(alpha) = sqrt(-ln(alpha / 2) / 2)
def ks_critical(n: int, m: int, alpha: float = 0.01) -> float:
    return math.sqrt(-math.log(alpha / 2) / 2) * math.sqrt((n + m) / (n * m))


def ks_two_sample(a, b, alpha: float = 0.01):
    """Two-sample Kolmogorov-Smirnov statistic and pass flag at level ``alpha``.

    Returns ``(statistic, passed, critical_value)``.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size < 100 or b.size < 100:
        raise UsageError(f"KS test needs at least 100 samples per side, got {a.size} and {b.size}")
    grid = np.concatenate((a, b))
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    stat = float(np.max(np.abs(fa - fb)))
    crit = ks_critical(a.size, b.size, alpha)
    return stat, stat <= crit, crit
