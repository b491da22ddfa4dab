"""Special functions and the closed-form constants of Hermite processes.

All gamma-bearing constants are assembled in log space: for p >= 3 the
individual factors overflow long before their ratios do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError

__all__ = [
    "HermiteParams",
    "derive_params",
    "hermite_poly",
    "log_gamma",
    "reg_lower_inc_gamma",
    "scale_const_T",
]


def log_gamma(x: float) -> float:
    """Return ln Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def reg_lower_inc_gamma(a: float, x):
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    if not a > 0.0:
        raise DomainError(f"reg_lower_inc_gamma requires a > 0, got {a!r}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise DomainError("reg_lower_inc_gamma requires x >= 0")
    out = special.gammainc(a, xa)
    return float(out) if out.ndim == 0 else out


def hermite_poly(p: int, x):
    """Probabilists' Hermite polynomial He_p evaluated at ``x``.

    Uses the three-term recurrence He_{k+1} = x He_k - k He_{k-1}, which is
    stable for the small orders used here. Works elementwise on arrays.
    """
    if p < 0:
        raise DomainError(f"Hermite order must be >= 0, got {p}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for k in range(1, p):
        prev, cur = cur, x * cur - k * prev
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class HermiteParams:
    """Validated (beta, p) pair with every derived scalar.

    ``a_const``, ``b_const`` standardize the time- and frequency-domain
    representations; ``c_const`` standardizes the local-time representation.
    """

    p: int
    beta: float
    beta_p: float
    hurst: float
    a_const: float
    b_const: float
    c_const: float

    @property
    def valid_range(self) -> tuple[float, float]:
        return (1.0 - 1.0 / self.p, 1.0)


def _log_a_const(beta: float, p: int, beta_p: float, hurst: float) -> float:
    log_b = log_gamma(beta / 2) + log_gamma(1 - beta) - log_gamma(1 - beta / 2)
    return 0.5 * (math.log(hurst) + math.log(beta_p) - math.lgamma(p + 1) - p * log_b)


def _log_b_const(beta: float, p: int, beta_p: float, hurst: float) -> float:
    log_s = log_gamma(1 - beta) + math.log(math.sin(beta * math.pi / 2))
    return 0.5 * (math.log(hurst) + math.log(beta_p) - math.lgamma(p + 1) - p * log_s)


def _log_c_const(beta: float, p: int, beta_p: float) -> float:
    num = log_gamma(beta_p) + log_gamma(beta_p + 2)
    den = math.log(2.0) + math.lgamma(p + 1) + p * (log_gamma(beta) + log_gamma(2 - beta))
    return 0.5 * (num - den)


def derive_params(beta: float, p: int) -> HermiteParams:
    """Validate ``(beta, p)`` and compute beta_p, H and the a/b/c constants.

    Raises ParameterError unless p >= 1 and 1 - 1/p < beta < 1 (open interval;
    the lower boundary makes beta_p = 0 and degenerates every local time).
    """
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise ParameterError(f"order p must be an integer >= 1, got {p!r}")
    p = int(p)
    beta = float(beta)
    lo = 1.0 - 1.0 / p
    if not (lo < beta < 1.0):
        raise ParameterError(
            f"beta={beta!r} outside the open interval ({_fmt(lo)}, 1) required for p={p}"
        )
    beta_p = (beta - 1.0) * p + 1.0
    hurst = 1.0 - p * (1.0 - beta) / 2.0
    return HermiteParams(
        p=p,
        beta=beta,
        beta_p=beta_p,
        hurst=hurst,
        a_const=math.exp(_log_a_const(beta, p, beta_p, hurst)),
        b_const=math.exp(_log_b_const(beta, p, beta_p, hurst)),
        c_const=math.exp(_log_c_const(beta, p, beta_p)),
    )


def _fmt(x: float) -> str:
    frac = {0.0: "0", 0.5: "1/2"}
    return frac.get(x, f"{x:.6g}")


def scale_const_T(params: HermiteParams, T: float) -> float:
    """Constant of the probability-space representation over [0, T]."""
    if not T > 0:
        raise DomainError(f"horizon T must be positive, got {T!r}")
    return T ** (params.p * (1.0 - params.beta) / 2.0) * params.c_const
