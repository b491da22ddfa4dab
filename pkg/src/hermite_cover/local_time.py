"""Local times of intersected shifted regenerative sets.

Three views of the same quantity:

* ``approx_local_time``: the covering approximation, a rescaled Lebesgue
  measure of the intersection of p shifted uncovered sets;
* ``kingman_local_time``: Kingman's sausage estimator at finite levels;
* ``moment_oracle_closed`` / ``moment_oracle_numeric``: moments of the limit
  local time, once in closed form and once by nested quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import integrate

from .covering import ShiftedAtom, f_eps
from .errors import UnsupportedError, UsageError
from .interval_set import IntervalSet, cumulative_measure, intersect, measure_on
from .specfun import HermiteParams, log_gamma

__all__ = [
    "LocalTimeConfig",
    "approx_local_time",
    "approx_local_time_path",
    "kingman_local_time",
    "local_time_prefactor",
    "moment_oracle_closed",
    "moment_oracle_numeric",
]


@dataclass(frozen=True)
class LocalTimeConfig:
    params: HermiteParams
    eps: float
    t_grid: tuple
    T: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise UsageError(f"eps must be positive, got {self.eps!r}")
        grid = np.asarray(self.t_grid, dtype=float)
        if grid.size and (np.any(np.diff(grid) <= 0) or grid[0] < 0 or grid[-1] > self.T):
            raise UsageError("t_grid must be increasing inside [0, T]")
        object.__setattr__(self, "t_grid", tuple(grid.tolist()))


def local_time_prefactor(params: HermiteParams, eps: float) -> float:
    """(1 / Gamma(beta_p)) (eps / e)^(beta_p - 1)."""
    return math.exp((params.beta_p - 1.0) * (math.log(eps) - 1.0) - log_gamma(params.beta_p))


def _joint_set(atoms, cfg: LocalTimeConfig) -> IntervalSet:
    if len(atoms) != cfg.params.p:
        raise UsageError(f"need exactly p={cfg.params.p} atoms, got {len(atoms)}")
    return reduce(intersect, (a.shifted_set for a in atoms))


def approx_local_time(atoms: list[ShiftedAtom], cfg: LocalTimeConfig, t: float) -> float:
    """Covering approximation of the local time of the intersection up to t."""
    if not (0.0 <= t <= cfg.T):
        raise UsageError(f"t={t} outside [0, {cfg.T}]")
    joint = _joint_set(atoms, cfg)
    return local_time_prefactor(cfg.params, cfg.eps) * measure_on(joint, 0.0, t)


def approx_local_time_path(atoms: list[ShiftedAtom], cfg: LocalTimeConfig, ts=None) -> np.ndarray:
    """approx_local_time at every t in ``ts`` (default ``cfg.t_grid``), one sweep."""
    ts = np.asarray(cfg.t_grid if ts is None else ts, dtype=float)
    joint = _joint_set(atoms, cfg)
    return local_time_prefactor(cfg.params, cfg.eps) * cumulative_measure(joint, ts)


def _sausage_measure(F: IntervalSet, h: float) -> float:
    # unclipped: the sausage of a point at 0 still has length h
    if F.is_empty:
        return 0.0
    lo = F.lefts - h / 2
    hi = F.rights + h / 2
    reach = np.maximum.accumulate(hi)
    gaps = np.clip(lo[1:] - reach[:-1], 0.0, None)
    return float(reach[-1] - lo[0] - gaps.sum())


def kingman_local_time(F: IntervalSet, beta_loc: float, t: float, levels) -> list[float]:
    """Sausage ratios lambda(F_t + [-1/2n, 1/2n]) / l_beta(n) for each level n.

    Here F_t = F intersected with [0, t] and l_beta(n) = n^(beta-1) / Gamma(2-beta).
    The limsup over n is the local time; interpreting the finite sequence is
    left to the caller.
    """
    if not (0.0 < beta_loc < 1.0):
        raise UsageError(f"beta_loc must lie in (0, 1), got {beta_loc!r}")
    if t > F.window_end:
        raise UsageError(f"t={t} exceeds the window {F.window_end}")
    Ft = intersect(F, IntervalSet(F.window_end, [(0.0, t)])) if t < F.window_end else F
    lg = log_gamma(2.0 - beta_loc)
    out = []
    for n in levels:
        if n < 1:
            raise UsageError(f"levels must be >= 1, got {n}")
        ell = math.exp((beta_loc - 1.0) * math.log(n) - lg)
        out.append(_sausage_measure(Ft, 1.0 / n) / ell)
    return out


def moment_oracle_closed(params: HermiteParams, r: int, t: float) -> float:
    """r-th moment of the limit local time over [0, t] (t <= 1).

    r! Gamma(2-beta)^p Gamma(beta)^p t^((r-1) beta_p + 1)
        / (Gamma((r-1) beta_p + 2) Gamma(beta_p))
    """
    if r < 0:
        raise UsageError(f"moment order must be >= 0, got {r}")
    if r == 0:
        return 1.0
    b, p, bp = params.beta, params.p, params.beta_p
    expo = (r - 1) * bp + 1.0
    logv = (
        math.lgamma(r + 1)
        + p * (log_gamma(2.0 - b) + log_gamma(b))
        - log_gamma(expo + 1.0)
        - log_gamma(bp)
        + expo * math.log(t)
    )
    return math.exp(logv)


def moment_oracle_printed_exponent(params: HermiteParams, r: int, t: float) -> float:
    """Same formula with the t-exponent (r-1) beta_p - 1; kept for comparison only."""
    fixed = moment_oracle_closed(params, r, 1.0)
    return fixed * t ** ((r - 1) * params.beta_p - 1.0)


_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-11, limit=200)


def _power_quad(g, a: float, b: float, left: float = 0.0, right: float = 0.0) -> float:
    """int_a^b (x-a)^left (b-x)^right g(x) dx for smooth g, left/right > -1.

    Each half of the interval is mapped by u = (x - endpoint)^(1 + exponent),
    which absorbs the power singularity into the Jacobian.
    """
    if b <= a:
        return 0.0
    m = 0.5 * (a + b)
    sl, sr = 1.0 + left, 1.0 + right

    def lhs(u):
        x = a + u ** (1.0 / sl)
        return g(x) * (b - x) ** right / sl

    def rhs(u):
        x = b - u ** (1.0 / sr)
        return g(x) * (x - a) ** left / sr

    il = integrate.quad(lhs, 0.0, (m - a) ** sl, **_QUAD_OPTS)[0]
    ir = integrate.quad(rhs, 0.0, (b - m) ** sr, **_QUAD_OPTS)[0]
    return il + ir


def _shift_average(beta: float, x: float, eps: float) -> float:
    # int_0^min(x,1) (1-beta) v^-beta f(x - v) dv with f the (eps-)kernel
    top = min(x, 1.0)
    if top <= 0:
        return 0.0
    if eps == 0:
        if x <= 1.0:
            return (1.0 - beta) * _power_quad(lambda v: 1.0, 0.0, x, -beta, beta - 1.0)
        g = lambda v: (x - v) ** (beta - 1.0)  # noqa: E731
        return (1.0 - beta) * _power_quad(g, 0.0, 1.0, -beta, 0.0)
    # kink of f_eps at v = x - eps; f_eps is bounded so only v^-beta is singular
    kink = x - eps
    f = lambda v: f_eps(beta, eps, x - v)  # noqa: E731
    if kink <= 0:
        return (1.0 - beta) * _power_quad(f, 0.0, top, -beta, 0.0)
    lo = (1.0 - beta) * _power_quad(f, 0.0, min(kink, top), -beta, 0.0)
    hi = 0.0
    if kink < top:
        hi = (1.0 - beta) * integrate.quad(lambda v: f(v) * v ** -beta, kink, top, **_QUAD_OPTS)[0]
    return lo + hi


def moment_oracle_numeric(params: HermiteParams, r: int, t: float, eps: float = 0.0) -> float:
    """r-th local-time moment by nested quadrature of the ordered-simplex integral.

    Averages over the p shift variables (density (1-beta) v^-beta on [0, 1])
    and integrates the ordered times 0 < x_1 < ... < x_r < t. With ``eps = 0``
    the kernel is x^(beta-1) (the limit); ``eps > 0`` uses f_eps and gives the
    exact mean of the covering approximation. Cost grows like (quad nodes)^r,
    so r is capped at 3.
    """
    if r > 3:
        raise UnsupportedError("moment_oracle_numeric supports r <= 3")
    if r < 1:
        return 1.0
    beta, p, bp = params.beta, params.p, params.beta_p

    link_exp = bp - 1.0

    def link(y, x):
        return f_eps(beta, eps, y - x) ** p

    def tail(x, k):
        # integral over x < x_{k+1} < ... < x_r < t of the chained kernels
        if k == r:
            return 1.0
        if eps == 0:
            return _power_quad(lambda y: tail(y, k + 1), x, t, link_exp, 0.0)
        return _kinked_quad(lambda y: link(y, x) * tail(y, k + 1), x, t, x + eps)

    def outer(x1):
        return _shift_average(beta, x1, eps) ** p * tail(x1, 1)

    if eps == 0:
        total = integrate.quad(outer, 0.0, t, **_QUAD_OPTS)[0]
    else:
        total = _kinked_quad(outer, 0.0, t, eps)
    return math.factorial(r) / math.exp(r * log_gamma(bp)) * total


def _kinked_quad(g, a, b, kink):
    if a < kink < b:
        return (integrate.quad(g, a, kink, **_QUAD_OPTS)[0]
                + integrate.quad(g, kink, b, **_QUAD_OPTS)[0])
    return integrate.quad(g, a, b, **_QUAD_OPTS)[0]
