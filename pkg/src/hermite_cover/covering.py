"""Random interval covering of [0, W] and the stationarizing shift.

A Poisson point process with intensity (1 - beta) dy z^-2 dz on
[0, inf)^2 drops open intervals (y, y + z); keeping only widths z >= eps,
the uncovered set R_eps is a regenerative set which tends to a beta-stable
regenerative set as eps -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError, UsageError
from .interval_set import IntervalSet, complement_of_open_cover, shift_clip
from .specfun import log_gamma, reg_lower_inc_gamma

__all__ = [
    "CoveringSample",
    "ShiftedAtom",
    "drift_d_eps",
    "f_eps",
    "hitting_prob",
    "make_atom",
    "sample_covering",
    "sample_shift_V",
]


def _check_beta(beta: float):
    if not (0.0 < beta < 1.0):
        raise ParameterError(f"beta must lie in (0, 1), got {beta!r}")


def _check_eps(eps: float):
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps!r}")


@dataclass(frozen=True)
class CoveringSample:
    eps: float
    window_end: float
    points: np.ndarray  # (N, 2) rows of (y, z)
    uncovered: IntervalSet


@dataclass(frozen=True)
class ShiftedAtom:
    set: CoveringSample
    shift: float
    shifted_set: IntervalSet = field(repr=False)


def sample_covering(beta: float, eps: float, W: float, rng: np.random.Generator) -> CoveringSample:
    """Draw the uncovered set R_eps on [0, W].

    N ~ Poisson((1 - beta) W / eps) intervals with y ~ U[0, W] and
    z = eps / U. There is no upper truncation of z: a giant interval simply
    covers the rest of the window.
    """
    _check_beta(beta)
    _check_eps(eps)
    if not W > 0:
        raise ParameterError(f"window end must be positive, got {W!r}")
    n = rng.poisson((1.0 - beta) * W / eps)
    y = rng.uniform(0.0, W, size=n)
    # 1 - U lies in (0, 1], which keeps z finite
    z = eps / (1.0 - rng.random(size=n))
    points = np.column_stack((y, z))
    points.flags.writeable = False
    return CoveringSample(eps=eps, window_end=float(W), points=points,
                          uncovered=complement_of_open_cover(W, points))


def hitting_prob(beta: float, eps: float, x):
    """P(x in R_eps); vectorized over ``x``."""
    _check_beta(beta)
    _check_eps(eps)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("hitting_prob requires x >= 0")
    near = np.exp((beta - 1.0) * np.minimum(x, eps) / eps)
    with np.errstate(divide="ignore"):
        far = (eps / math.e) ** (1.0 - beta) * np.maximum(x, eps) ** (beta - 1.0)
    out = np.where(x <= eps, near, far)
    return float(out) if out.ndim == 0 else out


def f_eps(beta: float, eps: float, x):
    """Rescaled hitting kernel (eps/e)^(beta-1) p_eps(x); zero for x < 0.

    ``eps = 0`` gives the limit x^(beta-1) (x > 0).
    """
    x = np.asarray(x, dtype=float)
    pos = np.maximum(x, 0.0)
    with np.errstate(divide="ignore", over="ignore"):
        limit = np.where(x > 0, pos ** (beta - 1.0), 0.0)
        if eps > 0:
            near = (np.exp(np.minimum(pos, eps) / eps - 1.0) * eps) ** (beta - 1.0)
            out = np.where(x < 0, 0.0, np.where(x <= eps, near, limit))
        else:
            out = limit
    return float(out) if out.ndim == 0 else out


def drift_d_eps(beta: float, eps: float) -> float:
    """Drift of the subordinator of R_eps under the normalization Phi(1) = 1.

    Closed form of int_0^inf e^-x p_eps(x) dx, split at x = eps; the tail
    piece is an upper incomplete gamma integral.
    """
    _check_beta(beta)
    _check_eps(eps)
    rate = 1.0 + (1.0 - beta) / eps
    head = -math.expm1(-rate * eps) / rate
    tail = (eps / math.e) ** (1.0 - beta) * math.exp(log_gamma(beta)) * (
        1.0 - reg_lower_inc_gamma(beta, eps)
    )
    return head + tail


def sample_shift_V(beta: float, T: float, rng=None, u: float | None = None) -> float:
    """Shift with CDF T^(beta-1) v^(1-beta) on [0, T], by inversion.

    ``u`` lets callers (and tests) supply the uniform directly.
    """
    _check_beta(beta)
    if not T > 0:
        raise DomainError(f"horizon T must be positive, got {T!r}")
    if u is None:
        u = rng.random()
    return T * u ** (1.0 / (1.0 - beta))


def make_atom(beta: float, eps: float, T: float, W: float, rng) -> ShiftedAtom:
    """One (R_eps, V) pair with the shifted set cached."""
    if W < T:
        raise UsageError(f"window W={W} must cover the horizon T={T}")
    cs = sample_covering(beta, eps, W, rng)
    v = sample_shift_V(beta, T, rng)
    return ShiftedAtom(set=cs, shift=v, shifted_set=shift_clip(cs.uncovered, v))
