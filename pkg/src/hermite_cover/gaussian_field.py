"""Stationary Gaussian sequences and exact fractional Brownian motion.

The covering covariance p_eps(|x - y|) is sampled by circulant embedding;
materially non-embeddable covariances fall back to a dense Cholesky factor.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .covering import hitting_prob
from .errors import CapacityError, DomainError, NumericalError

log = logging.getLogger(__name__)

__all__ = [
    "CovarianceGrid",
    "StationarySampler",
    "cov_grid_p_eps",
    "fbm_covariance",
    "sample_fbm",
    "sample_stationary",
]

CLAMP_TOL = 1e-8
MAX_FBM_GRID = 8192


@dataclass(frozen=True)
class CovarianceGrid:
    delta: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("covariance grid must be a nonempty 1-d sequence")
        if not v[0] > 0:
            raise DomainError("r(0) must be positive")
        if np.any(np.abs(v) > v[0] * (1 + 1e-12)):
            raise DomainError("|r(k)| must not exceed r(0)")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


def cov_grid_p_eps(beta: float, eps: float, delta: float, n: int) -> CovarianceGrid:
    """Autocovariances p_eps(k delta), k = 0..n-1."""
    if not delta > 0:
        raise DomainError(f"grid step must be positive, got {delta!r}")
    if n < 2:
        raise DomainError(f"need n >= 2 grid points, got {n}")
    if delta > eps / 4:
        warnings.warn(
            f"grid step {delta:g} exceeds eps/4 = {eps / 4:g}; the kink of p_eps at eps is under-resolved",
            stacklevel=2,
        )
    values = hitting_prob(beta, eps, delta * np.arange(n))
    return CovarianceGrid(delta=float(delta), values=values)


class StationarySampler:
    """Factorizes a stationary covariance once; draws any number of paths.

    The factorization is read-only after construction, so one sampler can be
    shared between workers that each hold their own generator.
    """

    def __init__(self, cov: CovarianceGrid, tol_rel: float = CLAMP_TOL):
        self.cov = cov
        r = cov.values
        n = r.size
        self.n = n
        self.method = "circulant"
        self._sqrt_eig = None
        self._chol = None
        if n == 1:
            self.method = "cholesky"
            self._chol = np.sqrt(r[:1]).reshape(1, 1)
            return
        row = np.concatenate((r, r[-2:0:-1]))
        eig = np.fft.rfft(row).real
        top = eig.max()
        # eigenvalues at FFT roundoff level are zero; sqrt would amplify them
        eig[np.abs(eig) <= 64 * np.finfo(float).eps * row.size * top] = 0.0
        worst = eig.min()
        if worst >= -tol_rel * top:
            if worst < 0:
                eig = np.clip(eig, 0.0, None)
                # renormalize so the marginal variance stays r(0)
                full = np.concatenate((eig, eig[-2:0:-1]))
                eig = eig * (r[0] * row.size / full.sum())
            self._m = row.size
            self._sqrt_eig = np.sqrt(eig / row.size)
            return
        log.info("circulant embedding not nonnegative (min eig %.3g); using Cholesky", worst)
        self.method = "cholesky"
        self._chol = _dense_cholesky(r, worst)

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """One path of length n, or ``size`` independent paths stacked row-wise."""
        k = 1 if size is None else int(size)
        if self.method == "cholesky":
            out = rng.standard_normal((k, self.n)) @ self._chol.T
        else:
            out = self._circulant(rng, k)
        return out[0] if size is None else out

    def _circulant(self, rng, k):
        m = self._m
        half = m // 2 + 1
        # complex noise on the full spectrum, then FFT; the real part has
        # covariance equal to the circulant row
        full = np.empty(m)
        full[:half] = self._sqrt_eig
        full[half:] = self._sqrt_eig[1 : m - half + 1][::-1]
        w = rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))
        paths = np.fft.fft(full * w, axis=1).real
        return paths[:, : self.n]


def _dense_cholesky(r, worst_circulant):
    n = r.size
    idx = np.arange(n)
    C = r[np.abs(idx[:, None] - idx[None, :])]
    try:
        return linalg.cholesky(C, lower=True)
    except linalg.LinAlgError:
        w = linalg.eigvalsh(C)
        raise NumericalError(
            "covariance not realizable: circulant min eigenvalue "
            f"{worst_circulant:.3e}, dense min eigenvalue {w.min():.3e}"
        ) from None


def sample_stationary(cov: CovarianceGrid, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Zero-mean stationary Gaussian path(s) with autocovariance ``cov``."""
    return StationarySampler(cov).sample(rng, size)


def fbm_covariance(hurst: float, t1, t2):
    """1/2 (t1^2H + t2^2H - |t1 - t2|^2H)."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(t1) ** h2 + np.abs(t2) ** h2 - np.abs(t1 - t2) ** h2)


class FBMSampler:
    """Dense Cholesky factor of the fBm covariance on a fixed grid."""

    def __init__(self, hurst: float, t_grid):
        if not (0.0 < hurst < 1.0):
            raise DomainError(f"Hurst index must lie in (0, 1), got {hurst!r}")
        t = np.asarray(t_grid, dtype=float)
        if t.ndim != 1 or t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise DomainError("t_grid must be increasing and start at 0")
        if t.size > MAX_FBM_GRID:
            raise CapacityError(f"fBm grid of {t.size} points exceeds the dense limit {MAX_FBM_GRID}")
        self.t = t
        inner = t[1:]
        C = fbm_covariance(hurst, inner[:, None], inner[None, :])
        self._chol = linalg.cholesky(C, lower=True) if inner.size else np.zeros((0, 0))

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        k = 1 if size is None else int(size)
        out = np.zeros((k, self.t.size))
        out[:, 1:] = rng.standard_normal((k, self.t.size - 1)) @ self._chol.T
        return out[0] if size is None else out


def sample_fbm(hurst: float, t_grid, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Exact fBm on ``t_grid`` (which must start at 0); B(0) = 0."""
    return FBMSampler(hurst, t_grid).sample(rng, size)
