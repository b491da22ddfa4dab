"""Hermite process sample paths by independent routes.

``chaos``      He_p of the stationary Gaussian process with covariance p_eps,
               integrated in time (the Hermite-polynomial form of the
               covering approximation).
``atoms``      the local-time representation over a probability space, with
               the Wiener-Ito integral discretized by M sampled atoms.
``timedomain`` the classical moving-average kernel representation.
``fbm_exact``  exact fractional Brownian motion (p = 1 reference).

Every replicate draws from its own generator, derived from (seed, replicate
index), and replicates are processed in fixed-size blocks, so results do not
depend on how many workers run the blocks.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .covering import drift_d_eps, sample_covering, sample_shift_V
from .errors import ConfigError, UnsupportedError
from .gaussian_field import FBMSampler, StationarySampler, cov_grid_p_eps
from .interval_set import shift_clip
from .local_time import local_time_prefactor
from .specfun import HermiteParams, derive_params, hermite_poly, log_gamma, scale_const_T

__all__ = [
    "ROUTES",
    "PathEnsemble",
    "SimConfig",
    "replicate_rng",
    "simulate",
    "simulate_atoms",
    "simulate_chaos",
    "simulate_timedomain",
]

ROUTES = ("chaos", "atoms", "timedomain", "fbm_exact")
BLOCK = 50
# geometric growth of far-field cells in the time-domain route
FAR_RATIO = 1.05


def default_t_grid(T: float = 1.0, n: int = 21) -> tuple:
    return tuple(np.round(np.linspace(0.0, T, n), 12).tolist())


@dataclass(frozen=True)
class SimConfig:
    beta: float
    p: int
    route: str
    replicates: int = 100
    seed: int = 0
    eps: float | None = None
    delta: float | None = None
    M: int | None = None
    x_cut: float | None = None
    T: float = 1.0
    t_grid: tuple | None = None
    kappa_mode: str = "asymptotic"
    normalize: bool = False

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ConfigError(f"unknown route {self.route!r}; choose from {', '.join(ROUTES)}")
        derive_params(self.beta, self.p)
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not self.T > 0:
            raise ConfigError("horizon T must be positive")
        grid = default_t_grid(self.T) if self.t_grid is None else tuple(float(t) for t in self.t_grid)
        g = np.asarray(grid)
        if g.size == 0 or g[0] != 0.0 or np.any(np.diff(g) <= 0) or g[-1] > self.T:
            raise ConfigError("t_grid must start at 0, increase, and stay inside [0, T]")
        object.__setattr__(self, "t_grid", grid)
        if self.kappa_mode not in ("asymptotic", "exact"):
            raise ConfigError("kappa_mode must be 'asymptotic' or 'exact'")
        if self.route in ("chaos", "atoms") and not (self.eps and self.eps > 0):
            raise ConfigError(f"route {self.route} needs eps > 0")
        if self.route in ("chaos", "timedomain") and not (self.delta and self.delta > 0):
            raise ConfigError(f"route {self.route} needs delta > 0")
        if self.route == "chaos" and self.delta > self.eps:
            raise ConfigError(f"chaos route needs delta <= eps (got delta={self.delta}, eps={self.eps})")
        if self.route == "atoms":
            if self.p > 3:
                raise ConfigError("atoms route supports p <= 3")
            if self.M is None or self.M < 4 * self.p:
                raise ConfigError(f"atoms route needs M >= 4p = {4 * self.p}")
        if self.route == "timedomain":
            if self.p > 2:
                raise ConfigError("timedomain route supports p <= 2")
            if self.x_cut is not None and not self.x_cut > 0:
                raise ConfigError("x_cut must be positive")

    @property
    def params(self) -> HermiteParams:
        return derive_params(self.beta, self.p)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["t_grid"] = list(self.t_grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass
class PathEnsemble:
    t_grid: np.ndarray
    values: np.ndarray  # (replicates, len(t_grid))
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.t_grid.size:
            raise ValueError("values must be (replicates, len(t_grid))")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("ensemble contains non-finite values")

    @property
    def replicates(self) -> int:
        return self.values.shape[0]

    def column(self, t: float) -> np.ndarray:
        idx = np.flatnonzero(np.isclose(self.t_grid, t, rtol=0, atol=1e-12))
        if idx.size == 0:
            raise KeyError(t)
        return self.values[:, idx[0]]

    def to_csv(self) -> str:
        lines = ["replicate,t,value"]
        for i, row in enumerate(self.values):
            lines.extend(f"{i},{t:.17g},{v:.17g}" for t, v in zip(self.t_grid, row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {"meta": self.meta, "t_grid": self.t_grid.tolist(), "values": self.values.tolist()},
            indent=None,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "PathEnsemble":
        d = json.loads(text)
        return cls(t_grid=np.array(d["t_grid"], dtype=float),
                   values=np.array(d["values"], dtype=float).reshape(-1, len(d["t_grid"])),
                   meta=d["meta"])


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for one replicate, a pure function of (seed, index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _grid_counts(t_grid, delta):
    # number of left grid points j * delta strictly below each t
    return np.ceil(np.asarray(t_grid) / delta - 1e-9).astype(int)


# ---------------------------------------------------------------- chaos route

def chaos_kappa(params: HermiteParams, eps: float, mode: str = "asymptotic") -> float:
    """Scale turning int He_p(G) dx into the standardized chaos path (before c_{p,beta})."""
    b, p = params.beta, params.p
    if mode == "asymptotic":
        logk = (p / 2) * (log_gamma(b) + log_gamma(2 - b)) - log_gamma(params.beta_p)
        logk += p * (b - 1) / 2 * (math.log(eps) - 1)
        return math.exp(logk)
    # exact drift, limit mass pi_0([0, 1]) = 1 / Gamma(2 - beta)
    ratio = drift_d_eps(b, eps) * math.exp(log_gamma(2 - b))
    return local_time_prefactor(params, eps) * ratio ** (p / 2)


def _chaos_block(cfg: SimConfig, start: int, stop: int) -> np.ndarray:
    P = cfg.params
    n = int(math.ceil(cfg.T / cfg.delta - 1e-9))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cov = cov_grid_p_eps(P.beta, cfg.eps, cfg.delta, max(n, 2))
    sampler = StationarySampler(cov)
    counts = _grid_counts(cfg.t_grid, cfg.delta)
    scale = P.c_const * chaos_kappa(P, cfg.eps, cfg.kappa_mode) * cfg.delta
    out = np.empty((stop - start, len(cfg.t_grid)))
    for row, i in enumerate(range(start, stop)):
        g = sampler.sample(replicate_rng(cfg.seed, i))[:n]
        cum = np.concatenate(([0.0], np.cumsum(hermite_poly(P.p, g))))
        out[row] = scale * cum[counts]
    return out


# ---------------------------------------------------------------- atoms route

def _draw_atoms(cfg: SimConfig, rng):
    """M shifted uncovered sets and Gaussian weights for one replicate."""
    sets, shifts = [], []
    for _ in range(cfg.M):
        cs = sample_covering(cfg.beta, cfg.eps, cfg.T, rng)
        v = sample_shift_V(cfg.beta, cfg.T, rng)
        sets.append(shift_clip(cs.uncovered, v))
        shifts.append(v)
    weights = rng.standard_normal(cfg.M)
    return sets, np.array(shifts), weights


def distinct_tuple_sums(sets, weights, t_grid, p: int) -> np.ndarray:
    """Sum over ordered p-tuples of distinct indices of meas(cap sets, [0, t]) * prod weights.

    Instead of enumerating tuples, sweep the common refinement of all
    endpoints: on each elementary segment the tuple sum equals p! times the
    elementary symmetric polynomial e_p of the weights of the sets covering
    it, obtained from power sums by Newton's identities.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    lefts = np.concatenate([s.lefts for s in sets]) if sets else np.empty(0)
    rights = np.concatenate([s.rights for s in sets]) if sets else np.empty(0)
    owner = np.repeat(np.arange(len(sets)), [len(s) for s in sets])
    cuts = np.unique(np.concatenate((lefts, rights, t_grid)))
    il = np.searchsorted(cuts, lefts)
    ir = np.searchsorted(cuts, rights)
    width = np.diff(cuts)
    power = []
    for m in range(1, p + 1):
        w = weights[owner] ** m
        d = np.bincount(il, w, minlength=cuts.size) - np.bincount(ir, w, minlength=cuts.size)
        power.append(np.cumsum(d)[:-1])
    if p == 1:
        e = power[0]
    elif p == 2:
        e = (power[0] ** 2 - power[1]) / 2
    elif p == 3:
        e = (power[0] ** 3 - 3 * power[0] * power[1] + 2 * power[2]) / 6
    else:
        raise UnsupportedError("tuple sums implemented for p <= 3")
    seg = math.factorial(p) * e * width
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    return cum[np.searchsorted(cuts, t_grid)]


def _atoms_block(cfg: SimConfig, start: int, stop: int) -> np.ndarray:
    P = cfg.params
    scale = scale_const_T(P, cfg.T) * cfg.M ** (-P.p / 2) * local_time_prefactor(P, cfg.eps)
    out = np.empty((stop - start, len(cfg.t_grid)))
    for row, i in enumerate(range(start, stop)):
        sets, _, weights = _draw_atoms(cfg, replicate_rng(cfg.seed, i))
        out[row] = scale * distinct_tuple_sums(sets, weights, cfg.t_grid, P.p)
    return out


# ----------------------------------------------------------- time-domain route

def auto_x_cut(params: HermiteParams, T: float = 1.0, target: float = 0.01) -> float:
    """Smallest power of ten whose truncation bound is below ``target``."""
    X = 10.0
    while truncation_bound(params, X, T) > target:
        X *= 10.0
    return X


def truncation_bound(params: HermiteParams, X: float, T: float = 1.0) -> float:
    """Upper bound on the relative variance lost by dropping x < -X."""
    b = params.beta
    tail = X ** (b - 1) / (1 - b)
    log_beta_fn = log_gamma(b / 2) + log_gamma(1 - b) - log_gamma(1 - b / 2)
    return params.p * tail * T ** (1 - b) / math.exp(log_beta_fn)


def _x_cells(cfg: SimConfig, X: float):
    """Cell edges on [-X, T]: step delta near the origin, geometric beyond."""
    d = cfg.delta
    near = min(X, max(2.0, 2.0 * cfg.T))
    k = int(round(near / d))
    n_pos = int(math.ceil(cfg.T / d - 1e-9))
    edges = d * np.arange(-k, n_pos + 1, dtype=float)
    far = []
    e, w = edges[0], d
    while e > -X + 1e-9 * d:
        w *= FAR_RATIO
        e = max(e - w, -X)
        far.append(e)
    return np.concatenate((np.array(far[::-1]), edges))


def _cell_avg_power(s, a, b, gamma):
    # (1 / (b - a)) int_a^b (s - x)_+^gamma dx, broadcast over s (rows) and cells (cols)
    g1 = gamma + 1.0
    hi = np.clip(s - a, 0.0, None) ** g1
    lo = np.clip(s - b, 0.0, None) ** g1
    return (hi - lo) / (g1 * (b - a))


def timedomain_design(cfg: SimConfig):
    """Precompute the kernel matrices shared by every replicate."""
    P = cfg.params
    X = cfg.x_cut if cfg.x_cut is not None else auto_x_cut(P, cfg.T)
    edges = _x_cells(cfg, X)
    a, b = edges[:-1], edges[1:]
    widths = b - a
    half = P.beta / 2
    if P.p == 1:
        t = np.asarray(cfg.t_grid)[:, None]
        # h_t(x) = (2/beta) ((t - x)_+^{beta/2} - (-x)_+^{beta/2}), averaged over each cell
        A = (_cell_avg_power(t, a, b, half) - _cell_avg_power(0.0, a, b, half)) / half
        return dict(X=X, widths=widths, A=A * np.sqrt(widths))
    n_s = int(math.ceil(cfg.T / cfg.delta - 1e-9))
    s = ((np.arange(n_s) + 0.5) * cfg.delta)[:, None]
    K = _cell_avg_power(s, a, b, half - 1.0) * np.sqrt(widths)
    return dict(X=X, widths=widths, K=K, counts=_grid_counts(cfg.t_grid, cfg.delta))


def _timedomain_block(cfg: SimConfig, start: int, stop: int, design=None) -> np.ndarray:
    P = cfg.params
    design = design or timedomain_design(cfg)
    n_cells = design["widths"].size
    noise = np.stack([replicate_rng(cfg.seed, i).standard_normal(n_cells) for i in range(start, stop)], axis=1)
    if P.p == 1:
        return (P.a_const * design["A"] @ noise).T
    K = design["K"]
    Y = K @ noise
    D = (K * K) @ (noise * noise)
    integrand = (Y * Y - D) * cfg.delta
    cum = np.vstack((np.zeros((1, noise.shape[1])), np.cumsum(integrand, axis=0)))
    return (P.a_const * cum[design["counts"]]).T


# ------------------------------------------------------------- fBm reference

def _fbm_block(cfg: SimConfig, start: int, stop: int) -> np.ndarray:
    sampler = FBMSampler(cfg.params.hurst, cfg.t_grid)
    return np.stack([sampler.sample(replicate_rng(cfg.seed, i)) for i in range(start, stop)])


_BLOCKS = {
    "chaos": _chaos_block,
    "atoms": _atoms_block,
    "timedomain": _timedomain_block,
    "fbm_exact": _fbm_block,
}


def _run_block(args):
    cfg, start, stop = args
    return _BLOCKS[cfg.route](cfg, start, stop)


def _route_warnings(cfg: SimConfig) -> list[str]:
    notes = []
    if cfg.route == "chaos" and cfg.delta > cfg.eps / 4:
        notes.append(f"delta={cfg.delta:g} > eps/4; Riemann sums may not resolve the kink of p_eps")
    if cfg.route == "timedomain":
        X = cfg.x_cut if cfg.x_cut is not None else auto_x_cut(cfg.params, cfg.T)
        bound = truncation_bound(cfg.params, X, cfg.T)
        if bound > 0.01:
            notes.append(f"x_cut={X:g} may omit up to {100 * bound:.1f}% of the variance")
    return notes


def simulate(cfg: SimConfig, workers: int = 1) -> PathEnsemble:
    """Run ``cfg.route`` and return the replicate-by-time ensemble."""
    if cfg.route not in _BLOCKS:
        raise ConfigError(f"unknown route {cfg.route!r}")
    notes = _route_warnings(cfg)
    for msg in notes:
        warnings.warn(msg, stacklevel=2)
    jobs = [(cfg, s, min(s + BLOCK, cfg.replicates)) for s in range(0, cfg.replicates, BLOCK)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_run_block, jobs))
    else:
        blocks = [_run_block(j) for j in jobs]
    values = np.vstack(blocks)
    meta = {
        "config": cfg.to_dict(),
        "generator": {
            "bit_generator": "PCG64",
            "seed": cfg.seed,
            "streams": "SeedSequence(seed, spawn_key=(replicate,))",
            "block_size": BLOCK,
        },
        "version": __version__,
        "warnings": notes,
    }
    if cfg.route == "timedomain":
        meta["x_cut"] = cfg.x_cut if cfg.x_cut is not None else auto_x_cut(cfg.params, cfg.T)
    if cfg.normalize:
        col = values[:, np.argmin(np.abs(np.asarray(cfg.t_grid) - 1.0))]
        sd = float(np.sqrt(np.mean(col ** 2) - np.mean(col) ** 2))
        if sd > 0:
            tref = cfg.t_grid[int(np.argmin(np.abs(np.asarray(cfg.t_grid) - 1.0)))]
            values = values * (tref ** cfg.params.hurst / sd)
            meta["normalization_factor"] = tref ** cfg.params.hurst / sd
    return PathEnsemble(t_grid=np.asarray(cfg.t_grid), values=values, meta=meta)


def _routed(route):
    def run(cfg: SimConfig, workers: int = 1) -> PathEnsemble:
        if cfg.route != route:
            cfg = dataclasses.replace(cfg, route=route)
        return simulate(cfg, workers)

    run.__name__ = f"simulate_{route}"
    run.__doc__ = f"Simulate with the {route} route (see :func:`simulate`)."
    return run


simulate_chaos = _routed("chaos")
simulate_atoms = _routed("atoms")
simulate_timedomain = _routed("timedomain")
simulate_fbm = _routed("fbm_exact")
