import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermite_cover import derive_params
from hermite_cover.covering import make_atom, sample_covering
from hermite_cover.errors import UnsupportedError, UsageError
from hermite_cover.interval_set import IntervalSet
from hermite_cover.local_time import (
    LocalTimeConfig,
    approx_local_time,
    approx_local_time_path,
    kingman_local_time,
    local_time_prefactor,
    moment_oracle_closed,
    moment_oracle_numeric,
    moment_oracle_printed_exponent,
)


def _atoms(p, beta=0.8, eps=0.01, seed=0, n=1):
    rng = np.random.default_rng(seed)
    return [[make_atom(beta, eps, 1.0, 1.0, rng) for _ in range(p)] for _ in range(n)]


def test_prefactor():
    P = derive_params(0.8, 2)
    eps = 1e-3
    assert local_time_prefactor(P, eps) == pytest.approx((eps / math.e) ** (P.beta_p - 1) / math.gamma(P.beta_p))


def test_config_validation():
    P = derive_params(0.6, 1)
    with pytest.raises(UsageError):
        LocalTimeConfig(P, 0.0, (0.0, 1.0))
    with pytest.raises(UsageError):
        LocalTimeConfig(P, 0.1, (0.5, 0.2))
    with pytest.raises(UsageError):
        LocalTimeConfig(P, 0.1, (0.0, 2.0), T=1.0)


def test_approx_local_time_basics():
    P = derive_params(0.8, 2)
    cfg = LocalTimeConfig(P, 0.01, tuple(np.linspace(0, 1, 11)))
    for atoms in _atoms(2, n=50, seed=1):
        assert approx_local_time(atoms, cfg, 0.0) == 0.0
        path = approx_local_time_path(atoms, cfg)
        assert np.all(np.diff(path) >= 0)
        assert path[-1] == pytest.approx(approx_local_time(atoms, cfg, 1.0), abs=1e-15)
        vmax = max(a.shift for a in atoms)
        if vmax < 1:
            assert approx_local_time(atoms, cfg, vmax * 0.999) == 0.0
    with pytest.raises(UsageError):
        approx_local_time(_atoms(1)[0], cfg, 1.0)
    with pytest.raises(UsageError):
        approx_local_time(_atoms(2)[0], cfg, 1.5)


def test_kingman_examples():
    beta, t = 0.5, 0.4
    full = IntervalSet(1.0, [(0.0, t)])
    point = IntervalSet(1.0, [(0.3, 0.3)])
    g = math.gamma(2 - beta)
    for n in (10, 100, 1000):
        assert kingman_local_time(full, beta, t, [n])[0] == pytest.approx(g * n ** (1 - beta) * (t + 1 / n))
        assert kingman_local_time(point, beta, 1.0, [n])[0] == pytest.approx(g * n ** (-beta))
    with pytest.raises(UsageError):
        kingman_local_time(full, 1.0, t, [10])
    with pytest.raises(UsageError):
        kingman_local_time(full, beta, 2.0, [10])


def test_kingman_mean_level_100():
    # at level 100 the finite-eps bias is small; level 1000 is the acceptance check
    rng = np.random.default_rng(2)
    est = [kingman_local_time(sample_covering(0.5, 1e-4, 1.0, rng).uncovered, 0.5, 1.0, [100])[0]
           for _ in range(2000)]
    target = 1 / math.gamma(1.5)
    assert abs(np.mean(est) - target) <= 3 * np.std(est) / math.sqrt(2000) + 0.1 * target


def test_closed_form_examples():
    P = derive_params(0.6, 1)
    assert moment_oracle_closed(P, 0, 0.7) == 1.0
    for t in (0.3, 1.0):
        assert moment_oracle_closed(P, 1, t) == pytest.approx(math.gamma(1.4) * t, rel=1e-13)
    for p, beta in ((1, 0.6), (2, 0.8), (3, 0.9)):
        Q = derive_params(beta, p)
        assert math.factorial(p) * moment_oracle_closed(Q, 2, 1.0) * Q.c_const ** 2 == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.floats(0.05, 1.0))
def test_closed_form_t_scaling(p, r, t):
    P = derive_params(1 - 0.5 / p, p)
    ratio = moment_oracle_closed(P, r, t) / moment_oracle_closed(P, r, 1.0)
    assert ratio == pytest.approx(t ** ((r - 1) * P.beta_p + 1), rel=1e-12)


@pytest.mark.parametrize("p, r, beta", [(1, 1, 0.5), (1, 2, 0.3), (1, 2, 0.7), (2, 1, 0.75), (2, 2, 0.8), (2, 2, 0.6)])
def test_numeric_matches_closed(p, r, beta):
    P = derive_params(beta, p)
    assert moment_oracle_numeric(P, r, 1.0) == pytest.approx(moment_oracle_closed(P, r, 1.0), abs=1e-6)


@pytest.mark.slow
def test_numeric_matches_closed_r3():
    P = derive_params(0.5, 1)
    assert moment_oracle_numeric(P, 3, 1.0) == pytest.approx(moment_oracle_closed(P, 3, 1.0), abs=1e-6)


def test_numeric_examples():
    P = derive_params(0.5, 1)
    assert moment_oracle_numeric(P, 1, 1.0) == pytest.approx(math.gamma(1.5), abs=1e-6)
    ratio = moment_oracle_numeric(P, 2, 0.5) / moment_oracle_numeric(P, 2, 1.0)
    assert ratio == pytest.approx(0.5 ** (P.beta_p + 1), rel=1e-6)
    with pytest.raises(UnsupportedError):
        moment_oracle_numeric(P, 4, 1.0)


def test_printed_exponent_breaks_linear_growth():
    P = derive_params(0.5, 1)
    ratio = moment_oracle_printed_exponent(P, 1, 0.5) / moment_oracle_printed_exponent(P, 1, 1.0)
    assert ratio == pytest.approx(2.0)  # grows like 1/t, not t


def test_finite_eps_mean_matches_exact_quadrature():
    # E[L_eps] at finite eps has its own quadrature oracle, separate from the limit
    beta, eps = 0.5, 0.01
    P = derive_params(beta, 1)
    cfg = LocalTimeConfig(P, eps, (0.0, 1.0))
    rng = np.random.default_rng(4)
    L = np.array([approx_local_time([make_atom(beta, eps, 1.0, 1.0, rng)], cfg, 1.0) for _ in range(20_000)])
    target = moment_oracle_numeric(P, 1, 1.0, eps=eps)
    assert abs(L.mean() - target) <= 3 * L.std() / math.sqrt(L.size)
