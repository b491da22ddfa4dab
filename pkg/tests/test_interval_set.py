import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermite_cover.errors import DomainError, UsageError
from hermite_cover.interval_set import (
    IntervalSet,
    complement,
    complement_of_open_cover,
    cumulative_measure,
    dilate,
    intersect,
    measure_on,
    shift_clip,
)

W = 1.0
coord = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def interval_sets(draw, max_size=8):
    pts = draw(st.lists(st.tuples(coord, coord), max_size=max_size))
    return IntervalSet(W, [(min(a, b), max(a, b)) for a, b in pts])


def member(A, xs):
    # brute-force membership oracle
    xs = np.asarray(xs)
    out = np.zeros(xs.shape, bool)
    for l, r in A.intervals:
        out |= (xs >= l) & (xs <= r)
    return out


def test_open_cover_examples():
    assert complement_of_open_cover(1.0, [(0.2, 0.3)]).intervals == [(0.0, 0.2), (0.5, 1.0)]
    assert complement_of_open_cover(1.0, []).intervals == [(0.0, 1.0)]
    got = complement_of_open_cover(1.0, [(0.1, 0.3), (0.3, 0.4)])
    assert got.intervals == pytest.approx([(0.0, 0.1), (0.7, 1.0)])


def test_open_cover_keeps_shared_endpoint():
    # (1/8, 3/8) and (3/8, 5/8) leave the point 3/8 uncovered
    got = complement_of_open_cover(1.0, [(0.125, 0.25), (0.375, 0.25)])
    assert got.intervals == [(0.0, 0.125), (0.375, 0.375), (0.625, 1.0)]


@settings(max_examples=60)
@given(st.lists(st.tuples(st.floats(0, 1.2), st.floats(1e-3, 0.5)), max_size=20))
def test_open_cover_vs_membership(cover):
    A = complement_of_open_cover(1.0, cover)
    xs = np.random.default_rng(0).uniform(0, 1, 10_000)
    covered = np.zeros(xs.size, bool)
    for y, z in cover:
        covered |= (xs > y) & (xs < y + z)
    assert np.array_equal(A.contains(xs), ~covered)


def test_open_cover_rejects_bad_points():
    with pytest.raises(DomainError):
        complement_of_open_cover(1.0, [(0.1, 0.0)])
    with pytest.raises(DomainError):
        complement_of_open_cover(1.0, [(-0.1, 0.2)])


@given(interval_sets())
def test_canonical_invariants(A):
    iv = A.intervals
    for l, r in iv:
        assert 0 <= l <= r <= W
    for (_, r0), (l1, _) in zip(iv, iv[1:]):
        assert r0 < l1
    assert IntervalSet(W, iv) == A  # idempotent
    assert A.measure() <= W


def test_construction_merges_touching():
    assert IntervalSet(1.0, [(0.0, 0.2), (0.2, 0.4), (0.3, 0.5)]).intervals == [(0.0, 0.5)]


def test_construction_errors():
    with pytest.raises(UsageError):
        IntervalSet(1.0, [(0.5, 0.2)])
    with pytest.raises(DomainError):
        IntervalSet(0.0, [])


def test_immutable():
    A = IntervalSet(1.0, [(0.1, 0.2)])
    with pytest.raises(AttributeError):
        A.window_end = 2.0
    with pytest.raises(ValueError):
        A.lefts[0] = 0.0


def test_intersect_examples():
    B = IntervalSet(W, [(0.1, 0.2), (0.5, 0.9)])
    assert intersect(IntervalSet.full(W), B) == B
    got = intersect(IntervalSet(W, [(0.0, 0.3)]), IntervalSet(W, [(0.2, 0.6)]))
    assert got.intervals == [(0.2, 0.3)]
    with pytest.raises(UsageError):
        intersect(B, IntervalSet(2.0, []))


@settings(max_examples=80)
@given(interval_sets(), interval_sets(), interval_sets())
def test_intersect_algebra(A, B, C):
    AB = intersect(A, B)
    assert AB == intersect(B, A)
    assert intersect(AB, C) == intersect(A, intersect(B, C))
    assert AB.measure() <= min(A.measure(), B.measure()) + 1e-15
    xs = np.linspace(0, 1, 10_001)
    assert np.array_equal(AB.contains(xs), member(A, xs) & member(B, xs))


@given(interval_sets())
def test_complement_additivity(A):
    assert measure_on(A, 0, W) + measure_on(complement(A), 0, W) == pytest.approx(W, abs=1e-12)


def test_shift_clip_examples():
    A = IntervalSet(W, [(0.0, 0.5)])
    assert shift_clip(A, 0.0) == A
    assert shift_clip(A, 0.75).intervals == [(0.75, 1.0)]
    assert shift_clip(A, 1.0).is_empty
    assert shift_clip(A, 1.0).measure() == 0.0
    with pytest.raises(DomainError):
        shift_clip(A, -0.1)


@given(interval_sets(), st.floats(0, 1.5))
def test_shift_clip_membership(A, v):
    xs = np.linspace(0, 1, 2001)
    S = shift_clip(A, v)
    inside = xs - v >= 0
    expect = np.zeros(xs.size, bool)
    expect[inside] = member(A, xs[inside] - v)
    # endpoints can move by one rounding step under the shift
    mism = S.contains(xs) != expect
    assert mism.sum() <= 2 * len(A)


def test_dilate_examples():
    P = IntervalSet(W, [(0.5, 0.5)])
    D = dilate(P, 0.2)
    assert D.intervals == pytest.approx([(0.4, 0.6)])
    assert D.measure() == pytest.approx(0.2)
    assert dilate(IntervalSet.full(W), 0.3) == IntervalSet.full(W)
    with pytest.raises(DomainError):
        dilate(P, 0.0)


@given(interval_sets(), st.floats(1e-4, 0.3))
def test_dilate_subadditive(A, h):
    assert dilate(A, h).measure() <= A.measure() + h * len(A) + 1e-12 if len(A) else dilate(A, h).is_empty


def test_measure_on_examples():
    assert measure_on(IntervalSet.full(W), 0, 0.37) == pytest.approx(0.37)
    assert measure_on(IntervalSet.empty(W), 0, 1) == 0.0
    A = IntervalSet(W, [(0.0, 0.3), (0.6, 1.0)])
    assert measure_on(A, 0.2, 0.8) == pytest.approx(0.3)
    with pytest.raises(UsageError):
        measure_on(A, 0.8, 0.2)


@given(interval_sets(), st.lists(coord, min_size=1, max_size=10))
def test_cumulative_measure_matches_measure_on(A, ts):
    ts = np.sort(np.array(ts))
    expect = [measure_on(A, 0.0, t) for t in ts]
    np.testing.assert_allclose(cumulative_measure(A, ts), expect, atol=1e-14)


def test_json_round_trip():
    A = IntervalSet(W, [(0.1, 0.25), (0.5, 0.5), (0.7, 1.0)])
    assert IntervalSet.from_json(A.to_json(), W) == A
