"""Finite unions of closed intervals living on a window [0, W].

Every regenerative-set sample in the package is stored as an
:class:`IntervalSet`. Values are immutable; all operations return new sets.
Merging uses exact float comparisons (no tolerance snapping): covering
endpoints are exact samples and snapping would bias measure estimates.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DomainError, UsageError

__all__ = [
    "IntervalSet",
    "complement",
    "complement_of_open_cover",
    "cumulative_measure",
    "dilate",
    "intersect",
    "measure_on",
    "shift_clip",
]


def _frozen(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


class IntervalSet:
    """Sorted, pairwise disjoint closed intervals [l_i, r_i] inside [0, W].

    Construction clips to the window and merges touching or overlapping
    intervals, so ``r_i < l_{i+1}`` always holds. Zero-length intervals
    (isolated points) are kept.
    """

    __slots__ = ("window_end", "lefts", "rights")

    def __init__(self, window_end: float, intervals=()):
        window_end = float(window_end)
        if not window_end > 0:
            raise DomainError(f"window end must be positive, got {window_end!r}")
        arr = np.asarray(intervals, dtype=float).reshape(-1, 2)
        if np.any(arr[:, 0] > arr[:, 1]):
            raise UsageError("interval with left endpoint greater than right endpoint")
        lefts, rights = _canonicalize(arr[:, 0], arr[:, 1], window_end)
        self._set(window_end, lefts, rights)

    def _set(self, window_end, lefts, rights):
        object.__setattr__(self, "window_end", window_end)
        object.__setattr__(self, "lefts", _frozen(lefts))
        object.__setattr__(self, "rights", _frozen(rights))

    def __setattr__(self, name, value):
        raise AttributeError("IntervalSet is immutable")

    @classmethod
    def _trusted(cls, window_end: float, lefts, rights) -> "IntervalSet":
        # caller guarantees canonical form
        obj = cls.__new__(cls)
        obj._set(float(window_end), lefts, rights)
        return obj

    @classmethod
    def full(cls, window_end: float) -> "IntervalSet":
        return cls._trusted(window_end, [0.0], [float(window_end)])

    @classmethod
    def empty(cls, window_end: float) -> "IntervalSet":
        return cls._trusted(window_end, [], [])

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.lefts.tolist(), self.rights.tolist()))

    def __len__(self) -> int:
        return self.lefts.size

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (
            self.window_end == other.window_end
            and np.array_equal(self.lefts, other.lefts)
            and np.array_equal(self.rights, other.rights)
        )

    def __hash__(self):
        return hash((self.window_end, self.lefts.tobytes(), self.rights.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"[{l:.6g}, {r:.6g}]" for l, r in self.intervals[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"IntervalSet(W={self.window_end:g}, {{{body}{more}}})"

    @property
    def is_empty(self) -> bool:
        return self.lefts.size == 0

    def measure(self) -> float:
        return float(np.sum(self.rights - self.lefts))

    def contains(self, x):
        """Vectorized membership test."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.lefts, x, side="right") - 1
        ok = idx >= 0
        safe = np.where(ok, idx, 0)
        if self.lefts.size == 0:
            res = np.zeros(x.shape, dtype=bool)
        else:
            res = ok & (x <= self.rights[safe])
        return bool(res) if res.ndim == 0 else res

    def to_json(self) -> str:
        """Debug serialization: JSON array of ``[l, r]`` pairs."""
        return json.dumps([[l, r] for l, r in self.intervals])

    @classmethod
    def from_json(cls, text: str, window_end: float) -> "IntervalSet":
        return cls(window_end, json.loads(text))


def _canonicalize(lefts, rights, W):
    lefts = np.clip(lefts, 0.0, None)
    rights = np.minimum(rights, W)
    keep = (rights >= lefts) & (lefts <= W)
    lefts, rights = lefts[keep], rights[keep]
    if lefts.size == 0:
        return lefts, rights
    order = np.argsort(lefts, kind="stable")
    lefts, rights = lefts[order], rights[order]
    reach = np.maximum.accumulate(rights)
    # closed intervals: touching counts as overlapping
    starts = np.ones(lefts.size, dtype=bool)
    starts[1:] = lefts[1:] > reach[:-1]
    ends = np.ones(lefts.size, dtype=bool)
    ends[:-1] = starts[1:]
    return lefts[starts], reach[ends]


def complement_of_open_cover(W: float, cover) -> IntervalSet:
    """Part of [0, W] left uncovered by the open intervals ``(y, y + z)``.

    ``cover`` is an array-like of ``(y, z)`` rows. Endpoints of the open
    intervals stay uncovered, so the result is closed.
    """
    W = float(W)
    if not W > 0:
        raise DomainError(f"window end must be positive, got {W!r}")
    cov = np.asarray(cover, dtype=float).reshape(-1, 2)
    if cov.shape[0] == 0:
        return IntervalSet.full(W)
    if np.any(cov[:, 1] <= 0) or np.any(cov[:, 0] < 0):
        raise DomainError("cover intervals need y >= 0 and z > 0")
    a = cov[:, 0]
    order = np.argsort(a, kind="stable")
    a = a[order]
    b = a + cov[order, 1]
    reach = np.maximum.accumulate(b)
    # open intervals only merge on strict overlap; a shared endpoint stays uncovered
    starts = np.ones(a.size, dtype=bool)
    starts[1:] = a[1:] >= reach[:-1]
    ends = np.ones(a.size, dtype=bool)
    ends[:-1] = starts[1:]
    ua, ub = a[starts], reach[ends]
    gap_l = np.concatenate(([0.0], ub))
    gap_r = np.concatenate((ua, [np.inf]))
    gap_r = np.minimum(gap_r, W)
    keep = gap_l <= gap_r
    return IntervalSet._trusted(W, gap_l[keep], gap_r[keep])


def _check_window(A: IntervalSet, B: IntervalSet):
    if A.window_end != B.window_end:
        raise UsageError(f"window mismatch: {A.window_end} vs {B.window_end}")


def intersect(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    """Intersection of two sets on the same window."""
    _check_window(A, B)
    if A.is_empty or B.is_empty:
        return IntervalSet.empty(A.window_end)
    lo = np.searchsorted(B.rights, A.lefts, side="left")
    hi = np.searchsorted(B.lefts, A.rights, side="right")
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    if total == 0:
        return IntervalSet.empty(A.window_end)
    ia = np.repeat(np.arange(A.lefts.size), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    jb = np.repeat(lo, counts) + offs
    lefts = np.maximum(A.lefts[ia], B.lefts[jb])
    rights = np.minimum(A.rights[ia], B.rights[jb])
    return IntervalSet._trusted(A.window_end, lefts, rights)


def complement(A: IntervalSet) -> IntervalSet:
    """Closure of [0, W] minus A (same Lebesgue measure as the open complement)."""
    W = A.window_end
    gap_l = np.concatenate(([0.0], A.rights))
    gap_r = np.concatenate((A.lefts, [W]))
    keep = gap_l < gap_r
    # gaps on both sides of an isolated point touch and merge
    lefts, rights = _canonicalize(gap_l[keep], gap_r[keep], W)
    return IntervalSet._trusted(W, lefts, rights)


def shift_clip(A: IntervalSet, v: float) -> IntervalSet:
    """(A + v) intersected with [0, W]."""
    if v < 0:
        raise DomainError(f"shift must be nonnegative, got {v!r}")
    if v == 0:
        return A
    W = A.window_end
    if v >= W:
        return IntervalSet.empty(W)
    lefts, rights = _canonicalize(A.lefts + v, A.rights + v, W)
    return IntervalSet._trusted(W, lefts, rights)


def dilate(A: IntervalSet, h: float) -> IntervalSet:
    """Minkowski sausage A + [-h/2, h/2], clipped to the window."""
    if not h > 0:
        raise DomainError(f"dilation width must be positive, got {h!r}")
    lefts, rights = _canonicalize(A.lefts - h / 2, A.rights + h / 2, A.window_end)
    return IntervalSet._trusted(A.window_end, lefts, rights)


def measure_on(A: IntervalSet, a: float, b: float) -> float:
    """Lebesgue measure of A intersected with [a, b]."""
    if a > b:
        raise UsageError(f"measure_on needs a <= b, got a={a}, b={b}")
    lo = np.maximum(A.lefts, a)
    hi = np.minimum(A.rights, b)
    return float(np.sum(np.clip(hi - lo, 0.0, None)))


def cumulative_measure(A: IntervalSet, ts) -> np.ndarray:
    """measure_on(A, 0, t) for every t in ``ts`` (one sweep, any order)."""
    ts = np.asarray(ts, dtype=float)
    if A.is_empty:
        return np.zeros(ts.shape)
    lengths = A.rights - A.lefts
    done = np.concatenate(([0.0], np.cumsum(lengths)))
    # intervals entirely left of t contribute fully; the one containing t partially
    k = np.searchsorted(A.lefts, ts, side="right")
    full = np.searchsorted(A.rights, ts, side="right")
    out = done[full]
    partial = k > full
    idx = np.where(partial, k - 1, 0)
    out = out + np.where(partial, ts - A.lefts[idx], 0.0)
    return out
