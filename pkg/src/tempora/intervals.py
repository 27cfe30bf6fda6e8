"""Intervals over the integer timeline and algebra on finite unions of them.

Timepoints are Python ints, with ``float("-inf")``/``float("inf")`` as the
two infinite endpoints.  Every interval is kept in canonical form: finite
endpoints are closed (``(2,5)`` is stored as ``[3,4]``), infinite endpoints
are necessarily open.  A "span set" is a tuple of pairwise disjoint,
non-adjacent intervals in increasing order; all set-level operations below
take and return span sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import EmptyIntervalError

NEG_INF = float("-inf")
POS_INF = float("inf")

TimePoint = int | float  # finite values are ints; floats only for +-inf


def is_finite(t: TimePoint) -> bool:
    return t != NEG_INF and t != POS_INF


@dataclass(frozen=True, slots=True)
class Interval:
    """A nonempty set of consecutive integer timepoints, canonical form."""

    lo: TimePoint
    hi: TimePoint

    def __post_init__(self):
        if self.lo == POS_INF or self.hi == NEG_INF or self.lo > self.hi:
            raise EmptyIntervalError(f"empty interval [{self.lo},{self.hi}]")
        if is_finite(self.lo) and not isinstance(self.lo, int):
            object.__setattr__(self, "lo", int(self.lo))
        if is_finite(self.hi) and not isinstance(self.hi, int):
            object.__setattr__(self, "hi", int(self.hi))

    @classmethod
    def make(cls, lo: TimePoint, hi: TimePoint,
             lo_closed: bool = True, hi_closed: bool = True) -> "Interval":
        """Build from endpoints with brackets, converting to canonical form.

        Open finite endpoints are shifted inward ((a,.. becomes [a+1,.. and
        ..,b) becomes ..,b]); brackets on infinite endpoints are ignored.
        """
        if is_finite(lo) and not lo_closed:
            lo += 1
        if is_finite(hi) and not hi_closed:
            hi -= 1
        return cls(lo, hi)

    @property
    def lo_closed(self) -> bool:
        return is_finite(self.lo)

    @property
    def hi_closed(self) -> bool:
        return is_finite(self.hi)

    @property
    def bounded(self) -> bool:
        return is_finite(self.lo) and is_finite(self.hi)

    @property
    def punctual(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, t: TimePoint) -> bool:
        return self.lo <= t <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def points(self) -> Iterator[int]:
        if not self.bounded:
            raise EmptyIntervalError("cannot enumerate an unbounded interval")
        return iter(range(int(self.lo), int(self.hi) + 1))

    def size(self) -> TimePoint:
        return self.hi - self.lo + 1 if self.bounded else POS_INF

    def __str__(self) -> str:
        lo = "(-inf" if self.lo == NEG_INF else f"[{self.lo}"
        hi = "inf)" if self.hi == POS_INF else f"{self.hi}]"
        return f"{lo},{hi}"


SpanSet = tuple[Interval, ...]

EMPTY: SpanSet = ()
FULL: SpanSet = (Interval(NEG_INF, POS_INF),)


def coalesce(intervals: Iterable[Interval]) -> SpanSet:
    """Sort and merge intervals that overlap or are integer-adjacent."""
    items = sorted(intervals, key=lambda iv: (iv.lo, iv.hi))
    out: list[Interval] = []
    for iv in items:
        if out and iv.lo <= out[-1].hi + 1:  # inf + 1 == inf, so tails merge
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return tuple(out)


def union(a: SpanSet, b: SpanSet) -> SpanSet:
    return coalesce(a + b)


def intersect(a: SpanSet, b: SpanSet) -> SpanSet:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i].lo, b[j].lo)
        hi = min(a[i].hi, b[j].hi)
        if lo <= hi:
            out.append(Interval(lo, hi))
        if a[i].hi < b[j].hi:
            i += 1
        else:
            j += 1
    return tuple(out)


def intersect_many(sets: Iterable[SpanSet]) -> SpanSet:
    result: SpanSet | None = None
    for s in sets:
        result = s if result is None else intersect(result, s)
        if result == ():
            return ()
    return result if result is not None else ()


def covers(a: SpanSet, iv: Interval) -> bool:
    """True iff every point of `iv` lies in the span set `a`."""
    return any(comp.contains_interval(iv) for comp in a)


def covers_point(a: SpanSet, t: TimePoint) -> bool:
    return any(t in comp for comp in a)


def is_subset(a: SpanSet, b: SpanSet) -> bool:
    return all(covers(b, iv) for iv in a)


def reflect(a: SpanSet) -> SpanSet:
    """Mirror a span set through 0 (used to reduce `since` to `until`)."""
    return tuple(Interval(-iv.hi, -iv.lo) for iv in reversed(a))


def bounded_points(a: SpanSet) -> list[int]:
    out: list[int] = []
    for iv in a:
        out.extend(iv.points())
    return out


# --- temporal transforms -------------------------------------------------
#
# Ranges are canonical intervals with 0 <= a <= b, b possibly infinite.
# The four transforms below are formulated so no -inf + inf arithmetic
# can occur.

def dilate_future(a: SpanSet, lo: int, hi: TimePoint) -> SpanSet:
    """Points t such that some s in `a` has s - t in [lo,hi]: shifts earlier."""
    out = []
    for iv in a:
        new_lo = NEG_INF if (hi == POS_INF or iv.lo == NEG_INF) else iv.lo - hi
        new_hi = POS_INF if iv.hi == POS_INF else iv.hi - lo
        out.append(Interval(new_lo, new_hi))
    return coalesce(out)


def dilate_past(a: SpanSet, lo: int, hi: TimePoint) -> SpanSet:
    """Points t such that some s in `a` has t - s in [lo,hi]: shifts later."""
    out = []
    for iv in a:
        new_lo = NEG_INF if iv.lo == NEG_INF else iv.lo + lo
        new_hi = POS_INF if (hi == POS_INF or iv.hi == POS_INF) else iv.hi + hi
        out.append(Interval(new_lo, new_hi))
    return coalesce(out)


def erode_future(a: SpanSet, lo: int, hi: TimePoint) -> SpanSet:
    """Points t such that the whole window [t+lo, t+hi] lies inside `a`."""
    out = []
    for iv in a:
        if hi == POS_INF:
            if iv.hi != POS_INF:
                continue
            new_hi: TimePoint = POS_INF
        else:
            new_hi = POS_INF if iv.hi == POS_INF else iv.hi - hi
        new_lo = NEG_INF if iv.lo == NEG_INF else iv.lo - lo
        if new_lo <= new_hi:
            out.append(Interval(new_lo, new_hi))
    return coalesce(out)


def erode_past(a: SpanSet, lo: int, hi: TimePoint) -> SpanSet:
    """Points t such that the whole window [t-hi, t-lo] lies inside `a`."""
    out = []
    for iv in a:
        if hi == POS_INF:
            if iv.lo != NEG_INF:
                continue
            new_lo: TimePoint = NEG_INF
        else:
            new_lo = NEG_INF if iv.lo == NEG_INF else iv.lo + hi
        new_hi = POS_INF if iv.hi == POS_INF else iv.hi + lo
        if new_lo <= new_hi:
            out.append(Interval(new_lo, new_hi))
    return coalesce(out)


def until_eval(a: SpanSet, b: SpanSet, lo: int, hi: TimePoint) -> SpanSet:
    """Points t with a witness t' in b, t'-t in [lo,hi], and `a` on (t,t').

    The witness clause quantifies over the strict interior, which over the
    integers is empty whenever t' <= t+1; such witnesses need no support
    from `a` at all.
    """
    out: list[Interval] = []
    for w in b:
        # vacuous-interior witnesses: t in [t'-min(hi,1), t'-lo]
        if lo <= 1 and lo <= hi:
            step = hi if hi < 1 else 1
            new_lo = NEG_INF if (w.lo == NEG_INF or step == POS_INF) else w.lo - step
            new_hi = POS_INF if w.hi == POS_INF else w.hi - lo
            out.append(Interval(new_lo, new_hi))
        # witnesses with nonempty interior, which must sit inside one
        # component of `a` that reaches t'-1
        gap = lo if lo > 2 else 2
        if gap > hi:
            continue
        for comp in a:
            # witness range: t'-1 in [comp.lo, comp.hi]
            w_lo = max(w.lo, comp.lo + 1)
            w_hi = min(w.hi, POS_INF if comp.hi == POS_INF else comp.hi + 1)
            if w_lo > w_hi:
                continue
            # per witness t': t in [max(t'-hi, comp.lo - 1), t'-gap];
            # nonempty from t' >= comp.lo - 1 + gap on, and the swept
            # intervals chain into a single one.
            if comp.lo == NEG_INF:
                t0 = w_lo
            else:
                t0 = max(w_lo, comp.lo - 1 + gap)
            if t0 > w_hi:
                continue
            low1 = NEG_INF if (hi == POS_INF or t0 == NEG_INF) else t0 - hi
            low2 = NEG_INF if comp.lo == NEG_INF else comp.lo - 1
            new_lo = max(low1, low2)
            new_hi = POS_INF if w_hi == POS_INF else w_hi - gap
            if new_lo <= new_hi:
                out.append(Interval(new_lo, new_hi))
    return coalesce(out)


def since_eval(a: SpanSet, b: SpanSet, lo: int, hi: TimePoint) -> SpanSet:
    """Time-reversed `until`."""
    return reflect(until_eval(reflect(a), reflect(b), lo, hi))
