"""Repairs and conflicts of bounded temporal datasets, for the s/i/p orders.

Enumeration uses hitting-set duality rather than a sweep of the whole
candidate space:

* all repairs (maximal consistent candidates) come from a MARCO-style loop:
  find a consistent candidate not below any known repair, extend it to a
  maximal one, block it, repeat;
* all conflicts (minimal inconsistent candidates) come from the dual sweep:
  maintain the antichain of maximal candidates avoiding the conflicts found
  so far, and shrink any inconsistent antichain member into a new conflict.

For the s kind the candidate space is the subset lattice of the dataset,
for p the subset lattice of its punctual expansion, and for i the product,
over the dataset's facts, of each fact's subintervals plus absence.
"""

from __future__ import annotations

import enum
from typing import Callable, Iterable, Sequence

from .errors import (CapExceededError, NoRepairsError, NotNormalFormError,
                     UnboundedDatasetError)
from .facts import (FactSet, TemporalFact, is_bounded, is_normal_form, normalize,
                    pointwise_intersection, subset_order, tp_expand)
from .intervals import Interval
from .reasoner import DEFAULT_LIMITS, Engine, EngineLimits, get_engine
from .syntax import Program

DEFAULT_CAP = 100_000


class RepairKind(enum.Enum):
    S = "s"
    I = "i"
    P = "p"


def _as_kind(kind) -> RepairKind:
    return kind if isinstance(kind, RepairKind) else RepairKind(str(kind))


def _validate_dataset(d: FactSet):
    if not is_normal_form(d):
        raise NotNormalFormError("dataset must be in normal form")
    if not is_bounded(d):
        raise UnboundedDatasetError("repair operations require bounded intervals")


def _engine(p: Program, d: FactSet, limits: EngineLimits) -> Engine:
    return get_engine(p, d.constants(), limits)


def _sorted_sets(sets: Iterable[FactSet]) -> tuple[FactSet, ...]:
    return tuple(sorted(sets, key=lambda s: [f.sort_key() for f in s.sorted_facts()]))


# --- subset-lattice machinery (kinds s and p) --------------------------------


class _MaskOracle:
    """Consistency of subsets of a fixed fact universe, memoized by bitmask."""

    def __init__(self, universe: Sequence[TemporalFact], engine: Engine):
        self.universe = list(universe)
        self.engine = engine
        self._memo: dict[int, bool] = {}

    def factset(self, mask: int) -> FactSet:
        return FactSet(f for i, f in enumerate(self.universe) if mask >> i & 1)

    def consistent(self, mask: int) -> bool:
        cached = self._memo.get(mask)
        if cached is None:
            cached = self.engine.is_consistent(self.factset(mask))
            self._memo[mask] = cached
        return cached


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(1 << i)
        mask >>= 1
        i += 1
    return out


def _shrink_mask(orc: _MaskOracle, mask: int) -> int:
    """Deletion-based reduction to a minimal inconsistent subset."""
    for b in _bits(mask):
        smaller = mask & ~b
        if not orc.consistent(smaller):
            mask = smaller
    return mask


def _grow_mask(orc: _MaskOracle, seed: int, full: int) -> int:
    """Extend a consistent subset to a maximal one (bisection batching)."""

    def rec(cur: int, block_bits: list[int]) -> int:
        block = 0
        for b in block_bits:
            block |= b
        if orc.consistent(cur | block):
            return cur | block
        if len(block_bits) == 1:
            return cur
        mid = len(block_bits) // 2
        cur = rec(cur, block_bits[:mid])
        return rec(cur, block_bits[mid:])

    rest = _bits(full & ~seed)
    return rec(seed, rest) if rest else seed


def _marco_mss(orc: _MaskOracle, n: int, cap: int) -> list[int]:
    """All maximal consistent subsets of the n-element universe.

    Seeds (consistent subsets not below any known maximal one) are found by
    a DFS over the blocking constraints; fruitless states stay fruitless as
    more repairs are found and are memoized across iterations.
    """
    full = (1 << n) - 1
    if not orc.consistent(0):
        return []
    found: list[int] = []
    dead: set[int] = set()
    nodes = 0

    def find_seed(cur: int) -> int | None:
        nonlocal nodes
        if cur in dead:
            return None
        nodes += 1
        if nodes > cap:
            raise CapExceededError("repair enumeration exceeded its candidate cap")
        escape = None
        for s in found:
            if cur & ~s == 0:  # still below this repair; must leave it
                escape = full & ~s
                break
        if escape is None:
            return cur
        for b in _bits(escape):
            nxt = cur | b
            if orc.consistent(nxt):
                got = find_seed(nxt)
                if got is not None:
                    return got
        dead.add(cur)
        return None

    while True:
        seed = find_seed(0)
        if seed is None:
            return found
        found.append(_grow_mask(orc, seed, full))
        if len(found) > cap:
            raise CapExceededError("more repairs than the enumeration cap")


def _berge_transversals(edges: list[int], cap: int) -> list[int]:
    """All minimal hitting sets of the given bitmask edges (Berge's algorithm)."""
    trans = [0]
    for e in edges:
        grown: set[int] = set()
        for t in trans:
            if t & e:
                grown.add(t)
            else:
                for b in _bits(e):
                    grown.add(t | b)
        ordered = sorted(grown, key=lambda t: (bin(t).count("1"), t))
        kept: list[int] = []
        for t in ordered:
            if not any(k & ~t == 0 for k in kept):
                kept.append(t)
        trans = kept
        if len(trans) > cap:
            raise CapExceededError("conflict dualization exceeded its candidate cap")
    return trans


def _mus_from_mss(masks: list[int], full: int, cap: int) -> list[int]:
    """Minimal inconsistent subsets, as minimal hitting sets of the repair
    complements (a set is inconsistent iff it sticks out of every repair)."""
    return _berge_transversals([full & ~m for m in masks], cap)


# --- product-lattice machinery (kind i) --------------------------------------

Coord = "tuple[int, int] | None"
Selection = tuple


class _ProductOracle:
    """Consistency of per-fact subinterval selections, memoized."""

    def __init__(self, sources: Sequence[TemporalFact], engine: Engine):
        self.sources = list(sources)
        self.engine = engine
        self._memo: dict[Selection, bool] = {}

    def full(self) -> Selection:
        return tuple((int(f.interval.lo), int(f.interval.hi)) for f in self.sources)

    def factset(self, sel: Selection) -> FactSet:
        facts = []
        for f, coord in zip(self.sources, sel):
            if coord is not None:
                facts.append(TemporalFact(f.atom, Interval(coord[0], coord[1])))
        return FactSet(facts)

    def consistent(self, sel: Selection) -> bool:
        cached = self._memo.get(sel)
        if cached is None:
            cached = self.engine.is_consistent(self.factset(sel))
            self._memo[sel] = cached
        return cached


def _coord_contains(big, small) -> bool:
    if small is None:
        return True
    if big is None:
        return False
    return big[0] <= small[0] and small[1] <= big[1]


def _sel_dominates(big: Selection, small: Selection) -> bool:
    return all(_coord_contains(b, s) for b, s in zip(big, small))


def _split_selection(y: Selection, m: Selection) -> list[Selection]:
    """Maximal selections below `y` that do not dominate the conflict `m`."""
    out: list[Selection] = []
    for idx, m_coord in enumerate(m):
        if m_coord is None:
            continue
        y_coord = y[idx]
        options = []
        lo_cut = (y_coord[0], m_coord[1] - 1)
        hi_cut = (m_coord[0] + 1, y_coord[1])
        if lo_cut[0] <= lo_cut[1]:
            options.append(lo_cut)
        if hi_cut[0] <= hi_cut[1]:
            options.append(hi_cut)
        if not options:
            options.append(None)
        for opt in options:
            out.append(y[:idx] + (opt,) + y[idx + 1:])
    return out


def _shrink_selection(orc: _ProductOracle, sel: Selection) -> Selection:
    """Reduce an inconsistent selection to a minimal one.

    Facts are dropped when possible; otherwise the interval is narrowed by
    binary search: first the largest inconsistency-preserving left endpoint,
    then the least right endpoint.
    """
    sel = list(sel)
    for idx in range(len(sel)):
        coord = sel[idx]
        if coord is None:
            continue
        dropped = tuple(sel[:idx]) + (None,) + tuple(sel[idx + 1:])
        if not orc.consistent(dropped):
            sel[idx] = None
            continue
        lo, hi = coord

        def incons_left(t: int) -> bool:
            return not orc.consistent(tuple(sel[:idx]) + ((t, hi),) + tuple(sel[idx + 1:]))

        good, bad = lo, hi + 1
        while bad - good > 1:
            mid = (good + bad) // 2
            if incons_left(mid):
                good = mid
            else:
                bad = mid
        t1 = good

        def incons_right(t: int) -> bool:
            return not orc.consistent(tuple(sel[:idx]) + ((t1, t),) + tuple(sel[idx + 1:]))

        good, bad = hi, t1 - 1
        while good - bad > 1:
            mid = (good + bad) // 2
            if incons_right(mid):
                good = mid
            else:
                bad = mid
        sel[idx] = (t1, good)
    return tuple(sel)


def _sweep_product(orc: _ProductOracle, cap: int) -> tuple[list[Selection], list[Selection]]:
    """(maximal consistent, minimal inconsistent) selections, via duality."""
    full = orc.full()
    if orc.consistent(full):
        return [full], []
    antichain = [full]
    muses: list[Selection] = []
    while True:
        bad = next((a for a in antichain if not orc.consistent(a)), None)
        if bad is None:
            return antichain, muses
        m = _shrink_selection(orc, bad)
        muses.append(m)
        if len(muses) > cap:
            raise CapExceededError("more conflicts than the enumeration cap")
        candidates: list[Selection] = []
        seen: set[Selection] = set()
        for y in antichain:
            if not _sel_dominates(y, m):
                if y not in seen:
                    seen.add(y)
                    candidates.append(y)
                continue
            for child in _split_selection(y, m):
                if child not in seen:
                    seen.add(child)
                    candidates.append(child)
        kept: list[Selection] = []
        for c in candidates:
            if not any(_sel_dominates(k, c) for k in kept):
                kept = [k for k in kept if not _sel_dominates(c, k)]
                kept.append(c)
        antichain = kept
        if len(antichain) > cap:
            raise CapExceededError("conflict sweep exceeded its candidate cap")


# --- source mapping helpers ---------------------------------------------------


def _source_map(r: FactSet, d: FactSet) -> dict[TemporalFact, TemporalFact] | None:
    """Map each fact of r to the unique d-fact containing it, or None."""
    sources = d.sorted_facts()
    out: dict[TemporalFact, TemporalFact] = {}
    used: set[TemporalFact] = set()
    for f in r.sorted_facts():
        home = next((s for s in sources
                     if s.atom == f.atom and s.interval.contains_interval(f.interval)),
                    None)
        if home is None or home in used:
            return None
        used.add(home)
        out[f] = home
    return out


# --- recognition ---------------------------------------------------------------


def recognize_repair(kind, r: FactSet, d: FactSet, p: Program,
                     limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    """Is `r` an x-repair of `d`?  `d` and `r` must be in normal form."""
    kind = _as_kind(kind)
    _validate_dataset(d)
    if not is_normal_form(r):
        raise NotNormalFormError("candidate repair must be in normal form")
    eng = _engine(p, d, limits)

    if kind is RepairKind.S:
        if not r.key() <= d.key() or not eng.is_consistent(r):
            return False
        return all(not eng.is_consistent(r.union([f]))
                   for f in d.sorted_facts() if f not in r)

    if kind is RepairKind.P:
        tp_d = tp_expand(d)
        tp_r = tp_expand(r)
        if not tp_r.key() <= tp_d.key() or not eng.is_consistent(r):
            return False
        return all(not eng.is_consistent(r.union([q]))
                   for q in tp_d.sorted_facts() if q not in tp_r)

    # kind i
    if not subset_order(kind, r, d) or not eng.is_consistent(r):
        return False
    srcs = _source_map(r, d)
    if srcs is None:
        return False
    for f, home in srcs.items():
        a, b = int(f.interval.lo), int(f.interval.hi)
        rest = [g for g in r.sorted_facts() if g is not f and g != f]
        for ext in ((a - 1, b), (a, b + 1)):
            if home.interval.lo <= ext[0] and ext[1] <= home.interval.hi:
                grown = FactSet(rest + [TemporalFact(f.atom, Interval(*ext))])
                if eng.is_consistent(grown):
                    return False
    # condition on entirely-dropped facts: no punctual re-addition may be
    # consistent
    taken = set(srcs.values())
    for src in d.sorted_facts():
        if src in taken:
            continue
        for t in src.interval.points():
            if eng.is_consistent(r.union([TemporalFact(src.atom, Interval(t, t))])):
                return False
    return True


def recognize_conflict(kind, c: FactSet, d: FactSet, p: Program,
                       limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    """Is `c` an x-conflict of `d`?  `d` and `c` must be in normal form."""
    kind = _as_kind(kind)
    _validate_dataset(d)
    if not is_normal_form(c):
        raise NotNormalFormError("candidate conflict must be in normal form")
    eng = _engine(p, d, limits)

    if kind is RepairKind.S:
        if not c.key() <= d.key() or eng.is_consistent(c):
            return False
        return all(eng.is_consistent(c.difference(FactSet([f])))
                   for f in c.sorted_facts())

    if kind is RepairKind.P:
        tp_d = tp_expand(d)
        tp_c = tp_expand(c)
        if not tp_c.key() <= tp_d.key() or eng.is_consistent(c):
            return False
        return all(eng.is_consistent(tp_c.difference(FactSet([q])))
                   for q in tp_c.sorted_facts())

    # kind i
    if not subset_order(kind, c, d) or eng.is_consistent(c):
        return False
    for f in c.sorted_facts():
        a, b = int(f.interval.lo), int(f.interval.hi)
        rest = [g for g in c.sorted_facts() if g != f]
        if a == b:
            shrunk = [FactSet(rest)]
        else:
            shrunk = [FactSet(rest + [TemporalFact(f.atom, Interval(a + 1, b))]),
                      FactSet(rest + [TemporalFact(f.atom, Interval(a, b - 1))])]
        if not all(eng.is_consistent(s) for s in shrunk):
            return False
    return True


# --- single generation ----------------------------------------------------------


def _ordered_universe(universe: list[TemporalFact],
                      seed_order: Sequence[TemporalFact] | None) -> list[TemporalFact]:
    if seed_order is None:
        return sorted(universe, key=TemporalFact.sort_key)
    order = list(seed_order)
    if sorted(order, key=TemporalFact.sort_key) != sorted(universe, key=TemporalFact.sort_key):
        raise ValueError("seed_order must be a permutation of the candidate facts")
    return order


def generate_repair(kind, d: FactSet, p: Program,
                    limits: EngineLimits = DEFAULT_LIMITS,
                    seed_order: Sequence[TemporalFact] | None = None) -> FactSet:
    """Greedily build one x-repair, deterministic for a fixed seed order."""
    kind = _as_kind(kind)
    _validate_dataset(d)
    eng = _engine(p, d, limits)

    if kind in (RepairKind.S, RepairKind.P):
        universe = list(d.sorted_facts() if kind is RepairKind.S
                        else tp_expand(d).sorted_facts())
        current: list[TemporalFact] = []
        for f in _ordered_universe(universe, seed_order):
            if eng.is_consistent(FactSet(current + [f])):
                current.append(f)
        result = FactSet(current)
        return normalize(result) if kind is RepairKind.P else result

    # kind i: take each fact whole if possible, otherwise the earliest
    # consistent left endpoint extended right as far as consistency allows
    order = _ordered_universe(list(d.sorted_facts()), seed_order)
    current: list[TemporalFact] = []
    for f in order:
        if eng.is_consistent(FactSet(current + [f])):
            current.append(f)
            continue
        lo, hi = int(f.interval.lo), int(f.interval.hi)
        t1 = next((t for t in range(lo, hi + 1)
                   if eng.is_consistent(FactSet(current + [TemporalFact(f.atom, Interval(t, t))]))),
                  None)
        if t1 is None:
            continue
        good, bad = t1, hi + 1  # consistent right endpoint is downward closed
        while bad - good > 1:
            mid = (good + bad) // 2
            if eng.is_consistent(FactSet(current + [TemporalFact(f.atom, Interval(t1, mid))])):
                good = mid
            else:
                bad = mid
        current.append(TemporalFact(f.atom, Interval(t1, good)))
    return FactSet(current)


def generate_conflict(kind, d: FactSet, p: Program,
                      limits: EngineLimits = DEFAULT_LIMITS) -> FactSet | None:
    """One x-conflict of `d`, or None when `d` is consistent."""
    kind = _as_kind(kind)
    _validate_dataset(d)
    eng = _engine(p, d, limits)
    if eng.is_consistent(d):
        return None

    if kind in (RepairKind.S, RepairKind.P):
        universe = (d.sorted_facts() if kind is RepairKind.S
                    else tp_expand(d).sorted_facts())
        current = list(universe)
        for f in universe:
            smaller = [g for g in current if g != f]
            if not eng.is_consistent(FactSet(smaller)):
                current = smaller
        result = FactSet(current)
        return normalize(result) if kind is RepairKind.P else result

    orc = _ProductOracle(d.sorted_facts(), eng)
    return orc.factset(_shrink_selection(orc, orc.full()))


# --- enumeration -----------------------------------------------------------------

_ENUM_CACHE: dict[tuple, tuple[FactSet, ...]] = {}


def _cache_put(key: tuple, value: tuple[FactSet, ...]) -> tuple[FactSet, ...]:
    if len(_ENUM_CACHE) > 512:
        _ENUM_CACHE.clear()
    _ENUM_CACHE[key] = value
    return value


def _postprocess(kind: RepairKind, sets: Iterable[FactSet]) -> tuple[FactSet, ...]:
    if kind is RepairKind.P:
        sets = (normalize(s) for s in sets)
    return _sorted_sets(set(sets))


def enumerate_repairs(kind, d: FactSet, p: Program,
                      limits: EngineLimits = DEFAULT_LIMITS,
                      cap: int = DEFAULT_CAP) -> tuple[FactSet, ...]:
    """All x-repairs of `d`, canonically sorted."""
    kind = _as_kind(kind)
    _validate_dataset(d)
    rep_key = ("rep", kind, d.key(), p, limits, cap)
    hit = _ENUM_CACHE.get(rep_key)
    if hit is not None:
        return hit
    conf_key = ("conf", kind, d.key(), p, limits, cap)

    eng = _engine(p, d, limits)
    if eng.is_consistent(d):
        _cache_put(conf_key, ())
        return _cache_put(rep_key, (d,))

    if kind is RepairKind.I:
        orc = _ProductOracle(d.sorted_facts(), eng)
        repairs, muses = _sweep_product(orc, cap)
        _cache_put(conf_key, _postprocess(kind, (orc.factset(s) for s in muses)))
        return _cache_put(rep_key, _postprocess(kind, (orc.factset(s) for s in repairs)))

    universe = (d.sorted_facts() if kind is RepairKind.S
                else tp_expand(d).sorted_facts())
    orc = _MaskOracle(universe, eng)
    masks = _marco_mss(orc, len(universe), cap)
    return _cache_put(rep_key, _postprocess(kind, (orc.factset(m) for m in masks)))


def enumerate_conflicts(kind, d: FactSet, p: Program,
                        limits: EngineLimits = DEFAULT_LIMITS,
                        cap: int = DEFAULT_CAP) -> tuple[FactSet, ...]:
    """All x-conflicts of `d`, canonically sorted; empty when consistent."""
    kind = _as_kind(kind)
    _validate_dataset(d)
    conf_key = ("conf", kind, d.key(), p, limits, cap)
    hit = _ENUM_CACHE.get(conf_key)
    if hit is not None:
        return hit
    rep_key = ("rep", kind, d.key(), p, limits, cap)

    eng = _engine(p, d, limits)
    if eng.is_consistent(d):
        _cache_put(rep_key, (d,))
        return _cache_put(conf_key, ())

    if kind is RepairKind.I:
        orc = _ProductOracle(d.sorted_facts(), eng)
        repairs, muses = _sweep_product(orc, cap)
        _cache_put(rep_key, _postprocess(kind, (orc.factset(s) for s in repairs)))
        return _cache_put(conf_key, _postprocess(kind, (orc.factset(s) for s in muses)))

    universe = (d.sorted_facts() if kind is RepairKind.S
                else tp_expand(d).sorted_facts())
    orc = _MaskOracle(universe, eng)
    masks = _marco_mss(orc, len(universe), cap)
    _cache_put(rep_key, _postprocess(kind, (orc.factset(m) for m in masks)))
    muses = _mus_from_mss(masks, (1 << len(universe)) - 1, cap)
    return _cache_put(conf_key, _postprocess(kind, (orc.factset(m) for m in muses)))


def repairs_intersection(kind, d: FactSet, p: Program,
                         limits: EngineLimits = DEFAULT_LIMITS,
                         cap: int = DEFAULT_CAP) -> FactSet:
    """Pointwise intersection of all x-repairs."""
    repairs = enumerate_repairs(kind, d, p, limits, cap)
    if not repairs:
        raise NoRepairsError("dataset has no repairs of this kind")
    return pointwise_intersection(repairs)
