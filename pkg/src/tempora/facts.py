"""Temporal facts, fact sets, inclusion orders, normal form, intersection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from . import intervals as iv
from .errors import UnboundedDatasetError
from .intervals import Interval, SpanSet


@dataclass(frozen=True, slots=True)
class GroundAtom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(self.args)})"

    def sort_key(self):
        return (self.predicate, self.args)


@dataclass(frozen=True, slots=True)
class TemporalFact:
    atom: GroundAtom
    interval: Interval

    def __str__(self) -> str:
        return f"{self.atom}@{self.interval}"

    def sort_key(self):
        return (*self.atom.sort_key(), self.interval.lo, self.interval.hi)


class FactSet:
    """An immutable set of temporal facts with per-atom coverage lookup."""

    __slots__ = ("_facts", "_by_atom", "_hash")

    def __init__(self, facts: Iterable[TemporalFact] = ()):
        self._facts = frozenset(facts)
        by_atom: dict[GroundAtom, list[Interval]] = {}
        for f in self._facts:
            by_atom.setdefault(f.atom, []).append(f.interval)
        self._by_atom = {a: iv.coalesce(ivs) for a, ivs in by_atom.items()}
        self._hash = hash(self._facts)

    def __iter__(self) -> Iterator[TemporalFact]:
        return iter(self.sorted_facts())

    def __len__(self) -> int:
        return len(self._facts)

    def __contains__(self, f: TemporalFact) -> bool:
        return f in self._facts

    def __eq__(self, other) -> bool:
        return isinstance(other, FactSet) and self._facts == other._facts

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "{" + ", ".join(str(f) for f in self.sorted_facts()) + "}"

    def sorted_facts(self) -> list[TemporalFact]:
        return sorted(self._facts, key=TemporalFact.sort_key)

    def atoms(self) -> list[GroundAtom]:
        return sorted(self._by_atom, key=GroundAtom.sort_key)

    def coverage(self, atom: GroundAtom) -> SpanSet:
        """Normalized union of the intervals attached to `atom`."""
        return self._by_atom.get(atom, ())

    def constants(self) -> set[str]:
        return {c for a in self._by_atom for c in a.args}

    def restrict(self, facts: Iterable[TemporalFact]) -> "FactSet":
        return FactSet(f for f in facts if f in self._facts)

    def union(self, other: Iterable[TemporalFact]) -> "FactSet":
        return FactSet(list(self._facts) + list(other))

    def difference(self, other: "FactSet") -> "FactSet":
        return FactSet(self._facts - other._facts)

    def key(self) -> frozenset:
        return self._facts


EMPTY_FACTS = FactSet()


def is_bounded(b: FactSet) -> bool:
    """True iff every interval endpoint in `b` is a finite integer."""
    return all(f.interval.bounded for f in b.key())


def is_normal_form(b: FactSet) -> bool:
    """No two same-atom facts whose intervals union to a single interval."""
    per_atom: dict[GroundAtom, list[Interval]] = {}
    for f in b.key():
        per_atom.setdefault(f.atom, []).append(f.interval)
    for ivs in per_atom.values():
        ivs.sort(key=lambda x: (x.lo, x.hi))
        for a, c in zip(ivs, ivs[1:]):
            if c.lo <= a.hi + 1:  # overlap or integer adjacency
                return False
    return True


def normalize(b: FactSet) -> FactSet:
    """Merge same-atom facts whose intervals overlap or are adjacent."""
    out = []
    for atom in b.atoms():
        out.extend(TemporalFact(atom, i) for i in b.coverage(atom))
    return FactSet(out)


def models_fact(b: FactSet, f: TemporalFact) -> bool:
    """B |= alpha@iota: every point of the interval is covered by B."""
    return iv.covers(b.coverage(f.atom), f.interval)


def subset_order(kind, b2: FactSet, b1: FactSet) -> bool:
    """The pointwise (p), interval-based (i), or strong (s) subset order.

    `kind` is a RepairKind or one of the strings "p"/"i"/"s".
    """
    kind = str(getattr(kind, "value", kind))
    if not all(models_fact(b1, f) for f in b2.key()):
        return False
    if kind == "p":
        return True
    # i: each fact of b1 contains at most one b2-fact interval
    for f1 in b1.key():
        inside = sum(
            1
            for f2 in b2.key()
            if f2.atom == f1.atom and f1.interval.contains_interval(f2.interval)
        )
        if inside > 1:
            return False
    if kind == "i":
        return True
    if kind == "s":
        return b2.key() <= b1.key()
    raise ValueError(f"unknown order kind {kind!r}")


def strict_subset_order(kind, b2: FactSet, b1: FactSet) -> bool:
    """b2 strictly below b1: the order holds and b1 is not a pointwise
    subset of b2 (the strict variant is pointwise for all three kinds)."""
    if not subset_order(kind, b2, b1):
        return False
    return not subset_order("p", b1, b2)


def pointwise_intersection(family: Iterable[FactSet]) -> FactSet:
    """Fact set holding exactly the atom/timepoint pairs common to all members.

    Computed symbolically on interval representations, so members may be
    unbounded.  The family must be nonempty.
    """
    members = list(family)
    if not members:
        raise ValueError("pointwise intersection of an empty family")
    atoms = set(members[0].atoms())
    for m in members[1:]:
        atoms &= set(m.atoms())
    out = []
    for atom in atoms:
        spans = iv.intersect_many(m.coverage(atom) for m in members)
        out.extend(TemporalFact(atom, i) for i in spans)
    return FactSet(out)


def tp_expand(b: FactSet) -> FactSet:
    """Expand into punctual facts, one per covered (atom, timepoint) pair."""
    if not is_bounded(b):
        raise UnboundedDatasetError("cannot expand a dataset with infinite endpoints")
    out = []
    for atom in b.atoms():
        for span in b.coverage(atom):
            out.extend(TemporalFact(atom, Interval(t, t)) for t in span.points())
    return FactSet(out)
