"""Query answering under classical, brave, CQA, and intersection semantics."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import intervals as iv
from .errors import NoRepairsError
from .facts import FactSet, GroundAtom, TemporalFact
from .intervals import Interval
from .reasoner import (DEFAULT_LIMITS, EngineLimits, certain_answers, entails_fact,
                       get_engine, model_answers)
from .repairs import DEFAULT_CAP, enumerate_repairs, repairs_intersection
from .syntax import Program, Query


class SemanticsKind(enum.Enum):
    CLASSICAL = "classical"
    BRAVE = "brave"
    CQA = "cqa"
    INTERSECTION = "intersection"


def _as_sem(sem) -> SemanticsKind:
    return sem if isinstance(sem, SemanticsKind) else SemanticsKind(str(sem))


@dataclass(frozen=True, slots=True)
class SemanticsReport:
    brave: bool
    cqa: bool
    intersection: bool


def _repairs(kind, d: FactSet, p: Program, limits: EngineLimits, cap: int):
    repairs = enumerate_repairs(kind, d, p, limits, cap)
    if not repairs:
        raise NoRepairsError("repair-based semantics need at least one repair")
    return repairs


def entails_under(sem, kind, d: FactSet, p: Program, f: TemporalFact,
                  limits: EngineLimits = DEFAULT_LIMITS,
                  cap: int = DEFAULT_CAP) -> bool:
    """Fact entailment under the requested semantics and repair kind."""
    sem = _as_sem(sem)
    if sem is SemanticsKind.CLASSICAL:
        return entails_fact(p, d, f, limits)
    if sem is SemanticsKind.INTERSECTION:
        inter = repairs_intersection(kind, d, p, limits, cap)
        return entails_fact(p, inter, f, limits)
    repairs = _repairs(kind, d, p, limits, cap)
    eng = get_engine(p, d.constants(), limits)
    if sem is SemanticsKind.BRAVE:
        return any(eng.entails(r, f) for r in repairs)
    return all(eng.entails(r, f) for r in repairs)


def semantics_report(kind, d: FactSet, p: Program, f: TemporalFact,
                     limits: EngineLimits = DEFAULT_LIMITS,
                     cap: int = DEFAULT_CAP) -> SemanticsReport:
    """Brave/CQA/intersection verdicts from one repair enumeration."""
    repairs = _repairs(kind, d, p, limits, cap)
    eng = get_engine(p, d.constants(), limits)
    verdicts = [eng.entails(r, f) for r in repairs]
    brave = any(verdicts)
    cqa = all(verdicts)
    inter = entails_fact(p, repairs_intersection(kind, d, p, limits, cap), f, limits)
    assert not inter or cqa, "intersection semantics must imply CQA"
    return SemanticsReport(brave=brave, cqa=cqa, intersection=inter)


Answers = "list[tuple[tuple[str, ...], list[Interval]]]"


def answers_under(sem, kind, d: FactSet, p: Program, q: Query,
                  limits: EngineLimits = DEFAULT_LIMITS,
                  cap: int = DEFAULT_CAP):
    """Per constant tuple, the maximal intervals entailed under the semantics.

    Brave answers are reported per witnessing repair: intervals from
    different repairs are never merged, only ones subsumed by a larger
    brave interval are dropped.
    """
    sem = _as_sem(sem)
    if sem is SemanticsKind.CLASSICAL:
        return certain_answers(p, d, q, limits)
    if sem is SemanticsKind.INTERSECTION:
        inter = repairs_intersection(kind, d, p, limits, cap)
        eng = get_engine(p, d.constants(), limits)
        return model_answers(eng.model(inter), d, q)

    repairs = _repairs(kind, d, p, limits, cap)
    eng = get_engine(p, d.constants(), limits)
    per_repair = []
    for r in repairs:
        per_repair.append(dict(model_answers(eng.model(r), d, q)))

    tuples = set()
    for answers in per_repair:
        tuples |= set(answers)
    out = []
    if sem is SemanticsKind.BRAVE:
        for combo in sorted(tuples):
            intervals: list[Interval] = []
            for answers in per_repair:
                intervals.extend(answers.get(combo, ()))
            maximal = [a for a in intervals
                       if not any(b != a and b.contains_interval(a) for b in intervals)]
            dedup = sorted(set(maximal), key=lambda a: (a.lo, a.hi))
            if dedup:
                out.append((combo, dedup))
        return out
    # CQA: a tuple/point answers iff it answers in every repair
    for combo in sorted(tuples):
        spans = None
        for answers in per_repair:
            got = tuple(answers.get(combo, ()))
            spans = got if spans is None else iv.intersect(spans, got)
            if not spans:
                break
        if spans:
            out.append((combo, list(spans)))
    return out
