"""Canonical-model materialization over interval representations.

The engine grounds a program, then runs a round-based fixpoint: each round
evaluates every rule body against the current model (a finite union of
intervals per ground atom) and asserts the head on the derived timepoints.
Bottom-headed rules are skipped during materialization and evaluated against
the least model, so consistency means that no bottom body is ever satisfied.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from . import intervals as iv
from .errors import (DivergenceError, InconsistentInputError, UnboundedDatasetError,
                     UnsupportedError, WindowTooSmallError)
from .facts import FactSet, GroundAtom, TemporalFact, is_bounded
from .intervals import FULL, Interval, POS_INF, SpanSet
from .syntax import (Atom, BoxMinus, BoxPlus, Const, DiamondMinus, DiamondPlus,
                     Literal, Program, Query, Rule, Since, Top, Until,
                     ground_program, literal_atoms, program_constants)


@dataclass(frozen=True, slots=True)
class EngineLimits:
    max_iterations: int = 10_000
    max_endpoint_magnitude: int = 10**6

    def __post_init__(self):
        if self.max_iterations <= 0 or self.max_endpoint_magnitude <= 0:
            raise ValueError("engine limits must be positive")


DEFAULT_LIMITS = EngineLimits()


class IntervalModel:
    """Finite mapping from ground atoms to normalized interval unions."""

    __slots__ = ("_data",)

    def __init__(self, data: dict[GroundAtom, SpanSet] | None = None):
        self._data = data if data is not None else {}

    @classmethod
    def from_facts(cls, facts: FactSet) -> "IntervalModel":
        return cls({a: facts.coverage(a) for a in facts.atoms()})

    def coverage(self, atom: GroundAtom) -> SpanSet:
        return self._data.get(atom, ())

    def covers_fact(self, fact: TemporalFact) -> bool:
        return iv.covers(self.coverage(fact.atom), fact.interval)

    def assert_spans(self, atom: GroundAtom, spans: SpanSet) -> bool:
        """Add timepoints for `atom`; returns True if anything was new."""
        old = self._data.get(atom, ())
        new = iv.union(old, spans)
        if new == old:
            return False
        self._data[atom] = new
        return True

    def atoms(self) -> list[GroundAtom]:
        return sorted(self._data, key=GroundAtom.sort_key)

    def max_finite_endpoint(self) -> int:
        m = 0
        for spans in self._data.values():
            for span in spans:
                if iv.is_finite(span.lo):
                    m = max(m, abs(int(span.lo)))
                if iv.is_finite(span.hi):
                    m = max(m, abs(int(span.hi)))
        return m

    def to_factset(self) -> FactSet:
        return FactSet(TemporalFact(a, s) for a, spans in self._data.items()
                       for s in spans)


def _ground_atom(atom: Atom) -> GroundAtom:
    return GroundAtom(atom.predicate, tuple(t.name for t in atom.args))


def eval_literal(model: IntervalModel, lit: Literal) -> SpanSet:
    """Exact satisfaction set of a ground literal in the model."""
    if isinstance(lit, Atom):
        return model.coverage(_ground_atom(lit))
    if isinstance(lit, Top):
        return FULL
    if isinstance(lit, BoxPlus):
        return iv.erode_future(eval_literal(model, lit.arg), lit.rng.lo, lit.rng.hi)
    if isinstance(lit, BoxMinus):
        return iv.erode_past(eval_literal(model, lit.arg), lit.rng.lo, lit.rng.hi)
    if isinstance(lit, DiamondPlus):
        return iv.dilate_future(eval_literal(model, lit.arg), lit.rng.lo, lit.rng.hi)
    if isinstance(lit, DiamondMinus):
        return iv.dilate_past(eval_literal(model, lit.arg), lit.rng.lo, lit.rng.hi)
    if isinstance(lit, Until):
        return iv.until_eval(eval_literal(model, lit.left),
                             eval_literal(model, lit.right), lit.rng.lo, lit.rng.hi)
    if isinstance(lit, Since):
        return iv.since_eval(eval_literal(model, lit.left),
                             eval_literal(model, lit.right), lit.rng.lo, lit.rng.hi)
    raise UnsupportedError(f"cannot evaluate literal {lit!r}")


def head_assert(model: IntervalModel, head: Literal, spans: SpanSet) -> bool:
    """Minimal additions making a deterministic head hold on `spans`."""
    if isinstance(head, Top):
        return False
    if isinstance(head, Atom):
        return model.assert_spans(_ground_atom(head), spans)
    if isinstance(head, BoxPlus):
        return head_assert(model, head.arg,
                           iv.dilate_past(spans, head.rng.lo, head.rng.hi))
    if isinstance(head, BoxMinus):
        return head_assert(model, head.arg,
                           iv.dilate_future(spans, head.rng.lo, head.rng.hi))
    raise UnsupportedError(f"non-deterministic head {head!r}")


def _eval_body(model: IntervalModel, body: tuple[Literal, ...]) -> SpanSet:
    spans: SpanSet | None = None
    for lit in body:
        s = eval_literal(model, lit)
        if not s:
            return ()
        spans = s if spans is None else iv.intersect(spans, s)
        if not spans:
            return ()
    return spans if spans is not None else ()


def materialize(program: Program, dataset: FactSet,
                limits: EngineLimits = DEFAULT_LIMITS, *,
                _stop_on_bot: bool = False) -> IntervalModel:
    """Least fixpoint of rule application starting from the dataset.

    `program` must be ground.  Bottom-headed rules never fire during
    materialization; with `_stop_on_bot` the fixpoint stops early as soon
    as some bottom body is satisfiable (the model is then partial but the
    inconsistency verdict is already final, since models only grow).
    """
    model = IntervalModel.from_facts(dataset)
    head_rules = [r for r in program.rules if r.head is not None]
    bot_rules = [r for r in program.rules if r.head is None]
    for _ in range(limits.max_iterations):
        if _stop_on_bot and any(_eval_body(model, r.body) for r in bot_rules):
            return model
        changed = False
        for rule in head_rules:
            spans = _eval_body(model, rule.body)
            if spans and head_assert(model, rule.head, spans):
                changed = True
                if model.max_finite_endpoint() > limits.max_endpoint_magnitude:
                    raise DivergenceError("endpoint", f"while applying {rule}")
        if not changed:
            return model
    raise DivergenceError("iterations",
                          f"no fixpoint after {limits.max_iterations} rounds")


class Engine:
    """Grounded program plus memoized consistency/entailment checks.

    One engine is built per (program, constant universe, limits) and shared
    by the repair and semantics machinery, so repeated checks over subsets
    of the same dataset hit the caches.
    """

    def __init__(self, program: Program, constants: Iterable[str],
                 limits: EngineLimits = DEFAULT_LIMITS):
        self.limits = limits
        self.ground = ground_program(program, set(constants) | program_constants(program))
        self.bot_rules = [r for r in self.ground.rules if r.head is None]
        self._consistent: dict[frozenset, bool] = {}
        self._models: dict[frozenset, IntervalModel] = {}

    def model(self, facts: FactSet) -> IntervalModel:
        key = facts.key()
        m = self._models.get(key)
        if m is None:
            m = materialize(self.ground, facts, self.limits)
            self._models[key] = m
        return m

    def is_consistent(self, facts: FactSet) -> bool:
        key = facts.key()
        cached = self._consistent.get(key)
        if cached is not None:
            return cached
        model = self._models.get(key)
        if model is None:
            model = materialize(self.ground, facts, self.limits, _stop_on_bot=True)
        ok = not any(_eval_body(model, r.body) for r in self.bot_rules)
        if ok:
            # the early-stop path only returns partial models on inconsistency
            self._models.setdefault(key, model)
        self._consistent[key] = ok
        return ok

    def entails(self, facts: FactSet, fact: TemporalFact) -> bool:
        if not self.is_consistent(facts):
            return True
        return self.model(facts).covers_fact(fact)


_ENGINES: dict[tuple, Engine] = {}


def get_engine(program: Program, constants: Iterable[str],
               limits: EngineLimits = DEFAULT_LIMITS) -> Engine:
    key = (program, frozenset(constants), limits)
    eng = _ENGINES.get(key)
    if eng is None:
        if len(_ENGINES) > 64:
            _ENGINES.clear()
        eng = Engine(program, constants, limits)
        _ENGINES[key] = eng
    return eng


def _engine_for(program: Program, dataset: FactSet, limits: EngineLimits) -> Engine:
    return get_engine(program, dataset.constants(), limits)


def is_consistent(program: Program, dataset: FactSet,
                  limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    """True iff some model satisfies both the program and the dataset."""
    return _engine_for(program, dataset, limits).is_consistent(dataset)


def entails_fact(program: Program, dataset: FactSet, fact: TemporalFact,
                 limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    """Classical entailment; vacuously true on inconsistent datasets."""
    return _engine_for(program, dataset, limits).entails(dataset, fact)


def certain_answers(program: Program, dataset: FactSet, query: Query,
                    limits: EngineLimits = DEFAULT_LIMITS,
                    ) -> list[tuple[tuple[str, ...], list[Interval]]]:
    """Maximal intervals per constant tuple on which the query atom holds.

    Requires a consistent dataset; tuples with no answer interval are
    omitted from the result.
    """
    engine = _engine_for(program, dataset, limits)
    if not engine.is_consistent(dataset):
        raise InconsistentInputError(
            "certain answers are undefined on an inconsistent dataset; "
            "use a repair-based semantics instead")
    model = engine.model(dataset)
    return model_answers(model, dataset, query)


def model_answers(model: IntervalModel, dataset: FactSet, query: Query,
                  ) -> list[tuple[tuple[str, ...], list[Interval]]]:
    consts = sorted(dataset.constants())
    variables = query.answer_vars()
    out = []
    for combo in itertools.product(consts, repeat=len(variables)):
        binding = dict(zip(variables, combo))
        args = tuple(binding[a.name] if a.is_var else a.name for a in query.args)
        spans = model.coverage(GroundAtom(query.predicate, args))
        if spans:
            out.append((combo, list(spans)))
    return out


# --- brute-force reference model (testing oracle) ---------------------------


def _check_bounded_ranges(program: Program):
    def walk(lit: Literal):
        if isinstance(lit, (Atom, Top)):
            return
        if isinstance(lit, (Until, Since)):
            if lit.rng.hi == POS_INF:
                raise UnsupportedError("reference model requires bounded ranges")
            walk(lit.left)
            walk(lit.right)
            return
        if lit.rng.hi == POS_INF:
            raise UnsupportedError("reference model requires bounded ranges")
        walk(lit.arg)

    for rule in program.rules:
        for lit in rule.body:
            walk(lit)
        if rule.head is not None:
            walk(rule.head)


def _holds_at(truths: set[tuple[GroundAtom, int]], lit: Literal, t: int,
              lo: int, hi: int) -> bool:
    """Pointwise literal satisfaction; points outside [lo,hi] are false."""
    if isinstance(lit, Top):
        return True
    if isinstance(lit, Atom):
        return lo <= t <= hi and (_ground_atom(lit), t) in truths
    if isinstance(lit, BoxPlus):
        return all(_holds_at(truths, lit.arg, s, lo, hi)
                   for s in range(t + int(lit.rng.lo), t + int(lit.rng.hi) + 1))
    if isinstance(lit, BoxMinus):
        return all(_holds_at(truths, lit.arg, s, lo, hi)
                   for s in range(t - int(lit.rng.hi), t - int(lit.rng.lo) + 1))
    if isinstance(lit, DiamondPlus):
        return any(_holds_at(truths, lit.arg, s, lo, hi)
                   for s in range(t + int(lit.rng.lo), t + int(lit.rng.hi) + 1))
    if isinstance(lit, DiamondMinus):
        return any(_holds_at(truths, lit.arg, s, lo, hi)
                   for s in range(t - int(lit.rng.hi), t - int(lit.rng.lo) + 1))
    if isinstance(lit, Until):
        for w in range(t + int(lit.rng.lo), t + int(lit.rng.hi) + 1):
            if _holds_at(truths, lit.right, w, lo, hi) and all(
                    _holds_at(truths, lit.left, s, lo, hi) for s in range(t + 1, w)):
                return True
        return False
    if isinstance(lit, Since):
        for w in range(t - int(lit.rng.hi), t - int(lit.rng.lo) + 1):
            if _holds_at(truths, lit.right, w, lo, hi) and all(
                    _holds_at(truths, lit.left, s, lo, hi) for s in range(w + 1, t)):
                return True
        return False
    raise UnsupportedError(f"cannot evaluate literal {lit!r}")


def _assert_at(truths: set[tuple[GroundAtom, int]], head: Literal, t: int,
               lo: int, hi: int) -> bool:
    if isinstance(head, Top):
        return False
    if isinstance(head, Atom):
        if not lo <= t <= hi:
            raise WindowTooSmallError(f"derivation of {head} at {t} escapes the window")
        pair = (_ground_atom(head), t)
        if pair in truths:
            return False
        truths.add(pair)
        return True
    if isinstance(head, BoxPlus):
        changed = False
        for d in range(int(head.rng.lo), int(head.rng.hi) + 1):
            changed |= _assert_at(truths, head.arg, t + d, lo, hi)
        return changed
    if isinstance(head, BoxMinus):
        changed = False
        for d in range(int(head.rng.lo), int(head.rng.hi) + 1):
            changed |= _assert_at(truths, head.arg, t - d, lo, hi)
        return changed
    raise UnsupportedError(f"non-deterministic head {head!r}")


def punctual_reference_model(program: Program, dataset: FactSet,
                             window: tuple[int, int]) -> set[tuple[GroundAtom, int]]:
    """Naive timepoint-by-timepoint fixpoint over a finite window.

    A testing oracle for `materialize` on bounded-range programs; raises
    WindowTooSmallError whenever a derivation escapes the window, in which
    case the window did not cover the model.
    """
    if not is_bounded(dataset):
        raise UnboundedDatasetError("reference model needs a bounded dataset")
    ground = ground_program(program, dataset.constants() | program_constants(program))
    _check_bounded_ranges(ground)
    lo, hi = window
    truths: set[tuple[GroundAtom, int]] = set()
    for fact in dataset:
        for t in fact.interval.points():
            if not lo <= t <= hi:
                raise WindowTooSmallError(f"dataset point {fact.atom}@{t} outside window")
            truths.add((fact.atom, t))
    head_rules = [r for r in ground.rules if r.head is not None]
    changed = True
    while changed:
        changed = False
        for rule in head_rules:
            for t in range(lo, hi + 1):
                if all(_holds_at(truths, b, t, lo, hi) for b in rule.body):
                    changed |= _assert_at(truths, rule.head, t, lo, hi)
    return truths
