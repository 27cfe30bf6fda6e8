"""Test-instance generators: SAT reductions, exponential-size families,
random bounded instances, and a brute-force SAT oracle."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import ParseError
from .facts import FactSet, GroundAtom, TemporalFact
from .intervals import Interval, POS_INF
from .syntax import (Atom, BoxMinus, BoxPlus, Const, DiamondMinus, DiamondPlus,
                     Program, Rule, Since, Until, Var)


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 1 or not self.clauses:
            raise ValueError("CNF needs at least one variable and one clause")
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")


def parse_dimacs(text: str) -> Cnf:
    """DIMACS CNF: a ``p cnf <vars> <clauses>`` header, 0-terminated clauses."""
    num_vars = None
    expected = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad DIMACS header {line!r}")
            num_vars, expected = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(v)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        raise ParseError("missing DIMACS header")
    if expected is not None and expected != len(clauses):
        raise ParseError(f"header announced {expected} clauses, found {len(clauses)}")
    return Cnf(num_vars, tuple(clauses))


def to_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines += [" ".join(str(l) for l in clause) + " 0" for clause in cnf.clauses]
    return "\n".join(lines) + "\n"


def brute_sat(cnf: Cnf) -> bool:
    """Satisfiability by exhaustive valuation enumeration (<= 20 variables)."""
    if cnf.num_vars > 20:
        raise ValueError("brute-force oracle is limited to 20 variables")
    for bits in itertools.product((False, True), repeat=cnf.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in clause)
               for clause in cnf.clauses):
            return True
    return False


def random_cnf(seed: int, max_vars: int = 8, max_clauses: int = 12) -> Cnf:
    rng = random.Random(seed)
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(m):
        width = rng.randint(1, 3)
        lits = []
        for v in rng.sample(range(1, n + 1), min(width, n)):
            lits.append(v if rng.random() < 0.5 else -v)
        clauses.append(tuple(lits))
    return Cnf(n, tuple(clauses))


# --- SAT reductions -----------------------------------------------------------

SATGEN_TARGETS = {
    # target -> (semantics, repair kind, fact entailed iff formula satisfiable)
    "cqa_s": ("cqa", "s", False),
    "brave_s_nr": ("brave", "s", True),
    "intersection_s_nr": ("intersection", "s", False),
    "brave_s_lin": ("brave", "s", True),
    "intersection_s_lin": ("intersection", "s", False),
}

_EVER_PAST = Interval(0, POS_INF)
_V = Var("v")


def _punct(pred: str, const: str | None, t: int) -> TemporalFact:
    args = (const,) if const is not None else ()
    return TemporalFact(GroundAtom(pred, args), Interval(t, t))


def _clause_facts(cnf: Cnf) -> list[TemporalFact]:
    facts = []
    for k, clause in enumerate(cnf.clauses, start=1):
        for lit in clause:
            pred = "P" if lit > 0 else "N"
            facts.append(_punct(pred, f"v{abs(lit)}", 2 * k))
    return facts


def satgen(target: str, cnf: Cnf) -> tuple[Program, FactSet, TemporalFact]:
    """The reduction instance for a target semantics: (program, dataset, fact).

    The entailment verdict for the returned fact equals satisfiability or
    unsatisfiability of the CNF according to ``SATGEN_TARGETS[target]``.
    """
    if target not in SATGEN_TARGETS:
        raise ValueError(f"unknown target {target!r}")
    m = len(cnf.clauses)
    p_v = Atom("P", (_V,))
    n_v = Atom("N", (_V,))

    if target == "cqa_s":
        rules = (
            Rule(Atom("Np", (_V,)), (DiamondMinus(_EVER_PAST, n_v),)),
            Rule(Atom("Pp", (_V,)), (DiamondMinus(_EVER_PAST, p_v),)),
            Rule(None, (Atom("Pp", (_V,)), Atom("Np", (_V,)))),
            Rule(Atom("Q"), (DiamondMinus(_EVER_PAST, Atom("U")),)),
            Rule(None, (p_v, Atom("U"))),
            Rule(None, (n_v, Atom("U"))),
        )
        facts = _clause_facts(cnf)
        facts += [_punct("U", None, 2 * k) for k in range(1, m + 1)]
        return Program(rules), FactSet(facts), _punct("Q", None, 2 * m)

    if target in ("brave_s_nr", "intersection_s_nr"):
        rules = [
            Rule(Atom("Np", (_V,)), (DiamondMinus(_EVER_PAST, n_v),)),
            Rule(Atom("Np", (_V,)), (DiamondPlus(_EVER_PAST, n_v),)),
            Rule(None, (p_v, Atom("Np", (_V,)))),
            Rule(Atom("Qp"), (Until(Atom("S"), Interval.make(0, POS_INF, False, False),
                                    Atom("M")),)),
            Rule(Atom("S"), (DiamondMinus(Interval.make(0, 2, True, False), p_v),)),
            Rule(Atom("S"), (DiamondMinus(Interval.make(0, 2, True, False), n_v),)),
        ]
        facts = _clause_facts(cnf) + [_punct("M", None, 2 * m + 2)]
        if target == "brave_s_nr":
            return Program(tuple(rules)), FactSet(facts), _punct("Qp", None, 2)
        rules.append(Rule(None, (Atom("Qp"), Atom("Qpp"))))
        facts.append(_punct("Qpp", None, 2))
        return Program(tuple(rules)), FactSet(facts), _punct("Qpp", None, 2)

    # linear variants
    rules = [
        Rule(Atom("Np", (_V,)), (DiamondMinus(_EVER_PAST, n_v),)),
        Rule(Atom("Pp", (_V,)), (DiamondMinus(_EVER_PAST, p_v),)),
        Rule(None, (Atom("Pp", (_V,)), Atom("Np", (_V,)))),
        Rule(Atom("S"), (Atom("F"),)),
        Rule(Atom("S"), (p_v, DiamondMinus(Interval(2, 2), Atom("S")))),
        Rule(Atom("S"), (n_v, DiamondMinus(Interval(2, 2), Atom("S")))),
    ]
    facts = _clause_facts(cnf) + [_punct("F", None, 0)]
    if target == "brave_s_lin":
        return Program(tuple(rules)), FactSet(facts), _punct("S", None, 2 * m)
    rules.append(Rule(None, (Atom("S"), Atom("Sp"))))
    facts.append(_punct("Sp", None, 2 * m))
    return Program(tuple(rules)), FactSet(facts), _punct("Sp", None, 2 * m)


# --- exponential-size repair and conflict families ----------------------------


def _alternation_rules() -> list[Rule]:
    return [
        Rule(Atom("Aprev"), (DiamondMinus(Interval(1, 1), Atom("A")),)),
        Rule(Atom("Bprev"), (DiamondMinus(Interval(1, 1), Atom("B")),)),
        Rule(None, (Atom("A"), Atom("B"))),
        Rule(None, (Atom("A"), Atom("Aprev"))),
        Rule(None, (Atom("B"), Atom("Bprev"))),
    ]


def expfamily(which: str, n: int) -> tuple[Program, FactSet]:
    """Instance families whose pointwise repairs or conflicts blow up.

    `n` controls the interval length (2**n, or 2**(n+2) for `p_conflict`);
    kept small so exhaustive enumeration stays feasible.
    """
    if n > 4:
        raise ValueError("expfamily is desk-scale only (n <= 4)")
    if which == "p_repair":
        bound = 2 ** n
        data = FactSet([
            TemporalFact(GroundAtom("A"), Interval(0, bound)),
            TemporalFact(GroundAtom("B"), Interval(0, bound)),
        ])
        return Program(tuple(_alternation_rules())), data
    if which == "p_conflict":
        bound = 2 ** (n + 2)
        rules = (
            Rule(Atom("C"), (Atom("A"), DiamondPlus(Interval(1, 1), Atom("B")))),
            Rule(Atom("C"), (Atom("B"), DiamondPlus(Interval(1, 1), Atom("A")))),
            Rule(None, (Atom("S"), Until(Atom("C"),
                                         Interval.make(0, POS_INF, False, False),
                                         Atom("E")))),
        )
        data = FactSet([
            _punct("S", None, -1),
            TemporalFact(GroundAtom("A"), Interval(0, bound)),
            TemporalFact(GroundAtom("B"), Interval(0, bound)),
            _punct("E", None, bound),
        ])
        return Program(rules), data
    if which == "p_conflict_lin":
        bound = 2 ** n
        rules = tuple(_alternation_rules() + [
            Rule(Atom("Qp"), (Atom("Q"), Atom("A"))),
            Rule(Atom("Qp"), (Atom("Q"), Atom("B"))),
            Rule(Atom("Q"), (DiamondMinus(Interval(1, 1), Atom("Qp")),)),
            Rule(None, (Atom("P"), Atom("Qp"))),
        ])
        data = FactSet([
            _punct("Q", None, 0),
            TemporalFact(GroundAtom("A"), Interval(0, bound)),
            TemporalFact(GroundAtom("B"), Interval(0, bound)),
            _punct("P", None, bound),
        ])
        return Program(rules), data
    raise ValueError(f"unknown family {which!r}")


# --- random bounded instances ---------------------------------------------------


def random_instance(seed: int, n_atoms: int = 3, horizon: int = 10,
                    n_rules: int = 3) -> tuple[Program, FactSet]:
    """Reproducible random bounded propositional instance.

    Programs are non-recursive by construction (rule heads only depend on
    later atoms in a fixed order), so materialization always terminates and
    the punctual reference oracle stays cheap.
    """
    if horizon > 30 or n_atoms > 5:
        raise ValueError("random_instance is desk-scale only")
    rng = random.Random(seed)
    names = ["A", "B", "C", "D", "E"][:n_atoms]

    def rand_range(max_len: int = 4) -> Interval:
        a = rng.randint(0, max_len)
        b = rng.randint(a, max_len)
        return Interval(a, b)

    def rand_literal(pool: list[str]):
        atom = Atom(rng.choice(pool))
        shape = rng.random()
        if shape < 0.35:
            return atom
        if shape < 0.8:
            op = rng.choice([BoxPlus, BoxMinus, DiamondPlus, DiamondMinus])
            return op(rand_range(), atom)
        op = rng.choice([Until, Since])
        other = Atom(rng.choice(pool))
        return op(atom, rand_range(3), other)

    rules = []
    for _ in range(n_rules):
        if rng.random() < 0.5 or n_atoms < 2:
            body = tuple(rand_literal(names) for _ in range(rng.randint(1, 2)))
            rules.append(Rule(None, body))
        else:
            head_idx = rng.randrange(n_atoms - 1)
            head: Atom | BoxPlus | BoxMinus = Atom(names[head_idx])
            if rng.random() < 0.3:
                head = rng.choice([BoxPlus, BoxMinus])(rand_range(2), head)
            pool = names[head_idx + 1:]
            body = tuple(rand_literal(pool) for _ in range(rng.randint(1, 2)))
            rules.append(Rule(head, body))

    facts = []
    total_points = 0
    for _ in range(rng.randint(2, 4)):
        length = rng.randint(0, 2)
        lo = rng.randint(0, max(0, horizon - length))
        if total_points + length + 1 > 10:
            length = 0
        total_points += length + 1
        facts.append(TemporalFact(GroundAtom(rng.choice(names)),
                                  Interval(lo, lo + length)))
    from .facts import normalize

    return Program(tuple(rules)), normalize(FactSet(facts))
