"""Concrete syntax for programs, datasets, facts, and queries.

Program files (whitespace-insensitive, ``%`` starts a line comment)::

    rule     := (head | "bot") ":-" lit ("," lit)* "."
    head     := deterministic lit (no diamond/until/since operators)
    lit      := atom | "top" | unop range lit | "(" lit binop range lit ")"
    unop     := "boxplus" | "boxminus" | "diamondplus" | "diamondminus"
    binop    := "until" | "since"
    interval := ("["|"(") endpoint "," endpoint ("]"|")") | "{" int "}"
    endpoint := int | "-inf" | "inf" | "+inf"
    atom     := ident ("(" ident ("," ident)* ")")?

Dataset files hold facts ``atom "@" interval "."`` whose arguments are all
constants.  In program files an identifier argument is a variable unless it
is listed in the constant registry (the CLI registers every constant of the
companion dataset).  Queries use ``?``-prefixed identifiers in answer
positions and end with ``@`` plus an interval-variable name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import ArityError, EmptyIntervalError, ParseError, SafetyError
from .facts import FactSet, GroundAtom, TemporalFact, normalize
from .intervals import NEG_INF, POS_INF, Interval

# --- AST ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Const:
    name: str


Term = Union[Var, Const]


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class BoxPlus:
    rng: Interval
    arg: "Literal"


@dataclass(frozen=True, slots=True)
class BoxMinus:
    rng: Interval
    arg: "Literal"


@dataclass(frozen=True, slots=True)
class DiamondPlus:
    rng: Interval
    arg: "Literal"


@dataclass(frozen=True, slots=True)
class DiamondMinus:
    rng: Interval
    arg: "Literal"


@dataclass(frozen=True, slots=True)
class Until:
    left: "Literal"
    rng: Interval
    right: "Literal"


@dataclass(frozen=True, slots=True)
class Since:
    left: "Literal"
    rng: Interval
    right: "Literal"


Literal = Union[Atom, Top, BoxPlus, BoxMinus, DiamondPlus, DiamondMinus, Until, Since]


@dataclass(frozen=True, slots=True)
class Rule:
    head: Literal | None  # None encodes a bottom head
    body: tuple[Literal, ...]


@dataclass(frozen=True, slots=True)
class Program:
    rules: tuple[Rule, ...]


@dataclass(frozen=True, slots=True)
class QueryArg:
    name: str
    is_var: bool


@dataclass(frozen=True, slots=True)
class Query:
    predicate: str
    args: tuple[QueryArg, ...]
    interval_var: str

    def answer_vars(self) -> list[str]:
        seen: list[str] = []
        for a in self.args:
            if a.is_var and a.name not in seen:
                seen.append(a.name)
        return seen


@dataclass(frozen=True, slots=True)
class FragmentReport:
    propositional: bool
    core: bool
    linear: bool
    non_recursive: bool
    diamondminus_only: bool


def deterministic(lit: Literal) -> bool:
    """True iff the literal mentions no diamond/until/since operator."""
    if isinstance(lit, (Atom, Top)):
        return True
    if isinstance(lit, (BoxPlus, BoxMinus)):
        return deterministic(lit.arg)
    return False


def literal_vars(lit: Literal, tainted: bool = False) -> tuple[set[str], set[str]]:
    """Vars of a literal split into (safe, tainted-by-left-of-until/since)."""
    safe: set[str] = set()
    bad: set[str] = set()
    if isinstance(lit, Atom):
        names = {t.name for t in lit.args if isinstance(t, Var)}
        (bad if tainted else safe).update(names)
    elif isinstance(lit, (BoxPlus, BoxMinus, DiamondPlus, DiamondMinus)):
        s, b = literal_vars(lit.arg, tainted)
        safe |= s
        bad |= b
    elif isinstance(lit, (Until, Since)):
        s, b = literal_vars(lit.left, True)
        safe |= s
        bad |= b
        s, b = literal_vars(lit.right, tainted)
        safe |= s
        bad |= b
    return safe, bad


def literal_atoms(lit: Literal) -> list[Atom]:
    if isinstance(lit, Atom):
        return [lit]
    if isinstance(lit, Top):
        return []
    if isinstance(lit, (Until, Since)):
        return literal_atoms(lit.left) + literal_atoms(lit.right)
    return literal_atoms(lit.arg)


def literal_operators(lit: Literal) -> set[str]:
    if isinstance(lit, (Atom, Top)):
        return set()
    name = type(lit).__name__
    if isinstance(lit, (Until, Since)):
        return {name} | literal_operators(lit.left) | literal_operators(lit.right)
    return {name} | literal_operators(lit.arg)


# --- lexer / parser ---------------------------------------------------------

_KEYWORDS = {"bot", "top", "boxplus", "boxminus", "diamondplus", "diamondminus",
             "until", "since", "inf"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow>:-)
      | (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[()\[\]{},.@?+-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str  # "arrow" | "int" | "ident" | punct char | "eof"
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind not in ("ws", "comment"):
            tok_kind = val if kind == "punct" else kind
            toks.append(_Tok(tok_kind, val, line, col))
        nl = val.count("\n")
        if nl:
            line += nl
            col = len(val) - val.rfind("\n")
        else:
            col += len(val)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, constants: frozenset[str] = frozenset(),
                 arities: dict[str, int] | None = None):
        self.toks = _lex(text)
        self.pos = 0
        self.constants = constants
        self.arities = arities if arities is not None else {}

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def fail(self, msg: str):
        tok = self.peek()
        raise ParseError(msg, tok.line, tok.col)

    # endpoints and intervals

    def parse_endpoint(self) -> int | float:
        tok = self.next()
        if tok.kind == "-":
            nxt = self.next()
            if nxt.kind == "int":
                return -int(nxt.text)
            if nxt.kind == "ident" and nxt.text == "inf":
                return NEG_INF
            raise ParseError("expected integer or 'inf' after '-'", nxt.line, nxt.col)
        if tok.kind == "+":
            nxt = self.next()
            if nxt.kind == "int":
                return int(nxt.text)
            if nxt.kind == "ident" and nxt.text == "inf":
                return POS_INF
            raise ParseError("expected integer or 'inf' after '+'", nxt.line, nxt.col)
        if tok.kind == "int":
            return int(tok.text)
        if tok.kind == "ident" and tok.text == "inf":
            return POS_INF
        raise ParseError(f"expected interval endpoint, got {tok.text!r}", tok.line, tok.col)

    def parse_interval(self) -> Interval:
        tok = self.next()
        if tok.kind == "{":
            t = self.parse_endpoint()
            self.expect("}")
            if not isinstance(t, int):
                raise ParseError("punctual interval needs a finite timepoint",
                                 tok.line, tok.col)
            return Interval(t, t)
        if tok.kind not in ("[", "("):
            raise ParseError(f"expected interval, got {tok.text!r}", tok.line, tok.col)
        lo_closed = tok.kind == "["
        lo = self.parse_endpoint()
        self.expect(",")
        hi = self.parse_endpoint()
        close = self.next()
        if close.kind not in ("]", ")"):
            raise ParseError(f"expected ']' or ')', got {close.text!r}",
                             close.line, close.col)
        try:
            return Interval.make(lo, hi, lo_closed, close.kind == "]")
        except EmptyIntervalError as e:
            raise EmptyIntervalError(str(e), tok.line, tok.col) from None

    def parse_range(self) -> Interval:
        tok = self.peek()
        rng = self.parse_interval()
        if rng.lo < 0:
            raise ParseError("range endpoints must be non-negative", tok.line, tok.col)
        return rng

    # atoms and literals

    def check_arity(self, pred: str, n: int, tok: _Tok):
        known = self.arities.get(pred)
        if known is None:
            self.arities[pred] = n
        elif known != n:
            raise ArityError(f"predicate {pred!r} used with arity {n} after arity {known}",
                             tok.line, tok.col)

    def parse_atom(self, ground: bool) -> Atom:
        tok = self.expect("ident")
        if tok.text in _KEYWORDS:
            raise ParseError(f"keyword {tok.text!r} cannot be a predicate", tok.line, tok.col)
        args: list[Term] = []
        if self.peek().kind == "(":
            self.next()
            while True:
                arg = self.expect("ident")
                if arg.text in _KEYWORDS:
                    raise ParseError(f"keyword {arg.text!r} cannot be a term",
                                     arg.line, arg.col)
                if ground or arg.text in self.constants:
                    args.append(Const(arg.text))
                else:
                    args.append(Var(arg.text))
                if self.peek().kind == ",":
                    self.next()
                    continue
                break
            self.expect(")")
        self.check_arity(tok.text, len(args), tok)
        return Atom(tok.text, tuple(args))

    def parse_literal(self, ground: bool) -> Literal:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            left = self.parse_literal(ground)
            op = self.expect("ident")
            if op.text not in ("until", "since"):
                raise ParseError(f"expected 'until' or 'since', got {op.text!r}",
                                 op.line, op.col)
            rng = self.parse_range()
            right = self.parse_literal(ground)
            self.expect(")")
            cls = Until if op.text == "until" else Since
            return cls(left, rng, right)
        if tok.kind == "ident" and tok.text == "top":
            self.next()
            return Top()
        if tok.kind == "ident" and tok.text in ("boxplus", "boxminus",
                                                "diamondplus", "diamondminus"):
            self.next()
            rng = self.parse_range()
            arg = self.parse_literal(ground)
            cls = {"boxplus": BoxPlus, "boxminus": BoxMinus,
                   "diamondplus": DiamondPlus, "diamondminus": DiamondMinus}[tok.text]
            return cls(rng, arg)
        if tok.kind == "ident":
            return self.parse_atom(ground)
        self.fail(f"expected literal, got {tok.text!r}")

    # rules, programs, datasets, facts, queries

    def parse_rule(self) -> Rule:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "bot":
            self.next()
            head: Literal | None = None
        else:
            head = self.parse_literal(ground=False)
            if not deterministic(head):
                raise ParseError("rule head mentions a non-deterministic operator",
                                 tok.line, tok.col)
            if isinstance(head, Top):
                raise ParseError("rule head cannot be 'top'", tok.line, tok.col)
        self.expect("arrow")
        body = [self.parse_literal(ground=False)]
        while self.peek().kind == ",":
            self.next()
            body.append(self.parse_literal(ground=False))
        self.expect(".")
        rule = Rule(head, tuple(body))
        self._check_safety(rule, tok)
        return rule

    def _check_safety(self, rule: Rule, tok: _Tok):
        if rule.head is None:
            return
        head_vars, _ = literal_vars(rule.head)
        safe: set[str] = set()
        for lit in rule.body:
            s, _ = literal_vars(lit)
            safe |= s
        missing = head_vars - safe
        if missing:
            raise SafetyError(
                f"head variable(s) {sorted(missing)} not safely bound in body",
                tok.line, tok.col)

    def parse_program(self) -> Program:
        rules = []
        while self.peek().kind != "eof":
            rules.append(self.parse_rule())
        return Program(tuple(rules))

    def parse_fact(self) -> TemporalFact:
        atom = self.parse_atom(ground=True)
        self.expect("@")
        interval = self.parse_interval()
        return TemporalFact(GroundAtom(atom.predicate,
                                       tuple(t.name for t in atom.args)), interval)

    def parse_dataset(self) -> list[TemporalFact]:
        facts = []
        while self.peek().kind != "eof":
            facts.append(self.parse_fact())
            self.expect(".")
        return facts

    def parse_query(self) -> Query:
        tok = self.expect("ident")
        args: list[QueryArg] = []
        if self.peek().kind == "(":
            self.next()
            while True:
                if self.peek().kind == "?":
                    self.next()
                    name = self.expect("ident")
                    args.append(QueryArg(name.text, True))
                else:
                    name = self.expect("ident")
                    args.append(QueryArg(name.text, False))
                if self.peek().kind == ",":
                    self.next()
                    continue
                break
            self.expect(")")
        self.expect("@")
        ivar = self.expect("ident")
        self.expect("eof")
        return Query(tok.text, tuple(args), ivar.text)


def parse_program(text: str, constants: Iterable[str] = (),
                  arities: dict[str, int] | None = None) -> Program:
    p = _Parser(text, frozenset(constants), arities)
    prog = p.parse_program()
    p.expect("eof")
    return prog


def parse_dataset_raw(text: str, arities: dict[str, int] | None = None) -> FactSet:
    """Dataset exactly as written, without normalization."""
    p = _Parser(text, arities=arities)
    return FactSet(p.parse_dataset())


def parse_dataset(text: str, arities: dict[str, int] | None = None) -> FactSet:
    """Parse and normalize a dataset file."""
    return normalize(parse_dataset_raw(text, arities))


def parse_fact(text: str, arities: dict[str, int] | None = None) -> TemporalFact:
    p = _Parser(text, arities=arities)
    fact = p.parse_fact()
    if p.peek().kind == ".":
        p.next()
    p.expect("eof")
    return fact


def parse_query(text: str) -> Query:
    return _Parser(text).parse_query()


def parse_problem(program_text: str, dataset_text: str) -> tuple[Program, FactSet]:
    """Parse a program together with its dataset.

    The dataset is read first so its constants and predicate arities are
    available to disambiguate the program's identifiers.
    """
    arities: dict[str, int] = {}
    raw = parse_dataset_raw(dataset_text, arities)
    program = parse_program(program_text, constants=raw.constants(), arities=arities)
    return program, normalize(raw)


# --- printing ---------------------------------------------------------------


def term_to_text(t: Term) -> str:
    return t.name


def atom_to_text(a: Atom) -> str:
    if not a.args:
        return a.predicate
    return f"{a.predicate}({','.join(term_to_text(t) for t in a.args)})"


def literal_to_text(lit: Literal) -> str:
    if isinstance(lit, Atom):
        return atom_to_text(lit)
    if isinstance(lit, Top):
        return "top"
    if isinstance(lit, BoxPlus):
        return f"boxplus{lit.rng} {literal_to_text(lit.arg)}"
    if isinstance(lit, BoxMinus):
        return f"boxminus{lit.rng} {literal_to_text(lit.arg)}"
    if isinstance(lit, DiamondPlus):
        return f"diamondplus{lit.rng} {literal_to_text(lit.arg)}"
    if isinstance(lit, DiamondMinus):
        return f"diamondminus{lit.rng} {literal_to_text(lit.arg)}"
    if isinstance(lit, Until):
        return f"({literal_to_text(lit.left)} until {lit.rng} {literal_to_text(lit.right)})"
    if isinstance(lit, Since):
        return f"({literal_to_text(lit.left)} since {lit.rng} {literal_to_text(lit.right)})"
    raise TypeError(f"not a literal: {lit!r}")


def rule_to_text(rule: Rule) -> str:
    head = "bot" if rule.head is None else literal_to_text(rule.head)
    return f"{head} :- {', '.join(literal_to_text(l) for l in rule.body)}."


def program_to_text(program: Program) -> str:
    return "\n".join(rule_to_text(r) for r in program.rules) + ("\n" if program.rules else "")


def fact_to_text(fact: TemporalFact) -> str:
    return f"{fact}."


def dataset_to_text(d: FactSet) -> str:
    return "\n".join(fact_to_text(f) for f in d.sorted_facts()) + ("\n" if len(d) else "")


# --- grounding --------------------------------------------------------------


def rule_vars(rule: Rule) -> list[str]:
    out: set[str] = set()
    lits = list(rule.body) + ([rule.head] if rule.head is not None else [])
    for lit in lits:
        s, b = literal_vars(lit)
        out |= s | b
    return sorted(out)


def _substitute(lit: Literal, binding: dict[str, str]) -> Literal:
    if isinstance(lit, Atom):
        args = tuple(Const(binding[t.name]) if isinstance(t, Var) else t
                     for t in lit.args)
        return Atom(lit.predicate, args)
    if isinstance(lit, Top):
        return lit
    if isinstance(lit, (Until, Since)):
        return type(lit)(_substitute(lit.left, binding), lit.rng,
                         _substitute(lit.right, binding))
    return type(lit)(lit.rng, _substitute(lit.arg, binding))


def ground_program(program: Program, constants: Iterable[str]) -> Program:
    """All ground instances over the constant set, in deterministic order."""
    consts = sorted(set(constants))
    out: list[Rule] = []
    for rule in program.rules:
        vs = rule_vars(rule)
        if not vs:
            out.append(rule)
            continue
        bindings = [{}]
        for v in vs:
            bindings = [dict(b, **{v: c}) for b in bindings for c in consts]
        for b in bindings:
            head = None if rule.head is None else _substitute(rule.head, b)
            body = tuple(_substitute(l, b) for l in rule.body)
            out.append(Rule(head, body))
    return Program(tuple(out))


def program_constants(program: Program) -> set[str]:
    out: set[str] = set()
    for rule in program.rules:
        lits = list(rule.body) + ([rule.head] if rule.head is not None else [])
        for lit in lits:
            for atom in literal_atoms(lit):
                out |= {t.name for t in atom.args if isinstance(t, Const)}
    return out


# --- fragment classification -------------------------------------------------


def classify_fragment(program: Program) -> FragmentReport:
    atoms: list[Atom] = []
    ops: set[str] = set()
    head_preds: set[str] = set()
    edges: dict[str, set[str]] = {}
    for rule in program.rules:
        for lit in rule.body:
            atoms.extend(literal_atoms(lit))
            ops |= literal_operators(lit)
        if rule.head is not None:
            atoms.extend(literal_atoms(rule.head))
            ops |= literal_operators(rule.head)
            for h in literal_atoms(rule.head):
                head_preds.add(h.predicate)
                tgt = edges.setdefault(h.predicate, set())
                for lit in rule.body:
                    tgt |= {a.predicate for a in literal_atoms(lit)}

    propositional = all(not a.args for a in atoms)
    core = all(
        (r.head is None and len(r.body) == 2) or (r.head is not None and len(r.body) == 1)
        for r in program.rules
    )

    def intensional_count(rule: Rule) -> int:
        return sum(
            1 for lit in rule.body
            if any(a.predicate in head_preds for a in literal_atoms(lit))
        )

    linear = all(
        (r.head is None and len(r.body) == 2)
        or (r.head is not None and intensional_count(r) <= 1)
        for r in program.rules
    )

    # cycle detection on the predicate dependency relation
    non_recursive = True
    state: dict[str, int] = {}

    def visit(p: str) -> bool:
        state[p] = 1
        for q in edges.get(p, ()):
            if state.get(q) == 1:
                return False
            if state.get(q) is None and not visit(q):
                return False
        state[p] = 2
        return True

    for p in sorted(edges):
        if state.get(p) is None and not visit(p):
            non_recursive = False
            break

    diamondminus_only = ops <= {"DiamondMinus"}
    return FragmentReport(propositional, core, linear, non_recursive, diamondminus_only)
