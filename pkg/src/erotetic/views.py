"""Core data model for views: terms, literals, states, quantifier prefixes.

A view is a disjunctive set of alternatives ("states"), each a conjunctive
set of signed monadic-or-polyadic atoms, under a prenex quantifier prefix
and optionally conditioned on a supposition (itself a set of states).

Shorthand notation (bit-exact grammar):

    view    := prefix? "{" states? "}" ("^" "{" states? "}")?
    prefix  := (("∃"|"E"|"∀"|"A") ident)+
    states  := "0" | state ("," state)*
    state   := literal+                       (juxtaposed)
    literal := "~"? ident "(" (term ("," term)*)? ")"
    term    := ident "()" "*"? | ident "*"?   (asterisk = issue flag)

"{0}" is the verum view, "{}" the absurd view.  Constants always print
with a trailing "()"; bare identifiers in argument position are variables
and must be declared in the prefix.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

EXISTS = "E"
FORALL = "A"


class ViewError(Exception):
    pass


class ParseError(ViewError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self):
        return f"{self.name}()"


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


Term = Constant | Variable


@dataclass(frozen=True)
class Literal:
    pred: str
    args: tuple[Term, ...]
    positive: bool = True
    issues: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.issues:
            object.__setattr__(self, "issues", (False,) * len(self.args))
        if len(self.issues) != len(self.args):
            raise ViewError("issue flags must align with arguments")

    @property
    def arity(self):
        return len(self.args)

    def identity(self):
        """Identity key; issue flags carry no logical content and are excluded."""
        return (self.pred, self.positive, self.args)

    def negated(self):
        return Literal(self.pred, self.args, not self.positive, self.issues)

    def with_args(self, args: tuple[Term, ...]):
        return Literal(self.pred, args, self.positive, self.issues)

    def has_issue(self):
        return any(self.issues)

    def __str__(self):
        parts = []
        for term, flag in zip(self.args, self.issues):
            parts.append(str(term) + ("*" if flag else ""))
        sign = "" if self.positive else "~"
        return f"{sign}{self.pred}({','.join(parts)})"


def _sort_key(lit: Literal):
    return (lit.pred, 0 if lit.positive else 1, tuple(str(t) for t in lit.args))


class State:
    """A conjunctive set of literals.  Preserves construction order for
    rendering; equality and hashing use set semantics with issue flags
    excluded from literal identity (flags of duplicates are merged)."""

    __slots__ = ("literals",)

    def __init__(self, literals: Iterable[Literal] = ()):
        merged: dict = {}
        for lit in literals:
            key = lit.identity()
            if key in merged:
                old = merged[key]
                flags = tuple(a or b for a, b in zip(old.issues, lit.issues))
                merged[key] = Literal(old.pred, old.args, old.positive, flags)
            else:
                merged[key] = lit
        self.literals = tuple(merged.values())

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return frozenset(l.identity() for l in self.literals) == frozenset(
            l.identity() for l in other.literals
        )

    def __hash__(self):
        return hash(frozenset(l.identity() for l in self.literals))

    def __str__(self):
        if not self.literals:
            return "0"
        return "".join(str(l) for l in sorted(self.literals, key=_sort_key))

    def __repr__(self):
        return f"State({str(self)})"

    def union(self, other: "State"):
        return State(self.literals + other.literals)

    def is_contradictory(self):
        keys = {l.identity() for l in self.literals}
        return any((p, not pos, a) in keys for (p, pos, a) in keys)

    def contains(self, other: "State"):
        keys = {l.identity() for l in self.literals}
        return all(l.identity() in keys for l in other.literals)

    def variables(self):
        return {t for l in self.literals for t in l.args if isinstance(t, Variable)}

    def constants(self):
        return {t for l in self.literals for t in l.args if isinstance(t, Constant)}

    def has_issue(self):
        return any(l.has_issue() for l in self.literals)


EMPTY_STATE = State()
VERUM_SUPPOSITION = (EMPTY_STATE,)


def _dedupe_states(states: Iterable[State]):
    seen = []
    for s in states:
        if s not in seen:
            seen.append(s)
    return tuple(seen)


@dataclass(frozen=True)
class View:
    """Quantifier prefix + stage (disjunction of states) + supposition.

    Immutable after construction; the stage and supposition keep their
    construction order (rendering follows it) while printing canonicalises.
    """

    prefix: tuple[tuple[Variable, str], ...] = ()
    stage: tuple[State, ...] = ()
    supposition: tuple[State, ...] = VERUM_SUPPOSITION

    def __post_init__(self):
        object.__setattr__(self, "stage", _dedupe_states(self.stage))
        object.__setattr__(self, "supposition", _dedupe_states(self.supposition))
        declared = [v for v, _ in self.prefix]
        if len(set(declared)) != len(declared):
            raise ViewError("duplicate variable in prefix")
        used = self.body_variables()
        undeclared = used - set(declared)
        if undeclared:
            names = ", ".join(sorted(v.name for v in undeclared))
            raise ViewError(f"undeclared variable(s): {names}")

    def body_variables(self):
        used = set()
        for s in self.stage:
            used |= s.variables()
        for s in self.supposition:
            used |= s.variables()
        return used

    def constants(self):
        out = set()
        for s in self.stage + self.supposition:
            out |= s.constants()
        return out

    def predicates(self):
        out = {}
        for s in self.stage + self.supposition:
            for l in s:
                out[l.pred] = l.arity
        return out

    def quantifier_of(self, var: Variable):
        for v, q in self.prefix:
            if v == var:
                return q
        return None

    def has_verum_supposition(self):
        return self.supposition == VERUM_SUPPOSITION

    def is_verum(self):
        return self.stage == (EMPTY_STATE,) and self.has_verum_supposition()

    def is_absurd(self):
        return len(self.stage) == 0

    def has_issue(self):
        return any(s.has_issue() for s in self.stage + self.supposition)

    def __eq__(self, other):
        if not isinstance(other, View):
            return NotImplemented
        return (
            frozenset(self.prefix) == frozenset(other.prefix)
            and frozenset(self.stage) == frozenset(other.stage)
            and frozenset(self.supposition) == frozenset(other.supposition)
        )

    def __hash__(self):
        return hash(
            (frozenset(self.prefix), frozenset(self.stage), frozenset(self.supposition))
        )

    def __str__(self):
        return print_view(self)

    def __repr__(self):
        return f"View({print_view(self)})"


def verum():
    return View(stage=(EMPTY_STATE,))


def absurd():
    return View(stage=())


def atom_count(v: View) -> int:
    """Number of literal occurrences in stage plus supposition; the verum
    supposition contributes nothing."""
    n = sum(len(s) for s in v.stage)
    if not v.has_verum_supposition():
        n += sum(len(s) for s in v.supposition)
    return n


# ---------------------------------------------------------------------------
# Substitutions


class Substitution:
    """Finite map Variable -> Term, applied simultaneously."""

    __slots__ = ("mapping",)

    def __init__(self, mapping: Optional[dict] = None):
        self.mapping = dict(mapping or {})

    def get(self, var):
        return self.mapping.get(var)

    def bind(self, var: Variable, term: Term) -> "Substitution":
        new = dict(self.mapping)
        new[var] = term
        return Substitution(new)

    def apply_term(self, term: Term) -> Term:
        seen = set()
        while isinstance(term, Variable) and term in self.mapping:
            if term in seen:
                raise ViewError("cyclic substitution")
            seen.add(term)
            term = self.mapping[term]
        return term

    def apply_literal(self, lit: Literal) -> Literal:
        return lit.with_args(tuple(self.apply_term(t) for t in lit.args))

    def apply_state(self, state: State) -> State:
        return State(self.apply_literal(l) for l in state)

    def apply_view(self, v: View) -> View:
        prefix = tuple((var, q) for var, q in v.prefix if var not in self.mapping)
        return View(
            prefix,
            tuple(self.apply_state(s) for s in v.stage),
            tuple(self.apply_state(s) for s in v.supposition),
        )

    def __repr__(self):
        items = ", ".join(f"{v}->{t}" for v, t in self.mapping.items())
        return f"Substitution({items})"


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(r"∃|∀|[A-Za-z][A-Za-z0-9_]*|[{}()^,~*0]")


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        tokens.append((m.group(0), i))
        i = m.end()
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def here(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return len(self.text)

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.here())
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}", self.tokens[self.pos - 1][1])
        return got

    def parse_view(self):
        prefix = []
        while self.peek() in ("∃", "∀", "E", "A"):
            q = EXISTS if self.next() in ("∃", "E") else FORALL
            name = self.next()
            if not IDENT_RE.fullmatch(name):
                raise ParseError(f"expected variable name, got {name!r}", self.here())
            prefix.append((Variable(name), q))
        declared = {v for v, _ in prefix}
        self.expect("{")
        stage = self.parse_states(declared)
        self.expect("}")
        supposition = VERUM_SUPPOSITION
        if self.peek() == "^":
            self.next()
            self.expect("{")
            supposition = self.parse_states(declared)
            self.expect("}")
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r}", self.here())
        try:
            return View(tuple(prefix), stage, supposition)
        except ViewError as exc:
            raise ParseError(str(exc), 0) from exc

    def parse_states(self, declared):
        if self.peek() == "}":
            return ()
        if self.peek() == "0":
            self.next()
            return (EMPTY_STATE,)
        states = [self.parse_state(declared)]
        while self.peek() == ",":
            self.next()
            if self.peek() == "0":
                self.next()
                states.append(EMPTY_STATE)
            else:
                states.append(self.parse_state(declared))
        return tuple(states)

    def parse_state(self, declared):
        literals = [self.parse_literal(declared)]
        while self.peek() == "~" or (
            self.peek() is not None and IDENT_RE.fullmatch(self.peek() or "")
        ):
            literals.append(self.parse_literal(declared))
        return State(literals)

    def parse_literal(self, declared):
        positive = True
        if self.peek() == "~":
            self.next()
            positive = False
        pred = self.next()
        if not IDENT_RE.fullmatch(pred):
            raise ParseError(f"expected predicate name, got {pred!r}", self.here())
        self.expect("(")
        args, flags = [], []
        if self.peek() != ")":
            term, flag = self.parse_term(declared)
            args.append(term)
            flags.append(flag)
            while self.peek() == ",":
                self.next()
                term, flag = self.parse_term(declared)
                args.append(term)
                flags.append(flag)
        self.expect(")")
        return Literal(pred, tuple(args), positive, tuple(flags))

    def parse_term(self, declared):
        name = self.next()
        if not IDENT_RE.fullmatch(name):
            raise ParseError(f"expected term, got {name!r}", self.here())
        if self.peek() == "(":
            self.next()
            self.expect(")")
            term: Term = Constant(name)
        else:
            term = Variable(name)
            if term not in declared:
                raise ParseError(f"undeclared variable {name!r}", self.here())
        flag = False
        if self.peek() == "*":
            self.next()
            flag = True
        return term, flag


def parse_view(text: str) -> View:
    """Parse the shorthand notation into a View."""
    return _Parser(text).parse_view()


# ---------------------------------------------------------------------------
# Printing


def print_view(v: View) -> str:
    """Canonical text: prefix in declaration order, literals sorted by
    (predicate, polarity, printed args), states sorted by printed form."""
    parts = []
    for var, q in v.prefix:
        parts.append(("∃" if q == EXISTS else "∀") + var.name + " ")
    prefix = "".join(parts)
    body = "{" + ",".join(sorted(str(s) for s in v.stage)) + "}"
    text = prefix + body
    if not v.has_verum_supposition():
        text += "^{" + ",".join(sorted(str(s) for s in v.supposition)) + "}"
    return text


# ---------------------------------------------------------------------------
# Alpha-equality


def _kind_groups(v: View):
    groups: dict = {EXISTS: [], FORALL: []}
    for var, q in v.prefix:
        groups[q].append(var)
    return groups


def alpha_equal(a: View, b: View) -> bool:
    """True iff a quantifier-kind-preserving bijective renaming of prefix
    variables makes the two views identical as sets."""
    ga, gb = _kind_groups(a), _kind_groups(b)
    if len(ga[EXISTS]) != len(gb[EXISTS]) or len(ga[FORALL]) != len(gb[FORALL]):
        return False
    if len(a.stage) != len(b.stage) or len(a.supposition) != len(b.supposition):
        return False
    exist_a, univ_a = ga[EXISTS], ga[FORALL]

    def rename_state(state, mapping):
        return State(
            l.with_args(tuple(mapping.get(t, t) for t in l.args)) for l in state
        )

    for perm_e in itertools.permutations(gb[EXISTS]):
        for perm_u in itertools.permutations(gb[FORALL]):
            mapping = dict(zip(exist_a, perm_e))
            mapping.update(zip(univ_a, perm_u))
            if frozenset(rename_state(s, mapping) for s in a.stage) != frozenset(
                b.stage
            ):
                continue
            if frozenset(rename_state(s, mapping) for s in a.supposition) == frozenset(
                b.supposition
            ):
                return True
    return False


# ---------------------------------------------------------------------------
# Renaming utilities


def fresh_name(base: str, taken: set) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def rename_apart(v: View, taken_names: set) -> View:
    """Rename v's prefix variables away from taken_names."""
    mapping = {}
    own_names = {var.name for var, _ in v.prefix}
    for var, _ in v.prefix:
        if var.name in taken_names:
            avoid = taken_names | own_names | {m.name for m in mapping.values()}
            mapping[var] = Variable(fresh_name(var.name, avoid))
    if not mapping:
        return v
    subst = Substitution(mapping)
    prefix = tuple((mapping.get(var, var), q) for var, q in v.prefix)
    return View(
        prefix,
        tuple(subst.apply_state(s) for s in v.stage),
        tuple(subst.apply_state(s) for s in v.supposition),
    )
