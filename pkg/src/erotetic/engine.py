"""Erotetic operations: issue matching, update, query, factor, and the
default inference procedures that produce predicted conclusions.

Update merges an incoming view into the current one, filtering alternatives
by best match with the incoming information.  Matching is guided by issue
structure: in a view that carries issue flags, only variables that occur
at issue may be bound during matching; in flag-free views binding is
unrestricted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .views import (
    EMPTY_STATE,
    EXISTS,
    Literal,
    State,
    Substitution,
    Variable,
    View,
    rename_apart,
)


@dataclass(frozen=True)
class MatchResult:
    score: int
    subst: Substitution
    pairs: tuple = ()


@dataclass
class TraceStep:
    op: str
    inputs: tuple
    output: View


@dataclass
class InferenceTrace:
    steps: list = field(default_factory=list)

    def record(self, op, inputs, output):
        self.steps.append(TraceStep(op, tuple(inputs), output))

    def replay(self) -> Optional[View]:
        """Re-execute each recorded step; returns the final view."""
        ops = {"update": _update_renamed, "factor": factor, "query": query}
        out = None
        for step in self.steps:
            out = ops[step.op](*step.inputs)
            if isinstance(out, tuple):
                out = out[0]
        return out

    def describe(self) -> str:
        lines = []
        for step in self.steps:
            ins = " ; ".join(str(v) for v in step.inputs)
            lines.append(f"{step.op}: {ins}  =>  {step.output}")
        return "\n".join(lines)


def _bindable_variables(v: View) -> set:
    """Variables of v that matching may bind: all of them when v carries no
    issue flags, otherwise only those with at least one at-issue occurrence."""
    if not v.has_issue():
        return {var for var, _ in v.prefix}
    at_issue = set()
    for s in v.stage + v.supposition:
        for lit in s:
            for term, flag in zip(lit.args, lit.issues):
                if flag and isinstance(term, Variable):
                    at_issue.add(term)
    return at_issue


def literal_match(
    cur_lit: Literal,
    inc_lit: Literal,
    subst: Optional[Substitution] = None,
    cur_bindable: Optional[set] = None,
    inc_bindable: Optional[set] = None,
) -> Optional[Substitution]:
    """Unify two literals position-wise under an extension of subst.

    Requires same predicate and polarity.  When both sides are variables the
    current-side variable is bound to the incoming term, so the incoming
    name survives in merged states.  Returns the extended substitution, or
    None on failure.
    """
    if cur_lit.pred != inc_lit.pred or cur_lit.positive != inc_lit.positive:
        return None
    if cur_lit.arity != inc_lit.arity:
        return None
    sigma = subst if subst is not None else Substitution()

    def may_bind(var, pool):
        return pool is None or var in pool

    for a, b in zip(cur_lit.args, inc_lit.args):
        a = sigma.apply_term(a)
        b = sigma.apply_term(b)
        if a == b:
            continue
        if isinstance(a, Variable) and may_bind(a, cur_bindable):
            sigma = sigma.bind(a, b)
        elif isinstance(b, Variable) and may_bind(b, inc_bindable):
            sigma = sigma.bind(b, a)
        else:
            return None
    return sigma


def _literal_sort_key(lit: Literal):
    return (lit.pred, 0 if lit.positive else 1, tuple(str(t) for t in lit.args))


def state_match(
    gamma: State,
    delta: State,
    cur_bindable: Optional[set] = None,
    inc_bindable: Optional[set] = None,
) -> MatchResult:
    """Maximal number of delta literals matched to distinct gamma literals
    under one consistent substitution.  Deterministic: literals are visited
    in canonical order and ties prefer issue-flagged pairings."""
    dlits = sorted(delta, key=_literal_sort_key)
    glits = sorted(gamma, key=_literal_sort_key)
    best = MatchResult(0, Substitution())

    def candidates(dlit):
        ranked = []
        for j, glit in enumerate(glits):
            both_issue = glit.has_issue() and dlit.has_issue()
            ranked.append((0 if both_issue else 1, j, glit))
        return sorted(ranked)

    def search(i, sigma, used, count, pairs):
        nonlocal best
        if count + (len(dlits) - i) <= best.score:
            return  # cannot beat the current best
        if i == len(dlits):
            if count > best.score:
                best = MatchResult(count, sigma, tuple(pairs))
            return
        dlit = dlits[i]
        for _, j, glit in candidates(dlit):
            if j in used:
                continue
            extended = literal_match(glit, dlit, sigma, cur_bindable, inc_bindable)
            if extended is not None:
                search(i + 1, extended, used | {j}, count + 1, pairs + [(glit, dlit)])
        search(i + 1, sigma, used, count, pairs)

    search(0, Substitution(), frozenset(), 0, [])
    return best


def instance_in(
    target: State,
    pattern: State,
    sigma: Optional[Substitution] = None,
    bindable: Optional[set] = None,
) -> Optional[Substitution]:
    """Extend sigma so that target contains pattern's sigma-instance.

    Only pattern-side variables in `bindable` may be bound (all pattern
    variables when bindable is None).
    """
    sigma = sigma if sigma is not None else Substitution()
    plits = sorted(pattern, key=_literal_sort_key)
    tlits = list(target)

    def search(i, s):
        if i == len(plits):
            return s
        for tlit in tlits:
            ext = literal_match(tlit, plits[i], s, cur_bindable=set(), inc_bindable=bindable)
            if ext is not None:
                out = search(i + 1, ext)
                if out is not None:
                    return out
        return None

    return search(0, sigma)


# ---------------------------------------------------------------------------
# Update


def _result_prefix(current: View, incoming: View, *state_groups) -> tuple:
    used = set()
    for group in state_groups:
        for s in group:
            used |= s.variables()
    prefix = []
    for var, q in current.prefix + incoming.prefix:
        if var in used and all(var != v for v, _ in prefix):
            prefix.append((var, q))
    return tuple(prefix)


def _combine_stages(current: View, incoming: View):
    """Best-match filtering of the stage product.

    Max-score merged states win; with no match (or only contradictory
    merges) the filtered pairwise product is used; if everything is
    contradictory the current stage survives unchanged.
    """
    cur_bindable = _bindable_variables(current)
    inc_bindable = _bindable_variables(incoming)
    results = []
    for gamma in current.stage:
        for delta in incoming.stage:
            m = state_match(gamma, delta, cur_bindable, inc_bindable)
            results.append((m.score, gamma, delta, m.subst))
    if not results:
        return incoming.stage if incoming.stage else current.stage
    top = max(score for score, *_ in results)
    if top > 0:
        merged = []
        for score, gamma, delta, sigma in results:
            if score != top:
                continue
            state = sigma.apply_state(gamma.union(delta))
            if not state.is_contradictory():
                merged.append(state)
        if merged:
            return tuple(merged)
    products = []
    for _, gamma, delta, _ in results:
        state = gamma.union(delta)
        if not state.is_contradictory():
            products.append(state)
    if not products:
        return current.stage
    return tuple(products)


def _negate_states(states: Sequence[State]) -> tuple:
    """Classical negation of a disjunction of conjunctions, re-expanded to
    disjunctive normal form (choose one literal per state, negate each)."""
    choices = [list(s) for s in states]
    out = []
    for combo in itertools.product(*choices):
        state = State(l.negated() for l in combo)
        if not state.is_contradictory():
            out.append(state)
    return tuple(out) if out else ()


def _contradicts(delta: State, gamma: State) -> bool:
    gamma_keys = {l.identity() for l in gamma}
    return any((l.pred, not l.positive, l.args) in gamma_keys for l in delta)


def _discharge_sigma(supposition: Sequence[State], delta: State, bindable) -> Optional[Substitution]:
    sigma = Substitution()
    for s in supposition:
        sigma = instance_in(delta, s, sigma, bindable)
        if sigma is None:
            return None
    return sigma


def _match_state_sets(source: Sequence[State], target: Sequence[State], bindable) -> Optional[Substitution]:
    """Substitution over `bindable` making the source states (as a set) land
    exactly on the target states."""
    if len(source) != len(target):
        return None

    def search(i, sigma, used):
        if i == len(source):
            return sigma
        for j, t in enumerate(target):
            if j in used:
                continue
            ext = instance_in(t, source[i], sigma, bindable)
            if ext is not None and sigma_maps_onto(source[i], t, ext):
                out = search(i + 1, ext, used | {j})
                if out is not None:
                    return out
        return None

    def sigma_maps_onto(s, t, sigma):
        return sigma.apply_state(s) == t

    return search(0, Substitution(), frozenset())


def _update_renamed(current: View, incoming: View) -> View:
    cur_suppositional = not current.has_verum_supposition()
    inc_suppositional = not incoming.has_verum_supposition()

    if cur_suppositional and not inc_suppositional:
        # Supposition discharge (modus ponens shape): an incoming state
        # instantiates every supposed state, so the supposition is dropped
        # and the bare stage is updated by the incoming view.
        for delta in incoming.stage:
            sigma = _discharge_sigma(current.supposition, delta, None)
            if sigma is not None:
                stage = tuple(sigma.apply_state(s) for s in current.stage)
                prefix = _result_prefix(current, incoming, stage)
                discharged = View(prefix, stage)
                return _update_renamed(discharged, incoming)
        # Contrapositive (modus tollens shape): categorical incoming states
        # contradict every stage alternative, so the negated supposition
        # follows.
        if current.stage and all(
            any(_contradicts(d, g) for d in incoming.stage) for g in current.stage
        ):
            stage = _negate_states(current.supposition)
            prefix = _result_prefix(current, incoming, stage)
            return View(prefix, stage)

    if inc_suppositional:
        inc_bindable = {var for var, _ in incoming.prefix}
        if cur_suppositional:
            # Supposition chaining: the incoming stage restates the current
            # supposition, so the current stage becomes conditional on the
            # incoming supposition instead.
            sigma = _match_state_sets(
                list(incoming.stage), list(current.supposition), inc_bindable
            )
            if sigma is not None:
                supposition = tuple(sigma.apply_state(s) for s in incoming.supposition)
                prefix = _result_prefix(current, incoming, current.stage, supposition)
                return View(prefix, current.stage, supposition)
        else:
            # Incoming supposition already granted by the current stage.
            for gamma in current.stage:
                sigma = _discharge_sigma(incoming.supposition, gamma, inc_bindable)
                if sigma is not None:
                    stage = tuple(sigma.apply_state(s) for s in incoming.stage)
                    prefix = _result_prefix(current, incoming, stage)
                    return _update_renamed(current, View(prefix, stage))

    stage = _combine_stages(current, incoming)
    if cur_suppositional or inc_suppositional:
        supposition = tuple(
            a.union(b) for a in current.supposition for b in incoming.supposition
        )
    else:
        supposition = (EMPTY_STATE,)
    prefix = _result_prefix(current, incoming, stage, supposition)
    return View(prefix, stage, supposition)


def update(current: View, incoming: View, trace: Optional[InferenceTrace] = None) -> View:
    """Update the current view with an incoming one."""
    taken = {var.name for var, _ in current.prefix}
    taken |= {c.name for c in current.constants() | incoming.constants()}
    incoming = rename_apart(incoming, taken)
    result = _update_renamed(current, incoming)
    if trace is not None:
        trace.record("update", (current, incoming), result)
    return result


# ---------------------------------------------------------------------------
# Query / factor / default procedures


def query_endorses(v: View, q: View) -> bool:
    """True iff every stage alternative of v contains an instance of some
    alternative of q."""
    taken = {var.name for var, _ in v.prefix} | {c.name for c in v.constants()}
    q = rename_apart(q, taken)
    q_vars = {var for var, _ in q.prefix}
    if not v.stage:
        return False
    for gamma in v.stage:
        if not any(instance_in(gamma, qs, None, q_vars) is not None for qs in q.stage):
            return False
    return True


def query(v: View, q: View, trace: Optional[InferenceTrace] = None) -> View:
    """Return q when v endorses it, else v unchanged."""
    result = q if query_endorses(v, q) else v
    if trace is not None:
        trace.record("query", (v, q), result)
    return result


def factor(v: View, trace: Optional[InferenceTrace] = None) -> View:
    """Drop contradictory and subsumed alternatives and unused prefix
    variables."""
    states = [s for s in v.stage if not s.is_contradictory()]
    if not states:
        states = list(v.stage)
    kept = []
    for s in states:
        if any(other != s and s.contains(other) for other in states):
            continue
        kept.append(s)
    stage = tuple(kept)
    used = set()
    for s in stage:
        used |= s.variables()
    for s in v.supposition:
        used |= s.variables()
    prefix = tuple((var, q) for var, q in v.prefix if var in used)
    result = View(prefix, stage, v.supposition)
    if trace is not None:
        trace.record("factor", (v,), result)
    return result


def what_follows_traced(premises: Sequence[View]):
    """Fold update over the premises, factor the result, return it with the
    full inference trace."""
    if not premises:
        raise ValueError("premises must be non-empty")
    trace = InferenceTrace()
    v = premises[0]
    for p in premises[1:]:
        v = update(v, p, trace)
    v = factor(v, trace)
    return v, trace


def what_follows(premises: Sequence[View]) -> View:
    return what_follows_traced(premises)[0]


def does_it_follow(premises: Sequence[View], q: View) -> bool:
    """True iff the default procedure's conclusion endorses q."""
    return query_endorses(what_follows(premises), q)
