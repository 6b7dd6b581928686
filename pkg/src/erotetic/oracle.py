"""Classical semantics for views and a decision procedure for monadic
first-order logic without equality.

Two independent routes are provided:

* ``entails`` / ``satisfiable`` decide by quantifier elimination: every
  quantifier over a monadic matrix reduces to "some element realises this
  predicate profile" assertions, and the resulting propositional skeleton
  is checked for a realisable branch against all 2^k predicate profiles.

* ``find_model`` enumerates explicit finite models directly, smallest
  domain first.  Without equality, duplicating an element's predicate
  profile never changes truth, so enumerating domains of pairwise-distinct
  profiles up to size 2^k is exhaustive.  This is the slow brute-force
  oracle the fast route is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .views import Constant, EXISTS, FORALL, Variable, View


class OracleError(Exception):
    pass


class FragmentError(OracleError):
    """Input outside the monadic equality-free fragment."""


class BoundExceededError(OracleError):
    """The configured domain cap is below the theoretical 2^k bound."""


# ---------------------------------------------------------------------------
# Formula representation (prenex prefix + boolean matrix)

TRUE = ("true",)
FALSE = ("false",)


def Atom(pred, arg):
    return ("atom", pred, arg)


def Not(f):
    return ("not", f)


def And(items):
    return ("and", tuple(items))


def Or(items):
    return ("or", tuple(items))


def Implies(a, b):
    return ("implies", a, b)


@dataclass(frozen=True)
class Formula:
    prefix: tuple  # ((name, EXISTS|FORALL), ...)
    matrix: tuple

    def __str__(self):
        quants = " ".join(
            ("∃" if k == EXISTS else "∀") + n for n, k in self.prefix
        )
        return (quants + " " if quants else "") + _fmt(self.matrix)


def _fmt(node):
    tag = node[0]
    if tag == "true":
        return "⊤"
    if tag == "false":
        return "⊥"
    if tag == "atom":
        return f"{node[1]}({node[2]})"
    if tag == "not":
        return f"¬{_fmt(node[1])}"
    if tag == "and":
        return "(" + " ∧ ".join(_fmt(x) for x in node[1]) + ")"
    if tag == "or":
        return "(" + " ∨ ".join(_fmt(x) for x in node[1]) + ")"
    if tag == "implies":
        return f"({_fmt(node[1])} → {_fmt(node[2])})"
    raise ValueError(tag)


def verum_formula():
    return Formula((), TRUE)


def to_classical(v: View) -> Formula:
    """Prenex reading of a view: prefix-quantified implication from the
    supposition disjunction to the stage disjunction.  Issue flags are
    discarded."""

    def state_node(state):
        atoms = []
        for lit in state:
            node = ("atom", lit.pred, tuple(_term_key(t) for t in lit.args))
            atoms.append(node if lit.positive else Not(node))
        if not atoms:
            return TRUE
        return And(atoms) if len(atoms) > 1 else atoms[0]

    def dnf_node(states):
        if not states:
            return FALSE
        nodes = [state_node(s) for s in states]
        return Or(nodes) if len(nodes) > 1 else nodes[0]

    stage = dnf_node(v.stage)
    if v.has_verum_supposition():
        matrix = stage
    else:
        matrix = Implies(dnf_node(v.supposition), stage)
    prefix = tuple((var.name, q) for var, q in v.prefix)
    return Formula(prefix, matrix)


def _term_key(term):
    if isinstance(term, Constant):
        return ("const", term.name)
    return ("var", term.name)


def negate(f: Formula) -> Formula:
    flipped = tuple(
        (n, FORALL if k == EXISTS else EXISTS) for n, k in f.prefix
    )
    return Formula(flipped, Not(f.matrix))


def _collect_symbols(formulas):
    preds, consts = {}, set()

    def walk(node):
        tag = node[0]
        if tag == "atom":
            _, pred, args = node
            arity = len(args)
            if preds.setdefault(pred, arity) != arity:
                raise FragmentError(f"inconsistent arity for predicate {pred}")
            for kind, name in args:
                if kind == "const":
                    consts.add(name)
        elif tag == "not":
            walk(node[1])
        elif tag in ("and", "or"):
            for x in node[1]:
                walk(x)
        elif tag == "implies":
            walk(node[1])
            walk(node[2])

    for f in formulas:
        walk(f.matrix)
    return preds, sorted(consts)


def _require_monadic(preds):
    bad = [p for p, a in preds.items() if a != 1]
    if bad:
        raise FragmentError(f"non-monadic predicate(s): {', '.join(sorted(bad))}")


# ---------------------------------------------------------------------------
# Quantifier elimination route
#
# Leaves of the propositional skeleton:
#   ("g", pred, const)      ground atom
#   ("v", pred, var)        atom on a still-quantified variable
#   ("e", pattern)          "some element realises this partial profile",
#                           pattern = frozenset of (pred, bool)


def _nnf(node, sign=True):
    tag = node[0]
    if tag == "not":
        return _nnf(node[1], not sign)
    if tag == "implies":
        return _nnf(Or([Not(node[1]), node[2]]), sign)
    if tag == "true":
        return TRUE if sign else FALSE
    if tag == "false":
        return FALSE if sign else TRUE
    if tag == "and":
        items = tuple(_nnf(x, sign) for x in node[1])
        return ("and" if sign else "or", items)
    if tag == "or":
        items = tuple(_nnf(x, sign) for x in node[1])
        return ("or" if sign else "and", items)
    # leaf
    return node if sign else ("not", node)


class _Budget:
    """Caps the propositional expansion work of one decision call."""

    __slots__ = ("left",)

    def __init__(self, limit):
        self.left = limit

    def spend(self, n=1):
        if self.left is None:
            return
        self.left -= n
        if self.left < 0:
            raise BoundExceededError("propositional expansion exceeded work budget")


def _prune_conjuncts(branches):
    """Drop duplicate and subsumed conjuncts (supersets imply subsets)."""
    keyed = {}
    for conj in branches:
        keyed.setdefault(frozenset(conj.items()), conj)
    keys = sorted(keyed, key=len)
    kept = []
    for key in keys:
        if not any(other <= key for other in kept):
            kept.append(key)
    return [keyed[k] for k in kept]


def _dnf(node, budget=None):
    """List of conjuncts; each conjunct maps leaf -> bool.  Contradictory
    conjuncts are pruned."""
    node = _nnf(node)
    budget = budget or _Budget(None)

    def go(n):
        tag = n[0]
        if tag == "true":
            return [{}]
        if tag == "false":
            return []
        if tag == "not":
            return [{n[1]: False}]
        if tag == "or":
            out = []
            for x in n[1]:
                out.extend(go(x))
            return _prune_conjuncts(out) if len(out) > 64 else out
        if tag == "and":
            branches = [{}]
            for x in n[1]:
                nxt = []
                for left in branches:
                    for right in go(x):
                        merged = dict(left)
                        ok = True
                        for leaf, val in right.items():
                            if merged.get(leaf, val) != val:
                                ok = False
                                break
                            merged[leaf] = val
                        if ok:
                            nxt.append(merged)
                budget.spend(len(nxt))
                branches = _prune_conjuncts(nxt) if len(nxt) > 64 else nxt
            return branches
        return [{n: True}]

    return go(node)


def _rebuild(conjuncts):
    if not conjuncts:
        return FALSE
    disjuncts = []
    for conj in conjuncts:
        lits = [leaf if val else ("not", leaf) for leaf, val in conj.items()]
        if not lits:
            return TRUE
        disjuncts.append(And(lits) if len(lits) > 1 else lits[0])
    return Or(disjuncts) if len(disjuncts) > 1 else disjuncts[0]


def _ground_matrix(f: Formula, budget=None):
    """Eliminate the prenex quantifiers, innermost first."""

    def leafify(node):
        tag = node[0]
        if tag == "atom":
            _, pred, args = node
            (kind, name) = args[0]
            return ("g", pred, name) if kind == "const" else ("v", pred, name)
        if tag == "not":
            return ("not", leafify(node[1]))
        if tag in ("and", "or"):
            return (tag, tuple(leafify(x) for x in node[1]))
        if tag == "implies":
            return ("implies", leafify(node[1]), leafify(node[2]))
        return node

    node = leafify(f.matrix)
    for name, kind in reversed(f.prefix):
        if kind == EXISTS:
            node = _eliminate_exists(node, name, budget)
        else:
            node = ("not", _eliminate_exists(("not", node), name, budget))
    return node


def _eliminate_exists(node, var, budget=None):
    out = []
    for conj in _dnf(node, budget):
        pattern = {}
        rest = {}
        ok = True
        for leaf, val in conj.items():
            if leaf[0] == "v" and leaf[2] == var:
                pred = leaf[1]
                if pattern.get(pred, val) != val:
                    ok = False
                    break
                pattern[pred] = val
            else:
                rest[leaf] = val
        if not ok:
            continue
        if pattern:
            key = ("e", frozenset(pattern.items()))
            if rest.get(key) is False:
                continue  # conjunct both requires and forbids this profile
            rest[key] = True
        out.append(rest)
    return _rebuild(_prune_conjuncts(out))


def _realizable(conj, preds):
    """Can one finite model satisfy this conjunct of ground and profile
    literals?  Returns the model's profile choices, or None."""
    plist = sorted(preds)
    index = {p: i for i, p in enumerate(plist)}
    n_types = 1 << len(plist)

    true_patterns, false_patterns = [], []
    const_partial: dict = {}
    for leaf, val in conj.items():
        if leaf[0] == "e":
            (true_patterns if val else false_patterns).append(dict(leaf[1]))
        elif leaf[0] == "g":
            _, pred, const = leaf
            partial = const_partial.setdefault(const, {})
            if partial.get(pred, val) != val:
                return None
            partial[pred] = val
        else:  # pragma: no cover - "v" leaves are all eliminated
            raise OracleError(f"unexpected leaf {leaf}")

    def compatible(t, pattern):
        return all(bool(t & (1 << index[p])) == v for p, v in pattern.items())

    allowed = [
        t
        for t in range(n_types)
        if not any(compatible(t, f) for f in false_patterns)
    ]
    const_types = {}
    for const, partial in const_partial.items():
        match = next((t for t in allowed if compatible(t, partial)), None)
        if match is None:
            return None
        const_types[const] = match
    witnesses = []
    for p in true_patterns:
        match = next((t for t in allowed if compatible(t, p)), None)
        if match is None:
            return None
        witnesses.append(match)
    if not const_types and not witnesses:
        if not allowed:
            return None
        witnesses.append(allowed[0])
    return plist, const_types, witnesses


def satisfiable(
    formulas: Sequence[Formula], max_domain: int = 64, work_limit: int = 500_000
) -> bool:
    """Joint satisfiability over the monadic equality-free fragment."""
    preds, _ = _collect_symbols(formulas)
    _require_monadic(preds)
    if (1 << len(preds)) > max_domain:
        raise BoundExceededError(
            f"{len(preds)} predicates need domain bound {1 << len(preds)} "
            f"> cap {max_domain}"
        )
    budget = _Budget(work_limit)
    grounded = [_ground_matrix(f, budget) for f in formulas]
    skeleton = And(grounded) if len(grounded) != 1 else grounded[0]
    for conj in _dnf(skeleton, budget):
        if _realizable(conj, preds) is not None:
            return True
    return False


def entails(
    premises: Sequence[Formula], conclusion: Formula, max_domain: int = 64
) -> bool:
    """True iff premises ∧ ¬conclusion is unsatisfiable."""
    return not satisfiable(list(premises) + [negate(conclusion)], max_domain)


def equivalent(f: Formula, g: Formula, max_domain: int = 64) -> bool:
    return entails([f], g, max_domain) and entails([g], f, max_domain)


# ---------------------------------------------------------------------------
# Explicit model enumeration route


@dataclass
class FiniteModel:
    domain_size: int
    predicates: dict  # pred -> set of element indices
    constants: dict  # const name -> element index

    def holds(self, pred, element):
        return element in self.predicates.get(pred, set())


def evaluate(f: Formula, model: FiniteModel) -> bool:
    """Direct Tarskian evaluation of a closed prenex formula."""

    def matrix(node, env):
        tag = node[0]
        if tag == "true":
            return True
        if tag == "false":
            return False
        if tag == "atom":
            _, pred, args = node
            kind, name = args[0]
            elem = model.constants[name] if kind == "const" else env[name]
            return model.holds(pred, elem)
        if tag == "not":
            return not matrix(node[1], env)
        if tag == "and":
            return all(matrix(x, env) for x in node[1])
        if tag == "or":
            return any(matrix(x, env) for x in node[1])
        if tag == "implies":
            return (not matrix(node[1], env)) or matrix(node[2], env)
        raise OracleError(f"bad node {tag}")

    def quantified(i, env):
        if i == len(f.prefix):
            return matrix(f.matrix, env)
        name, kind = f.prefix[i]
        elems = range(model.domain_size)
        if kind == EXISTS:
            return any(quantified(i + 1, {**env, name: e}) for e in elems)
        return all(quantified(i + 1, {**env, name: e}) for e in elems)

    return quantified(0, {})


def find_model(
    formulas: Sequence[Formula], max_domain: int = 64
) -> Optional[FiniteModel]:
    """Smallest-domain model by brute enumeration, or None within the bound.

    Domains are enumerated as sets of pairwise-distinct predicate profiles;
    with no equality in the language a duplicated profile never changes
    truth, so this is exhaustive up to the 2^k bound.
    """
    preds, consts = _collect_symbols(formulas)
    _require_monadic(preds)
    plist = sorted(preds)
    n_types = 1 << len(plist)
    bound = min(max_domain, n_types) if plist else 1
    for n in range(1, bound + 1):
        for profile in itertools.combinations(range(n_types), n):
            predicates = {
                p: {e for e, t in enumerate(profile) if t & (1 << i)}
                for i, p in enumerate(plist)
            }
            for assignment in itertools.product(range(n), repeat=len(consts)):
                model = FiniteModel(n, predicates, dict(zip(consts, assignment)))
                if all(evaluate(f, model) for f in formulas):
                    return model
    return None
