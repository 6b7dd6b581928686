"""Shared strategies and helpers for the test suite."""

import random

from hypothesis import strategies as st

from erotetic import oracle
from erotetic.views import (
    Constant,
    EXISTS,
    FORALL,
    Literal,
    State,
    Variable,
    View,
)

PREDS = ["P", "Q", "R"]
CONSTS = ["a", "b"]
VARS = ["x", "y"]


def random_formula(rng: random.Random, max_preds=3, max_consts=2, max_vars=2):
    """A random prenex monadic formula as an oracle Formula."""
    preds = PREDS[: rng.randint(1, max_preds)]
    n_vars = rng.randint(0, max_vars)
    vars_ = VARS[:n_vars]
    prefix = tuple(
        (v, rng.choice((EXISTS, FORALL))) for v in vars_
    )
    terms = [("const", c) for c in CONSTS[: rng.randint(1, max_consts)]] + [
        ("var", v) for v in vars_
    ]

    def atom():
        return oracle.Atom(rng.choice(preds), (rng.choice(terms),))

    def node(depth):
        if depth == 0 or rng.random() < 0.3:
            a = atom()
            return oracle.Not(a) if rng.random() < 0.4 else a
        op = rng.choice(("and", "or", "not", "implies"))
        if op == "not":
            return oracle.Not(node(depth - 1))
        if op == "implies":
            return oracle.Implies(node(depth - 1), node(depth - 1))
        return (op, tuple(node(depth - 1) for _ in range(rng.randint(2, 3))))

    return oracle.Formula(prefix, node(rng.randint(1, 3)))


@st.composite
def views(draw, max_states=3, max_literals=3, quantified=True):
    """Small random views with optional prefixes and issue flags."""
    n_vars = draw(st.integers(0, 2)) if quantified else 0
    vars_ = [Variable(n) for n in VARS[:n_vars]]
    prefix = tuple(
        (v, draw(st.sampled_from((EXISTS, FORALL)))) for v in vars_
    )
    terms = [Constant(c) for c in CONSTS] + vars_

    def lit():
        return Literal(
            draw(st.sampled_from(PREDS)),
            (draw(st.sampled_from(terms)),),
            positive=draw(st.booleans()),
            issues=(True,) if draw(st.booleans()) else (),
        )

    n_states = draw(st.integers(1, max_states))
    stage = []
    for _ in range(n_states):
        stage.append(State(lit() for _ in range(draw(st.integers(1, max_literals)))))
    # drop prefix vars that ended up unused
    used = set()
    for s in stage:
        used |= s.variables()
    prefix = tuple((v, q) for v, q in prefix if v in used)
    return View(prefix, tuple(dict.fromkeys(stage)))
