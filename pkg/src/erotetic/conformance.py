"""Gold conformance vectors for the reasoning engine and oracle.

Each vector replays a fixed premise list through the default reasoning
procedure and compares against the expected conclusion.  One extended
vector is known to be procedure-sensitive; it is reported separately,
with a full inference trace, instead of failing the suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import oracle
from .engine import (
    InferenceTrace,
    does_it_follow,
    factor,
    query,
    update,
    what_follows,
    what_follows_traced,
)
from .views import alpha_equal, parse_view, print_view

# The card-drawing transcript.
CARD_P1 = "∃a ∃b ∃c ∃d ∃e ∃f {Ace(a*)Has(Mary(),a)Has(c,b)King(b*),Has(John(),d)Has(f,e)Jack(e)Queen(d)}"
CARD_P2 = "∃g {King(g*)Has(Sally(),g)}"
CARD_Q = "∃h {Ace(h*)Has(Mary(),h)}"
CARD_UPDATED = "∃g ∃l ∃m {Ace(l*)Has(Mary(),l)Has(Sally(),g)Has(m,g)King(g*)}"


@dataclass
class VectorResult:
    name: str
    passed: bool
    detail: str = ""
    extended: bool = False


def _predict(premise_strings):
    return factor(what_follows([parse_view(s) for s in premise_strings]))


def _expect_conclusion(name, premises, expected, extended=False) -> VectorResult:
    got = _predict(premises)
    want = parse_view(expected)
    ok = alpha_equal(got, want)
    detail = "" if ok else f"got {print_view(got)}, want {print_view(want)}"
    return VectorResult(name, ok, detail, extended)


def card_transcript() -> list:
    results = []
    p1, p2, q = parse_view(CARD_P1), parse_view(CARD_P2), parse_view(CARD_Q)
    v = update(p1, p2)
    ok = alpha_equal(v, parse_view(CARD_UPDATED))
    results.append(
        VectorResult(
            "card-update",
            ok,
            "" if ok else f"got {print_view(v)}",
        )
    )
    answered = query(v, q)
    ok = alpha_equal(answered, q)
    results.append(
        VectorResult("card-query", ok, "" if ok else f"got {print_view(answered)}")
    )
    ok = does_it_follow([p1, p2], q)
    results.append(VectorResult("card-does-it-follow", ok))
    return results


def prediction_vectors() -> list:
    return [
        _expect_conclusion(
            "two-premise-disjunction",
            ["{~vis(moon2()),vis(moon2())}", "{vis(asteroidB()),vis(moon2())}"],
            "{vis(moon2())}",
        ),
        _expect_conclusion(
            "order-effect-original",
            [
                "{matterMoving(realityWarping()),spaceBending(precognition())}",
                "{matterMoving(realityWarping()),~matterMoving(realityWarping())}",
            ],
            "{matterMoving(realityWarping())}",
        ),
        _expect_conclusion(
            "order-effect-reversed",
            [
                "{swarmForming(nanohive()),~swarmForming(nanohive())}",
                "{swarmForming(nanohive()),quantumComputing(chronoplast())}",
            ],
            "{swarmForming(nanohive())}",
        ),
    ]


def seed_label_vectors() -> list:
    """The seed bank's validity/endorsement labels: the three classically
    valid forms plus the invalid-but-endorsed disjunction collapse."""
    rows = [
        ("modus-ponens", ["{R(x())}^{Q(x())}", "{Q(x())}"], "{R(x())}", True),
        ("modus-tollens", ["{R(x())}^{Q(x())}", "{~R(x())}"], "{~Q(x())}", True),
        (
            "quantified-modus-ponens",
            ["A x {R(x)}^{Q(x)}", "A x {Q(x)}^{P(x)}"],
            "A x {R(x)}^{P(x)}",
            True,
        ),
        (
            "disjunction-collapse",
            ["{Q(x())R(x()),S(x())T(x())}", "{Q(x())}"],
            "{R(x())}",
            False,
        ),
    ]
    results = []
    for name, premise_strings, conclusion_string, expect_valid in rows:
        premises = [parse_view(s) for s in premise_strings]
        conclusion = parse_view(conclusion_string)
        valid = oracle.entails(
            [oracle.to_classical(p) for p in premises],
            oracle.to_classical(conclusion),
        )
        endorsed = does_it_follow(premises, conclusion)
        ok = valid == expect_valid and endorsed
        detail = "" if ok else f"valid={valid} (want {expect_valid}), endorsed={endorsed}"
        results.append(VectorResult(f"seed-{name}", ok, detail))
    return results


# Five-premise extended vector: the published conclusion pools three
# literals; our procedure is known to diverge here, so the vector reports
# its status (with a replayable trace) instead of failing the suite.
EXTENDED_PREMISES = [
    "{~radioactive(darkonium()),radioactive(darkonium())}",
    "{electricallyInsulating(voidite()),~radioactive(darkonium())~selfRepairing(voidite())}",
    "E x {selfRepairing(x)}",
    "{selfRepairing(voidite())~radioactive(voidite())}",
    "{~electricallyInsulating(voidite()),corrosive(voidite())electricallyInsulating(voidite())}",
]
EXTENDED_EXPECTED = (
    "{~radioactive(darkonium())electricallyInsulating(voidite())corrosive(voidite())}"
)


def extended_vector() -> tuple:
    """Returns (VectorResult, trace text)."""
    premises = [parse_view(s) for s in EXTENDED_PREMISES]
    conclusion, trace = what_follows_traced(premises)
    conclusion = factor(conclusion, trace)
    want = parse_view(EXTENDED_EXPECTED)
    ok = alpha_equal(conclusion, want)
    detail = "" if ok else f"got {print_view(conclusion)}, want {print_view(want)}"
    return VectorResult("five-premise-extended", ok, detail, extended=True), trace.describe()


def run_all() -> tuple:
    """All gold vectors; returns (core results, extended result, trace)."""
    core = card_transcript() + prediction_vectors() + seed_label_vectors()
    ext, trace = extended_vector()
    return core, ext, trace
