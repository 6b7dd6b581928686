"""Parsing of model answers back into views, and verdict computation.

The constrained answer grammar is the inverse of the renderer's sentence
templates: "Answer: From the premises, we can conclude that <clauses>"
where clauses are "<entity> is [not] <attribute>" joined by "and"/"or",
optionally under "there is some X such that" / "for every X," prefixes and
an "if ..., then ..." conditional.  Freeform answers are first rewritten
into this grammar by an external translation endpoint that never sees the
premises.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

from . import oracle
from .engine import does_it_follow
from .generator import Problem
from .render import ThemeMapping, VARIABLE_DISPLAY, RenderError
from .views import (
    Constant,
    EXISTS,
    FORALL,
    Literal,
    State,
    Variable,
    View,
    alpha_equal,
    verum,
)

MODES = ("endorsement", "exact", "up-to-equivalence")

# Shipped as data and recorded in run stores so translator drift is visible.
TRANSLATOR_PROMPT_VERSION = "v1"
TRANSLATOR_PROMPT = (
    "You rewrite answers to logic questions into a fixed format. The answer "
    "you receive concludes something about named entities and their "
    "attributes, or concludes that nothing follows. Rewrite the final "
    'conclusion as a single sentence of the form "Answer: From the premises, '
    'we can conclude that <conclusion>." where <conclusion> only uses '
    'phrases of the form "<entity> is <attribute>" or "<entity> is not '
    '<attribute>", combined with "and" and "or". If the answer concludes '
    'that nothing follows or that no conclusion can be drawn, reply exactly '
    '"Answer: From the premises, we cannot conclude anything." Reply with '
    "that single sentence and nothing else.\n\nAnswer to rewrite:\n"
)

_ANSWER_RE = re.compile(r"answer\s*:\s*", re.IGNORECASE)
_PREAMBLE_RE = re.compile(
    r"^from the premises,?\s*(we|one|you)?\s*can\s*conclude\s*(that)?\s*",
    re.IGNORECASE,
)
_NOTHING_RE = re.compile(
    r"(nothing\s+(necessarily\s+)?follows"
    r"|cannot\s+(definitively\s+|necessarily\s+)?(conclude|determine|infer)"
    r"|can(not|'t)\s+conclude\s+anything"
    r"|no\s+(definitive\s+)?conclusion)",
    re.IGNORECASE,
)


@dataclass
class ParsedAnswer:
    status: str  # "parsed" | "nothing-follows" | "parse-error"
    conclusion: Optional[View]
    raw: str

    def __post_init__(self):
        if (self.status == "parsed") != (self.conclusion is not None):
            raise ValueError("conclusion present iff status == parsed")


@dataclass
class Verdict:
    logically_correct: bool
    etr_predicted: bool
    human_like_fallacy: bool
    mode: str

    def __post_init__(self):
        assert self.human_like_fallacy == (
            self.etr_predicted and not self.logically_correct
        )


class _ParseFail(Exception):
    pass


def _inverse_maps(m: ThemeMapping):
    attr_to_pred = {v: k for k, v in m.predicate_map.items()}
    entity_to_const = {v.lower(): k for k, v in m.term_map.items()}
    return attr_to_pred, entity_to_const


def _split_on(text: str, pattern: str):
    return [part.strip() for part in re.split(pattern, text, flags=re.IGNORECASE) if part.strip()]


def _parse_literal(chunk: str, m: ThemeMapping, variables: dict) -> Literal:
    attr_to_pred, entity_to_const = _inverse_maps(m)
    match = re.match(r"^(.*?)\s+is\s+(not\s+)?(.+?)[.]?$", chunk, re.IGNORECASE)
    if not match:
        raise _ParseFail(f"not a copula clause: {chunk!r}")
    subject, negation, attr = match.group(1).strip(), match.group(2), match.group(3).strip()
    attr = attr.rstrip(".").strip()
    if attr not in attr_to_pred:
        raise _ParseFail(f"unknown attribute {attr!r}")
    pred = attr_to_pred[attr]
    if subject.upper() in variables:
        term = variables[subject.upper()]
    else:
        const = entity_to_const.get(subject.lower())
        if const is None:
            raise _ParseFail(f"unknown entity {subject!r}")
        term = Constant(const)
    return Literal(pred, (term,), positive=negation is None)


def _parse_states(text: str, m: ThemeMapping, variables: dict):
    text = text.strip().rstrip(".")
    if text.lower().startswith("either "):
        text = text[len("either ") :]
    states = []
    # ", or " separates the final pair; bare ", " separates earlier states
    # in serial lists of three or more.
    chunks = [c for part in _split_on(text, r",?\s+or\s+") for c in _split_on(part, r",\s+")]
    for state_text in chunks:
        lits = [
            _parse_literal(c, m, variables)
            for c in _split_on(state_text, r",?\s+and\s+")
        ]
        states.append(State(lits))
    if not states:
        raise _ParseFail("no clauses")
    return tuple(states)


def parse_answer(text: str, m: ThemeMapping) -> ParsedAnswer:
    """Parse a constrained answer; unparseable text becomes a status, not
    an exception, mirroring per-response exclusion downstream."""
    raw = text
    match = _ANSWER_RE.search(text)
    if match:
        text = text[match.end() :]
    text = text.strip().splitlines()[0] if text.strip() else ""
    body = _PREAMBLE_RE.sub("", text).strip()
    if _NOTHING_RE.search(text):
        return ParsedAnswer("nothing-follows", None, raw)
    if not body:
        return ParsedAnswer("parse-error", None, raw)

    prefix = []
    variables: dict = {}
    try:
        while True:
            ex = re.match(r"^there\s+is\s+some\s+(\w+)\s+such\s+that\s+", body, re.IGNORECASE)
            un = re.match(r"^for\s+every\s+(\w+),\s+", body, re.IGNORECASE)
            if ex:
                name = ex.group(1).upper()
                var = Variable(f"v{len(prefix) + 1}")
                variables[name] = var
                prefix.append((var, EXISTS))
                body = body[ex.end() :]
            elif un:
                name = un.group(1).upper()
                var = Variable(f"v{len(prefix) + 1}")
                variables[name] = var
                prefix.append((var, FORALL))
                body = body[un.end() :]
            else:
                break
        cond = re.match(r"^if\s+(.*?),\s*then\s+(.*)$", body, re.IGNORECASE)
        if cond:
            supposition = _parse_states(cond.group(1), m, variables)
            stage = _parse_states(cond.group(2), m, variables)
            view = View(tuple(prefix), stage, supposition)
        else:
            view = View(tuple(prefix), _parse_states(body, m, variables))
    except Exception:
        return ParsedAnswer("parse-error", None, raw)
    return ParsedAnswer("parsed", view, raw)


class TranslationClient(Protocol):
    def complete(self, prompt: str) -> str: ...


def translate_freeform(text: str, endpoint: TranslationClient) -> str:
    """Rewrite a freeform answer into the constrained grammar via the
    translation endpoint.  The original premises are never included."""
    reply = endpoint.complete(TRANSLATOR_PROMPT + text.strip())
    return (reply or "").strip()


def judge_response(
    p: Problem,
    a: ParsedAnswer,
    mode: str = "endorsement",
    max_domain: int = 64,
) -> Verdict:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if a.status == "parse-error":
        raise ValueError("cannot judge a parse-error answer")
    conclusion = verum() if a.status == "nothing-follows" else a.conclusion

    premise_formulas = [oracle.to_classical(v) for v in p.premises]
    logically_correct = oracle.entails(
        premise_formulas, oracle.to_classical(conclusion), max_domain
    )
    if a.status == "nothing-follows":
        # An abstention can only be predicted when the engine itself
        # predicts nothing; it is never counted as the predicted fallacy.
        etr_predicted = p.predicted.is_verum()
    elif mode == "endorsement":
        etr_predicted = does_it_follow(p.premises, conclusion)
    elif mode == "exact":
        etr_predicted = alpha_equal(conclusion, p.predicted)
    else:
        etr_predicted = oracle.equivalent(
            oracle.to_classical(conclusion),
            oracle.to_classical(p.predicted),
            max_domain,
        )
    return Verdict(
        logically_correct=logically_correct,
        etr_predicted=etr_predicted,
        human_like_fallacy=etr_predicted and not logically_correct,
        mode=mode,
    )
