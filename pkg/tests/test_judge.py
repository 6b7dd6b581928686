"""Answer parsing and verdicts."""

import random

import pytest

from erotetic.generator import GenConfig, Problem, generate_problems
from erotetic.judge import (
    ParsedAnswer,
    TRANSLATOR_PROMPT,
    judge_response,
    parse_answer,
    translate_freeform,
)
from erotetic.render import ThemeMapping, bind_theme, load_themes, render_view, theme_for_problem
from erotetic.views import alpha_equal, parse_view, print_view, verum


@pytest.fixture(scope="module")
def themes():
    return load_themes()


@pytest.fixture(scope="module")
def planet_mapping(themes):
    planets = next(t for t in themes if t.name == "Planets")
    return ThemeMapping(
        planets,
        {"vis": "visible to the naked eye", "rocky": "rocky"},
        {"moon2": "moon 2", "asteroidB": "asteroid B"},
    )


@pytest.fixture(scope="module")
def planet_problem():
    return Problem(
        id="0" * 16,
        premises=[
            parse_view("{~vis(moon2()),vis(moon2())}"),
            parse_view("{vis(asteroidB()),vis(moon2())}"),
        ],
        predicted=parse_view("{vis(moon2())}"),
        lineage=[],
        rng_seed=0,
        oracle_bound_used=64,
    )


class TestParseAnswer:
    def test_simple_conclusion(self, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that moon 2 is visible to the naked eye.",
            planet_mapping,
        )
        assert a.status == "parsed"
        assert alpha_equal(a.conclusion, parse_view("{vis(moon2())}"))

    def test_nothing_follows_variants(self, planet_mapping):
        for text in [
            "Answer: From the premises, we cannot definitively conclude anything.",
            "Answer: Nothing follows from these premises.",
            "Answer: From the premises, we can conclude that nothing necessarily follows.",
            "Answer: No definitive conclusion can be drawn.",
        ]:
            assert parse_answer(text, planet_mapping).status == "nothing-follows", text

    def test_unmapped_content_is_parse_error(self, planet_mapping):
        a = parse_answer("the moon is made of cheese", planet_mapping)
        assert a.status == "parse-error"
        assert a.conclusion is None

    def test_empty_is_parse_error(self, planet_mapping):
        assert parse_answer("", planet_mapping).status == "parse-error"

    def test_negation(self, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that moon 2 is not rocky.",
            planet_mapping,
        )
        assert alpha_equal(a.conclusion, parse_view("{~rocky(moon2())}"))

    def test_disjunction_and_conjunction(self, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that either moon 2 is rocky, "
            "or asteroid B is visible to the naked eye and moon 2 is not rocky.",
            planet_mapping,
        )
        assert alpha_equal(
            a.conclusion,
            parse_view("{rocky(moon2()),vis(asteroidB())~rocky(moon2())}"),
        )

    def test_existential(self, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that there is some X such that X is rocky.",
            planet_mapping,
        )
        assert alpha_equal(a.conclusion, parse_view("E x {rocky(x)}"))

    def test_case_insensitive_entities(self, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that Moon 2 is rocky.",
            planet_mapping,
        )
        assert a.status == "parsed"

    def test_status_conclusion_invariant(self):
        with pytest.raises(ValueError):
            ParsedAnswer("nothing-follows", verum(), "raw")


class TestVerdicts:
    def test_fallacy(self, planet_problem, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that moon 2 is visible to the naked eye.",
            planet_mapping,
        )
        v = judge_response(planet_problem, a)
        assert not v.logically_correct
        assert v.etr_predicted
        assert v.human_like_fallacy

    def test_nothing_follows_is_correct_never_fallacy(self, planet_problem, planet_mapping):
        a = parse_answer("Answer: nothing follows.", planet_mapping)
        v = judge_response(planet_problem, a)
        assert v.logically_correct
        assert not v.human_like_fallacy

    def test_premise_echo_is_correct(self, planet_problem, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that asteroid B is visible "
            "to the naked eye, or moon 2 is visible to the naked eye.",
            planet_mapping,
        )
        v = judge_response(planet_problem, a)
        assert v.logically_correct
        assert not v.human_like_fallacy

    def test_parse_error_rejected(self, planet_problem, planet_mapping):
        a = parse_answer("gibberish", planet_mapping)
        with pytest.raises(ValueError):
            judge_response(planet_problem, a)

    def test_modes(self, planet_problem, planet_mapping):
        a = parse_answer(
            "Answer: From the premises, we can conclude that moon 2 is visible to the naked eye.",
            planet_mapping,
        )
        for mode in ("endorsement", "exact", "up-to-equivalence"):
            v = judge_response(planet_problem, a, mode)
            assert v.etr_predicted, mode

    def test_mode_monotonicity_exact_implies_endorsement(self, themes):
        for p in generate_problems(GenConfig(), 21, 10):
            t = theme_for_problem(p.id, themes)
            m = bind_theme(p, t, random.Random(0))
            sent = render_view(p.predicted, m)
            a = parse_answer(
                "Answer: From the premises, we can conclude that "
                + sent[0].lower()
                + sent[1:],
                m,
            )
            assert a.status == "parsed", sent
            exact = judge_response(p, a, "exact")
            endorse = judge_response(p, a, "endorsement")
            if exact.etr_predicted:
                assert endorse.etr_predicted

    def test_verdict_identity(self, themes):
        for p in generate_problems(GenConfig(), 33, 8):
            t = theme_for_problem(p.id, themes)
            m = bind_theme(p, t, random.Random(0))
            sent = render_view(p.predicted, m)
            a = parse_answer(
                "Answer: From the premises, we can conclude that "
                + sent[0].lower()
                + sent[1:],
                m,
            )
            v = judge_response(p, a)
            assert v.human_like_fallacy == (v.etr_predicted and not v.logically_correct)
            # every generated problem's prediction is a certified fallacy
            assert v.human_like_fallacy


class TestRoundTrip:
    def test_rendered_premises_parse_back(self, themes):
        for p in generate_problems(GenConfig(), 55, 12):
            t = theme_for_problem(p.id, themes)
            m = bind_theme(p, t, random.Random(2))
            for prem in p.premises:
                sent = render_view(prem, m)
                a = parse_answer(
                    "Answer: From the premises, we can conclude that " + sent, m
                )
                assert a.status == "parsed", sent
                assert alpha_equal(a.conclusion, prem), (
                    sent,
                    print_view(a.conclusion),
                    print_view(prem),
                )


class _EchoEndpoint:
    def __init__(self, reply):
        self.reply = reply
        self.requests = []

    def complete(self, prompt):
        self.requests.append(prompt)
        return self.reply


class TestTranslation:
    def test_translator_never_sees_premises(self):
        endpoint = _EchoEndpoint("Answer: From the premises, we can conclude that X.")
        translate_freeform("Well, thinking it through at length... the moon wins.", endpoint)
        (request,) = endpoint.requests
        assert request.startswith(TRANSLATOR_PROMPT)
        assert "premise list" not in request

    def test_already_constrained_passthrough(self, planet_mapping):
        constrained = "Answer: From the premises, we can conclude that moon 2 is rocky."
        endpoint = _EchoEndpoint(constrained)
        out = translate_freeform(constrained, endpoint)
        assert parse_answer(out, planet_mapping).status == "parsed"

    def test_empty_reply_parse_error(self, planet_mapping):
        endpoint = _EchoEndpoint("")
        out = translate_freeform("anything", endpoint)
        assert parse_answer(out, planet_mapping).status == "parse-error"
