"""Deterministic natural-language rendering of problems under the 12
thematic framings.

Themes ship as plain-text data files (see data/themes/): a `name:` line, a
`preamble:` line, then `[objects]` and `[predicates]` sections with one
phrase per line.  New themes can be added without code changes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .generator import Problem
from .views import Constant, EXISTS, FORALL, Variable, View

# Single source of truth for the instruction block appended to every prompt.
CLOSING_BLOCK = (
    "For the purpose of this question, I want you to write what follows in "
    "English. Please be succinct, precise and clear in your answer. Write a "
    'logical statement of the form "Answer: From the premises, we can '
    'conclude that ..." and then clearly write your conclusion. Please be '
    "succinct, precise, and clear.\n"
    "\n"
    "What if anything follows? I do not have an intended answer in mind, and "
    "it is possible that nothing follows. Please be succinct and precise.\n"
    "\n"
    "I want you to answer immediately. Read the question and provide your "
    "answer in the format given.\n"
    "\n"
    "What follows? Answer in the format that I showed you. Write "
    '"Answer: {logical statement}".'
)

VARIABLE_DISPLAY = ("X", "Y", "Z", "W", "V", "U")


class RenderError(Exception):
    pass


class CapacityError(RenderError):
    """A theme's pools are too small for the problem's symbols."""


class UnmappedSymbolError(RenderError):
    pass


@dataclass(frozen=True)
class Theme:
    name: str
    preamble: str
    entities: tuple
    attributes: tuple


@dataclass
class ThemeMapping:
    theme: Theme
    predicate_map: dict  # predicate name -> attribute phrase
    term_map: dict  # constant name -> entity phrase
    rng_seed: Optional[int] = None

    def __post_init__(self):
        if len(set(self.predicate_map.values())) != len(self.predicate_map):
            raise RenderError("predicate map is not injective")
        if len(set(self.term_map.values())) != len(self.term_map):
            raise RenderError("term map is not injective")


# ---------------------------------------------------------------------------
# Theme loading


def _parse_theme_text(text: str, source: str) -> Theme:
    name = preamble = None
    entities, attributes = [], []
    section = None
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line:
            continue
        if line.startswith("name:"):
            name = line[len("name:") :].strip()
        elif line.startswith("preamble:"):
            preamble = line[len("preamble:") :].strip()
        elif line == "[objects]":
            section = entities
        elif line == "[predicates]":
            section = attributes
        elif section is not None:
            section.append(line)
        else:
            raise RenderError(f"{source}: unexpected line {line!r}")
    if not (name and preamble and entities and attributes):
        raise RenderError(f"{source}: incomplete theme file")
    return Theme(name, preamble, tuple(entities), tuple(attributes))


def load_themes(directory=None) -> list:
    """Load all themes, in the order given by the ORDER file."""
    if directory is None:
        root = resources.files("erotetic").joinpath("data/themes")
    else:
        root = Path(directory)
    order = root.joinpath("ORDER").read_text().split()
    return [
        _parse_theme_text(root.joinpath(slug + ".theme").read_text(), slug)
        for slug in order
    ]


def theme_for_problem(problem_id: str, themes: Sequence[Theme]) -> Theme:
    """Deterministic theme assignment: round-robin over the problem id."""
    return themes[int(problem_id, 16) % len(themes)]


# ---------------------------------------------------------------------------
# Binding


def bind_theme(p: Problem, t: Theme, rng: random.Random) -> ThemeMapping:
    preds = sorted({name for v in p.premises for name in v.predicates()})
    consts = sorted({c.name for v in p.premises for c in v.constants()})
    if len(preds) > len(t.attributes):
        raise CapacityError(
            f"theme {t.name!r} has {len(t.attributes)} attributes, "
            f"problem needs {len(preds)}"
        )
    if len(consts) > len(t.entities):
        raise CapacityError(
            f"theme {t.name!r} has {len(t.entities)} entities, "
            f"problem needs {len(consts)}"
        )
    attrs = rng.sample(list(t.attributes), len(preds))
    ents = rng.sample(list(t.entities), len(consts))
    return ThemeMapping(t, dict(zip(preds, attrs)), dict(zip(consts, ents)))


# ---------------------------------------------------------------------------
# Rendering


def _display_names(v: View) -> dict:
    if len(v.prefix) > len(VARIABLE_DISPLAY):
        raise RenderError("too many quantified variables to display")
    return {var: VARIABLE_DISPLAY[i] for i, (var, _) in enumerate(v.prefix)}

def _render_term(term, m: ThemeMapping, var_names: dict) -> str:
    if isinstance(term, Variable):
        try:
            return var_names[term]
        except KeyError:
            raise UnmappedSymbolError(f"unquantified variable {term.name}")
    if isinstance(term, Constant):
        try:
            return m.term_map[term.name]
        except KeyError:
            raise UnmappedSymbolError(f"no entity for constant {term.name}")
    raise UnmappedSymbolError(str(term))


def _render_literal(lit, m: ThemeMapping, var_names: dict) -> str:
    if lit.arity != 1:
        raise RenderError(f"cannot render {lit.arity}-ary predicate {lit.pred}")
    try:
        attr = m.predicate_map[lit.pred]
    except KeyError:
        raise UnmappedSymbolError(f"no attribute for predicate {lit.pred}")
    subject = _render_term(lit.args[0], m, var_names)
    copula = "is" if lit.positive else "is not"
    return f"{subject} {copula} {attr}"


def _render_state(state, m: ThemeMapping, var_names: dict) -> str:
    if not state:
        return "nothing in particular holds"
    return " and ".join(_render_literal(l, m, var_names) for l in state)


def _render_disjunction(states, m, var_names, with_either: bool) -> str:
    parts = [_render_state(s, m, var_names) for s in states]
    if len(parts) == 1:
        return parts[0]
    body = ", or ".join(parts) if len(parts) == 2 else ", ".join(parts[:-1]) + ", or " + parts[-1]
    return ("either " + body) if with_either else body


def render_alternatives(v: View, m: ThemeMapping) -> str:
    """The view's stage as a plain disjunction sentence, no leading
    'Either' and no quantifier/supposition wrapping."""
    text = _render_disjunction(v.stage, m, _display_names(v), with_either=False)
    return _capitalize(text) + "."


def _capitalize(text: str) -> str:
    return text[:1].upper() + text[1:] if text else text


def render_view(v: View, m: ThemeMapping) -> str:
    """One premise as a full English sentence."""
    var_names = _display_names(v)
    prefix_text = ""
    for var, quant in v.prefix:
        if quant == EXISTS:
            prefix_text += f"there is some {var_names[var]} such that "
        elif quant == FORALL:
            prefix_text += f"for every {var_names[var]}, "
    if v.is_absurd():
        body = "a contradiction holds"
    elif v.has_verum_supposition():
        body = _render_disjunction(v.stage, m, var_names, with_either=True)
    else:
        antecedent = _render_disjunction(v.supposition, m, var_names, with_either=True)
        consequent = _render_disjunction(v.stage, m, var_names, with_either=True)
        body = f"if {antecedent}, then {consequent}"
    return _capitalize(prefix_text + body) + "."


def render_prompt(p: Problem, m: ThemeMapping) -> str:
    """Full question text: preamble, bulleted premises, instruction block."""
    bullets = "".join(f"- {render_view(v, m)}\n" for v in p.premises)
    return f"{m.theme.preamble}\n{bullets}\n{CLOSING_BLOCK}"
