"""Mutation-based generation of reasoning problems whose predicted
conclusion is a categorical logical fallacy.

Problems are built by drawing views from the original seed bank (modus
ponens, modus tollens, quantified modus ponens, disjunction fallacy),
mutating them, and appending premises until the problem is the right size
(4..11 atoms), the predicted conclusion is a single categorical
alternative, and that conclusion is not a classical consequence of the
premises.  Generation is deterministic given the rng seed.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

from . import oracle
from .engine import factor, what_follows
from .views import (
    Constant,
    EXISTS,
    FORALL,
    Literal,
    State,
    Variable,
    View,
    alpha_equal,
    atom_count,
    fresh_name,
    parse_view,
    print_view,
)

MUTATION_KINDS = (
    "predicate-addition",
    "constant-addition",
    "variable-addition",
    "constant-to-variable-substitution",
    "conjunctive-atom-insertion",
    "disjunctive-state-addition",
    "atom-negation",
)


class GenerationError(Exception):
    pass


class InapplicableRule(GenerationError):
    """The chosen mutation cannot apply to this view."""


class ExhaustedAttempts(GenerationError):
    pass


@dataclass(frozen=True)
class SeedTemplate:
    name: str
    premises: tuple
    conclusion: View


def seed_bank() -> tuple:
    """The four original template problems.  Template variables written
    without a prefix are read as instance constants (x())."""
    mk = parse_view
    return (
        SeedTemplate(
            "modus-ponens",
            (mk("{R(x())}^{Q(x())}"), mk("{Q(x())}")),
            mk("{R(x())}"),
        ),
        SeedTemplate(
            "modus-tollens",
            (mk("{R(x())}^{Q(x())}"), mk("{~R(x())}")),
            mk("{~Q(x())}"),
        ),
        SeedTemplate(
            "quantified-modus-ponens",
            (mk("A x {R(x)}^{Q(x)}"), mk("A x {Q(x)}^{P(x)}")),
            mk("A x {R(x)}^{P(x)}"),
        ),
        SeedTemplate(
            "disjunction-fallacy",
            (mk("{Q(x())R(x()),S(x())T(x())}"), mk("{Q(x())}")),
            mk("{R(x())}"),
        ),
    )


@dataclass
class GenConfig:
    max_premises: int = 5
    min_mutations: int = 1
    max_mutations: int = 3
    predicate_pool: int = 6
    constant_pool: int = 6
    max_attempts: int = 200
    backtrack_limit: int = 8
    min_atoms: int = 4
    max_atoms: int = 11
    oracle_bound: int = 64

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value <= 0:
                raise ValueError(f"GenConfig.{name} must be positive")

    def predicates(self):
        return ["P", "Q", "R", "S", "T", "U", "V", "W"][: self.predicate_pool]

    def constants(self):
        return [f"c{i}" for i in range(1, self.constant_pool + 1)]


@dataclass
class Problem:
    id: str
    premises: list  # of View
    predicted: View
    lineage: list  # of str, seed names and mutation kinds applied
    rng_seed: int
    oracle_bound_used: int
    entailed: bool = False
    reversed_of: Optional[str] = None

    def atom_budget(self):
        return sum(atom_count(p) for p in self.premises)


def problem_id(premises: Sequence[View]) -> str:
    digest = hashlib.sha256("|".join(print_view(p) for p in premises).encode())
    return digest.hexdigest()[:16]


# ---------------------------------------------------------------------------
# Mutations


def _all_states(v: View):
    return list(v.stage)


def _replace_stage(v: View, stage, extra_prefix=()):
    prefix = v.prefix + tuple(extra_prefix)
    used = set()
    for s in tuple(stage) + v.supposition:
        used |= s.variables()
    prefix = tuple((var, q) for var, q in prefix if var in used)
    return View(prefix, tuple(stage), v.supposition)


def _random_term(v: View, cfg: GenConfig, rng: random.Random):
    terms = sorted(
        {t for s in v.stage + v.supposition for l in s for t in l.args},
        key=str,
    )
    if terms:
        return rng.choice(terms)
    return Constant(rng.choice(cfg.constants()))


def _fresh_predicate(v: View, cfg: GenConfig, rng: random.Random):
    used = set(v.predicates())
    free = [p for p in cfg.predicates() if p not in used]
    if not free:
        raise InapplicableRule("predicate pool exhausted")
    return rng.choice(free)


def _fresh_constant(v: View, cfg: GenConfig, rng: random.Random):
    used = {c.name for c in v.constants()}
    free = [c for c in cfg.constants() if c not in used]
    if not free:
        raise InapplicableRule("constant pool exhausted")
    return rng.choice(free)


def mutate(v: View, kind: str, cfg: GenConfig, rng: random.Random) -> View:
    """Apply exactly one structural edit of the given kind."""
    if kind not in MUTATION_KINDS:
        raise ValueError(f"unknown mutation kind {kind!r}")
    states = _all_states(v)

    if kind == "atom-negation":
        if not states or not any(len(s) for s in states):
            raise InapplicableRule("no literal to negate")
        idx = rng.randrange(len(states))
        lits = list(states[idx])
        if not lits:
            raise InapplicableRule("empty state")
        j = rng.randrange(len(lits))
        lits[j] = lits[j].negated()
        states[idx] = State(lits)
        return _replace_stage(v, states)

    if kind == "predicate-addition":
        pred = _fresh_predicate(v, cfg, rng)
        term = _random_term(v, cfg, rng)
        if not states:
            raise InapplicableRule("absurd view")
        idx = rng.randrange(len(states))
        states[idx] = State(list(states[idx]) + [Literal(pred, (term,))])
        return _replace_stage(v, states)

    if kind == "constant-addition":
        name = _fresh_constant(v, cfg, rng)
        preds = sorted(v.predicates()) or [rng.choice(cfg.predicates())]
        if not states:
            raise InapplicableRule("absurd view")
        idx = rng.randrange(len(states))
        lit = Literal(rng.choice(preds), (Constant(name),))
        states[idx] = State(list(states[idx]) + [lit])
        return _replace_stage(v, states)

    if kind == "variable-addition":
        if not states:
            raise InapplicableRule("absurd view")
        taken = {var.name for var, _ in v.prefix}
        var = Variable(fresh_name("x1", taken))
        preds = sorted(v.predicates()) or [rng.choice(cfg.predicates())]
        quant = rng.choice((EXISTS, FORALL))
        idx = rng.randrange(len(states))
        lit = Literal(rng.choice(preds), (var,))
        states[idx] = State(list(states[idx]) + [lit])
        return _replace_stage(v, states, extra_prefix=((var, quant),))

    if kind == "constant-to-variable-substitution":
        consts = sorted(v.constants(), key=str)
        if not consts:
            raise InapplicableRule("no constant to replace")
        const = rng.choice(consts)
        taken = {var.name for var, _ in v.prefix}
        var = Variable(fresh_name("x1", taken))
        quant = rng.choice((EXISTS, FORALL))

        def swap(state):
            return State(
                l.with_args(tuple(var if t == const else t for t in l.args))
                for l in state
            )

        stage = tuple(swap(s) for s in v.stage)
        supposition = tuple(swap(s) for s in v.supposition)
        return View(v.prefix + ((var, quant),), stage, supposition)

    if kind == "conjunctive-atom-insertion":
        if not states:
            raise InapplicableRule("absurd view")
        preds = sorted(v.predicates())
        if not preds:
            raise InapplicableRule("no predicate in view")
        idx = rng.randrange(len(states))
        lit = Literal(rng.choice(preds), (_random_term(v, cfg, rng),))
        if lit.identity() in {l.identity() for l in states[idx]}:
            raise InapplicableRule("atom already present")
        states[idx] = State(list(states[idx]) + [lit])
        return _replace_stage(v, states)

    if kind == "disjunctive-state-addition":
        preds = sorted(v.predicates()) or [rng.choice(cfg.predicates())]
        lit = Literal(rng.choice(preds), (_random_term(v, cfg, rng),))
        if rng.random() < 0.5:
            lit = lit.negated()
        new_state = State([lit])
        if new_state in states:
            raise InapplicableRule("state already present")
        return _replace_stage(v, states + [new_state])

    raise AssertionError(kind)


def _remap_symbols(v: View, cfg: GenConfig, rng: random.Random) -> View:
    """Rename a seed view's predicates and constants into the shared pools
    so that independently drawn premises can interact."""
    preds = sorted(v.predicates())
    consts = sorted({c.name for c in v.constants()})
    pred_pool = cfg.predicates()
    const_pool = cfg.constants()
    pred_map = dict(zip(preds, rng.sample(pred_pool, min(len(preds), len(pred_pool)))))
    const_map = dict(
        zip(consts, rng.sample(const_pool, min(len(consts), len(const_pool))))
    )

    def rename(state):
        out = []
        for l in state:
            args = tuple(
                Constant(const_map.get(t.name, t.name)) if isinstance(t, Constant) else t
                for t in l.args
            )
            out.append(Literal(pred_map.get(l.pred, l.pred), args, l.positive, l.issues))
        return State(out)

    return View(
        v.prefix,
        tuple(rename(s) for s in v.stage),
        tuple(rename(s) for s in v.supposition),
    )


# ---------------------------------------------------------------------------
# Generation loop


def _predicted(premises: Sequence[View]) -> View:
    return factor(what_follows(list(premises)))


def _nontrivial(predicted: View, premises: Sequence[View]) -> bool:
    """Predicted answer is informative: non-empty, not verum, not an echo of
    a single-alternative premise."""
    if predicted.is_absurd() or predicted.is_verum():
        return False
    single_state_literals = set()
    for p in premises:
        if len(p.stage) == 1 and p.has_verum_supposition():
            single_state_literals |= {l.identity() for l in p.stage[0]}
    for s in predicted.stage:
        if any(l.identity() not in single_state_literals for l in s):
            return True
    return False


def _is_categorical(v: View) -> bool:
    return len(v.stage) == 1 and v.has_verum_supposition()


def _is_fallacy(premises: Sequence[View], predicted: View, bound: int) -> bool:
    formulas = [oracle.to_classical(p) for p in premises]
    try:
        return not oracle.entails(formulas, oracle.to_classical(predicted), bound)
    except oracle.BoundExceededError:
        # Too complex to certify cheaply; reject the candidate instead.
        return False


def _draw_mutated_view(cfg: GenConfig, rng: random.Random, lineage: list) -> View:
    bank = seed_bank()
    template = rng.choice(bank)
    view = rng.choice(template.premises)
    view = _remap_symbols(view, cfg, rng)
    applied = []
    n_mut = rng.randint(cfg.min_mutations, cfg.max_mutations)
    guard = 0
    while len(applied) < n_mut and guard < 20:
        guard += 1
        kind = rng.choice(MUTATION_KINDS)
        try:
            view = mutate(view, kind, cfg, rng)
        except InapplicableRule:
            continue
        applied.append(kind)
    lineage.append(f"seed:{template.name}")
    lineage.extend(f"mut:{k}" for k in applied)
    return view


def generate_problem(cfg: GenConfig, rng_seed: int) -> Problem:
    """Generate one problem meeting all three stopping conditions.

    Deterministic given (cfg, rng_seed)."""
    rng = random.Random(rng_seed)
    for _ in range(cfg.max_attempts):
        premises: list = []
        lineage: list = []
        backtracks = 0
        steps = 0
        while steps < 60:
            steps += 1
            view = _draw_mutated_view(cfg, rng, lineage)
            candidate = premises + [view]
            if sum(atom_count(p) for p in candidate) > cfg.max_atoms:
                lineage = lineage[: len(lineage)]  # keep trace of the try
                if premises and backtracks < cfg.backtrack_limit:
                    premises.pop()
                    backtracks += 1
                    continue
                break  # restart from scratch
            try:
                predicted = _predicted(candidate)
            except Exception:
                continue
            if not _nontrivial(predicted, candidate):
                continue
            premises = candidate
            if len(premises) > cfg.max_premises:
                break
            total = sum(atom_count(p) for p in premises)
            if (
                cfg.min_atoms <= total <= cfg.max_atoms
                and _is_categorical(predicted)
                and _is_fallacy(premises, predicted, cfg.oracle_bound)
            ):
                return Problem(
                    id=problem_id(premises),
                    premises=list(premises),
                    predicted=predicted,
                    lineage=lineage,
                    rng_seed=rng_seed,
                    oracle_bound_used=cfg.oracle_bound,
                )
    raise ExhaustedAttempts(f"no problem found after {cfg.max_attempts} attempts")


def generate_problems(cfg: GenConfig, rng_seed: int, count: int) -> list:
    """Generate `count` distinct problems from one master seed."""
    master = random.Random(rng_seed)
    problems = []
    seen = set()
    while len(problems) < count:
        sub_seed = master.getrandbits(64)
        try:
            p = generate_problem(cfg, sub_seed)
        except ExhaustedAttempts:
            continue
        if p.id in seen:
            continue
        seen.add(p.id)
        problems.append(p)
    return problems


def reverse_premises(p: Problem) -> Problem:
    """The premise-reversal twin; its prediction is recomputed."""
    premises = list(reversed(p.premises))
    predicted = _predicted(premises)
    return Problem(
        id=problem_id(premises),
        premises=premises,
        predicted=predicted,
        lineage=list(p.lineage) + ["reversed"],
        rng_seed=p.rng_seed,
        oracle_bound_used=p.oracle_bound_used,
        reversed_of=p.id,
    )


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    def ok(self):
        return not self.violations


def validate_problem(p: Problem, cfg: Optional[GenConfig] = None) -> ValidationReport:
    """Re-check the three stopping conditions and the fallacy certificate."""
    cfg = cfg or GenConfig()
    report = ValidationReport()
    total = p.atom_budget()
    if not (cfg.min_atoms <= total <= cfg.max_atoms):
        report.violations.append(
            f"size: {total} atoms outside [{cfg.min_atoms}, {cfg.max_atoms}]"
        )
    recomputed = _predicted(p.premises)
    if not alpha_equal(recomputed, p.predicted):
        report.violations.append("prediction: stored conclusion does not replay")
    if not _is_categorical(p.predicted):
        report.violations.append("categorical: conclusion is not a single bare alternative")
    try:
        if not _is_fallacy(p.premises, p.predicted, p.oracle_bound_used):
            report.violations.append("fallacy: conclusion is classically entailed")
    except oracle.OracleError as exc:
        report.violations.append(f"oracle: {exc}")
    for prem in p.premises:
        if any(a != 1 for a in prem.predicates().values()):
            report.violations.append("monadic: premise uses a polyadic predicate")
            break
    return report


# ---------------------------------------------------------------------------
# Problem file round-trip (one JSON record per line)


def problem_to_record(p: Problem) -> dict:
    record = {
        "id": p.id,
        "premises": [print_view(v) for v in p.premises],
        "predicted": print_view(p.predicted),
        "lineage": p.lineage,
        "rng_seed": p.rng_seed,
        "oracle_bound_used": p.oracle_bound_used,
    }
    if p.reversed_of:
        record["reversed_of"] = p.reversed_of
    return record


def problem_from_record(record: dict) -> Problem:
    return Problem(
        id=record["id"],
        premises=[parse_view(s) for s in record["premises"]],
        predicted=parse_view(record["predicted"]),
        lineage=list(record.get("lineage", [])),
        rng_seed=record.get("rng_seed", 0),
        oracle_bound_used=record.get("oracle_bound_used", 64),
        reversed_of=record.get("reversed_of"),
    )


def save_problems(problems: Sequence[Problem], path):
    with open(path, "w") as fh:
        for p in problems:
            fh.write(json.dumps(problem_to_record(p)) + "\n")


def load_problems(path) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(problem_from_record(json.loads(line)))
    return out
