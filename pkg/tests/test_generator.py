"""Problem generation: mutations, stopping conditions, determinism, I/O."""

import random

import pytest

from erotetic import oracle
from erotetic.generator import (
    GenConfig,
    InapplicableRule,
    MUTATION_KINDS,
    Problem,
    generate_problem,
    generate_problems,
    load_problems,
    mutate,
    problem_from_record,
    problem_to_record,
    reverse_premises,
    save_problems,
    seed_bank,
    validate_problem,
)
from erotetic.views import alpha_equal, atom_count, parse_view, print_view


class TestSeedBank:
    def test_four_templates(self):
        bank = seed_bank()
        assert len(bank) == 4
        names = {t.name for t in bank}
        assert names == {
            "modus-ponens",
            "modus-tollens",
            "quantified-modus-ponens",
            "disjunction-fallacy",
        }

    def test_three_valid_one_fallacy(self):
        valid = []
        for t in seed_bank():
            fs = [oracle.to_classical(p) for p in t.premises]
            valid.append(oracle.entails(fs, oracle.to_classical(t.conclusion)))
        assert valid.count(True) == 3
        assert not valid[3]  # the disjunction fallacy row


class TestMutations:
    def setup_method(self):
        self.cfg = GenConfig()
        self.rng = random.Random(0)

    def test_each_kind_applies_somewhere(self):
        base = parse_view("{Q(c1())R(c1()),S(c1())T(c1())}")
        for kind in MUTATION_KINDS:
            mutated = None
            for attempt in range(20):
                try:
                    mutated = mutate(base, kind, self.cfg, random.Random(attempt))
                    break
                except InapplicableRule:
                    continue
            assert mutated is not None, kind
            assert not alpha_equal(mutated, base) or kind == "atom-negation"

    def test_atom_negation_flips_one_literal(self):
        base = parse_view("{Q(c1())}")
        mutated = mutate(base, "atom-negation", self.cfg, self.rng)
        (lit,) = mutated.stage[0]
        assert not lit.positive

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            mutate(parse_view("{Q(c1())}"), "no-such-rule", self.cfg, self.rng)

    def test_constant_to_variable_adds_quantifier(self):
        base = parse_view("{Q(c1())}")
        mutated = mutate(base, "constant-to-variable-substitution", self.cfg, self.rng)
        assert len(mutated.prefix) == 1
        assert not mutated.constants()

    def test_pool_exhaustion_is_inapplicable(self):
        cfg = GenConfig(predicate_pool=1)
        base = parse_view("{P(c1())}")  # the only pool predicate is taken
        with pytest.raises(InapplicableRule):
            mutate(base, "predicate-addition", cfg, self.rng)


class TestGeneration:
    def test_stopping_conditions(self):
        cfg = GenConfig()
        for seed in range(5):
            p = generate_problem(cfg, seed)
            total = p.atom_budget()
            assert cfg.min_atoms <= total <= cfg.max_atoms
            assert len(p.premises) <= cfg.max_premises
            assert len(p.predicted.stage) == 1
            assert p.predicted.has_verum_supposition()
            assert validate_problem(p, cfg).ok()

    def test_deterministic(self):
        cfg = GenConfig()
        a = generate_problems(cfg, 42, 8)
        b = generate_problems(cfg, 42, 8)
        assert [p.id for p in a] == [p.id for p in b]
        assert [print_view(v) for p in a for v in p.premises] == [
            print_view(v) for p in b for v in p.premises
        ]

    def test_distinct_ids(self):
        ids = [p.id for p in generate_problems(GenConfig(), 1, 10)]
        assert len(set(ids)) == len(ids)

    def test_lineage_recorded(self):
        p = generate_problem(GenConfig(), 3)
        assert any(entry.startswith("seed:") for entry in p.lineage)


class TestReversal:
    def test_reverse_premises(self):
        p = generate_problem(GenConfig(), 5)
        r = reverse_premises(p)
        assert r.reversed_of == p.id
        assert [print_view(v) for v in r.premises] == [
            print_view(v) for v in reversed(p.premises)
        ]
        # prediction recomputed under the new order
        assert r.predicted is not None


class TestValidation:
    def test_detects_entailed_conclusion(self):
        p = generate_problem(GenConfig(), 0)
        bad = Problem(
            id=p.id,
            premises=p.premises,
            predicted=p.premises[0],
            lineage=p.lineage,
            rng_seed=p.rng_seed,
            oracle_bound_used=p.oracle_bound_used,
        )
        report = validate_problem(bad)
        assert not report.ok()

    def test_detects_size_violation(self):
        p = generate_problem(GenConfig(), 0)
        report = validate_problem(p, GenConfig(min_atoms=50, max_atoms=60))
        assert any("size" in v for v in report.violations)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        problems = generate_problems(GenConfig(), 9, 5)
        path = tmp_path / "problems.jsonl"
        save_problems(problems, path)
        loaded = load_problems(path)
        assert len(loaded) == len(problems)
        for a, b in zip(problems, loaded):
            assert a.id == b.id
            assert all(alpha_equal(x, y) for x, y in zip(a.premises, b.premises))
            assert alpha_equal(a.predicted, b.predicted)

    def test_record_shape(self):
        p = generate_problem(GenConfig(), 2)
        record = problem_to_record(p)
        assert set(record) >= {"id", "premises", "predicted", "lineage", "rng_seed"}
        q = problem_from_record(record)
        assert q.id == p.id
