"""Acceptance gate: nine criteria, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v` (add `-s` to see the
status lines inline).  Each test prints exactly one line of the form
`ACCEPTANCE <n> <name>: PASS|FAIL (<elapsed>)` before asserting.
"""

import random
import time

import pytest

from erotetic import conformance, oracle, stats
from erotetic.generator import GenConfig, Problem, generate_problems, validate_problem
from erotetic.harness import HarnessConfig, ModelSpec, RunStore, analysis_records, run_suite
from erotetic.render import ThemeMapping, load_themes, render_alternatives, render_prompt
from erotetic.stubserver import StubServer, scripted_answers
from erotetic.views import parse_view

from conftest import random_formula


@pytest.fixture
def report(capsys):
    """Emit one status line per criterion, bypassing output capture."""

    def emit(number, name, passed, elapsed):
        with capsys.disabled():
            print(
                f"ACCEPTANCE {number} {name}: "
                f"{'PASS' if passed else 'FAIL'} ({elapsed:.3f}s)"
            )

    return emit


def test_1_engine_conformance(report):
    start = time.perf_counter()
    results = conformance.card_transcript()
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in results) and elapsed < 0.010
    report(1, "engine-conformance", ok, elapsed)
    assert ok, [(r.name, r.detail) for r in results] + [f"{elapsed * 1000:.2f} ms"]


def test_2_prediction_vectors(report):
    start = time.perf_counter()
    results = conformance.prediction_vectors()
    ext, trace = conformance.extended_vector()
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in results)
    status = "PASS" if ext.passed else "DEVIATES"
    report(2, f"prediction-vectors (extended vector: {status})", ok, elapsed)
    if not ext.passed:
        assert ext.detail  # deviation must be documented
        assert trace  # with a replayable inference trace
    assert ok, [(r.name, r.detail) for r in results]


def test_3_oracle_dual_route_1000(report):
    start = time.perf_counter()
    rng = random.Random(20240)
    checked = disagreements = 0
    while checked < 1000:
        fs = [random_formula(rng) for _ in range(rng.randint(1, 3))]
        try:
            fast = oracle.satisfiable(fs)
        except oracle.OracleError:
            continue
        slow = oracle.find_model(fs) is not None
        checked += 1
        if fast != slow:
            disagreements += 1
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and elapsed < 60.0
    report(3, f"oracle-dual-route ({checked} instances)", ok, elapsed)
    assert ok, f"{disagreements} disagreements in {elapsed:.1f}s"


def test_4_inference_pattern_labels(report):
    start = time.perf_counter()
    results = conformance.seed_label_vectors()
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in results)
    report(4, "inference-pattern-labels", ok, elapsed)
    assert ok, [(r.name, r.detail) for r in results]


def test_5_generator_integrity_400(report):
    start = time.perf_counter()
    cfg = GenConfig()
    problems = generate_problems(cfg, 2024, 400)
    violations = [
        (p.id, rep.violations)
        for p in problems
        if not (rep := validate_problem(p, cfg)).ok()
    ]
    elapsed = time.perf_counter() - start
    ok = len(problems) == 400 and not violations and elapsed < 300.0
    report(5, "generator-integrity (400 problems)", ok, elapsed)
    assert ok, violations[:5] or f"{len(problems)} problems in {elapsed:.1f}s"


PLANETS_PROMPT = (
    "I'm an astronomer studying newly discovered celestial bodies. "
    "I've made some observations and I need to use logical reasoning to "
    "figure out what's going on. Here's what I know so far:\n"
    "- Either moon 2 is not visible to the naked eye, "
    "or moon 2 is visible to the naked eye.\n"
    "- Either asteroid B is visible to the naked eye, "
    "or moon 2 is visible to the naked eye.\n"
    "\n"
    "For the purpose of this question, I want you to write what follows "
    "in English. Please be succinct, precise and clear in your answer. "
    'Write a logical statement of the form "Answer: From the premises, '
    'we can conclude that ..." and then clearly write your conclusion. '
    "Please be succinct, precise, and clear.\n"
    "\n"
    "What if anything follows? I do not have an intended answer in mind, "
    "and it is possible that nothing follows. Please be succinct and precise.\n"
    "\n"
    "I want you to answer immediately. Read the question and provide your "
    "answer in the format given.\n"
    "\n"
    "What follows? Answer in the format that I showed you. "
    'Write "Answer: {logical statement}".'
)

ALCHEMY_BULLET = (
    "Cosmic dust is transmuting and vital mercury is time-bending, "
    "or cosmic dust is immortality-granting and vital mercury is spirit-affecting."
)


def test_6_renderer_snapshots(report):
    start = time.perf_counter()
    themes = load_themes()
    planets = next(t for t in themes if t.name == "Planets")
    problem = Problem(
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
    mapping = ThemeMapping(
        planets,
        {"vis": "visible to the naked eye"},
        {"moon2": "moon 2", "asteroidB": "asteroid B"},
    )
    prompt = render_prompt(problem, mapping)

    alchemy = next(t for t in themes if t.name == "Alchemical substances")
    bullet = render_alternatives(
        parse_view("{Q(x())R(y()),S(x())T(y())}"),
        ThemeMapping(
            alchemy,
            {
                "Q": "transmuting",
                "R": "time-bending",
                "S": "immortality-granting",
                "T": "spirit-affecting",
            },
            {"x": "cosmic dust", "y": "vital mercury"},
        ),
    )
    elapsed = time.perf_counter() - start
    ok = prompt == PLANETS_PROMPT and bullet == ALCHEMY_BULLET
    report(6, "renderer-snapshots", ok, elapsed)
    assert prompt == PLANETS_PROMPT
    assert bullet == ALCHEMY_BULLET


def test_7_statistics_oracles(report):
    start = time.perf_counter()
    z, _ = stats.two_proportion_z(30, 100, 15, 100)
    z_ok = abs(z - 2.540) <= 1e-3
    r, _ = stats.pearson([1, 2, 3], [1, 2, 4])
    r_ok = abs(r - 0.98198) <= 1e-5
    rng = random.Random(7)
    spearman_ok = True
    for _ in range(100):
        n = rng.randint(4, 25)
        xs = [rng.uniform(-5, 5) for _ in range(n)]
        ys = [rng.uniform(-5, 5) for _ in range(n)]
        for i in range(0, n - 1, 3):  # inject ties in both vectors
            xs[i + 1] = xs[i]
            ys[i + 1] = ys[i]
        rho, _ = stats.spearman(xs, ys)
        oracle_rho, _ = stats.pearson(stats.average_ranks(xs), stats.average_ranks(ys))
        if abs(rho - oracle_rho) > 1e-12:
            spearman_ok = False
    elapsed = time.perf_counter() - start
    ok = z_ok and r_ok and spearman_ok
    report(7, "statistics-oracles", ok, elapsed)
    assert z_ok, z
    assert r_ok, r
    assert spearman_ok


def test_8_end_to_end_stub_383(report, tmp_path):
    start = time.perf_counter()
    problems = generate_problems(GenConfig(), 383, 383)
    assert len(problems) == 383
    with StubServer(scripted_answers(problems)) as stub:
        cfg = HarnessConfig(base_url=stub.base_url)
        store = RunStore(tmp_path / "acceptance.jsonl")
        run_suite(
            [ModelSpec(provider="stub", model="stub-model", backoff=0.01)],
            problems,
            cfg,
            store,
        )
    records = analysis_records(store)
    rate = stats.fallacy_rate(records)
    (row,) = stats.reversal_effect(records)
    elapsed = time.perf_counter() - start
    ok = (
        len(records) == 383 * 2
        and rate == 1.0
        and row.n_pairs == 383
        and row.blocked_fraction == 1.0
        and row.p < 0.05
        and elapsed < 120.0
    )
    report(8, "end-to-end-stub (n=383)", ok, elapsed)
    assert ok, {
        "records": len(records),
        "fallacy_rate": rate,
        "blocked": row.blocked_fraction,
        "p": row.p,
        "elapsed": elapsed,
    }


# Published per-model "fallacy blocked by reversal" percentages, re-entered
# as a capability-table fixture for the determinism property.
CAPABILITY_FIXTURE = {
    "arena_rating": {
        "model-a": 1287.0,
        "model-b": 1248.0,
        "model-c": 1206.0,
        "model-d": 1179.0,
        "model-e": 1143.0,
    }
}

MODEL_STATS_FIXTURE = [
    stats.ModelStats("model-a", 200, 80, 64),
    stats.ModelStats("model-b", 200, 90, 63),
    stats.ModelStats("model-c", 200, 110, 66),
    stats.ModelStats("model-d", 200, 120, 54),
    stats.ModelStats("model-e", 200, 140, 49),
]


def test_9_analytics_determinism(report):
    start = time.perf_counter()
    first = stats.correlate_capability(MODEL_STATS_FIXTURE, CAPABILITY_FIXTURE)
    identical = all(
        stats.correlate_capability(MODEL_STATS_FIXTURE, CAPABILITY_FIXTURE) == first
        for _ in range(10)
    )
    sane = (
        first["arena_rating"]["n"] == 5
        and -1.0 <= first["arena_rating"]["spearman_rho"] <= 1.0
    )
    elapsed = time.perf_counter() - start
    ok = identical and sane
    report(9, "analytics-determinism (10 runs)", ok, elapsed)
    assert ok, first
