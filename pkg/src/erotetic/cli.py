"""Command-line entry point.

Subcommands: generate | render | predict | judge | eval | analyze |
conformance.  Every subcommand is deterministic given its inputs and
seed, except eval's network exchanges (which are recorded verbatim).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import conformance, stats
from .engine import factor, what_follows_traced
from .generator import (
    GenConfig,
    generate_problems,
    load_problems,
    reverse_premises,
    save_problems,
    validate_problem,
)
from .harness import (
    HarnessConfig,
    ModelSpec,
    RunStore,
    analysis_records,
    exclusion_report,
    run_suite,
)
from .judge import parse_answer, judge_response
from .render import bind_theme, load_themes, render_prompt, theme_for_problem
from .views import parse_view, print_view

API_KEY_ENV = "EROTETIC_API_KEY"


def _cmd_generate(args) -> int:
    cfg = GenConfig(
        max_premises=args.max_premises,
        min_atoms=args.min_atoms,
        max_atoms=args.max_atoms,
    )
    problems = generate_problems(cfg, args.seed, args.n)
    bad = 0
    for p in problems:
        report = validate_problem(p, cfg)
        if not report.ok():
            bad += 1
            print(f"{p.id}: {'; '.join(report.violations)}", file=sys.stderr)
    save_problems(problems, args.out)
    print(f"wrote {len(problems)} problems to {args.out} (seed {args.seed})")
    return 1 if bad else 0


def _cmd_render(args) -> int:
    problems = load_problems(args.problems)
    themes = load_themes(args.themes)
    for p in problems:
        if args.reversed:
            p = reverse_premises(p)
        theme = theme_for_problem(p.reversed_of or p.id, themes)
        mapping = bind_theme(p, theme, random.Random(args.mapping_seed))
        print(f"=== {p.id} [{theme.name}] ===")
        print(render_prompt(p, mapping))
        print()
    return 0


def _cmd_predict(args) -> int:
    premises = [parse_view(s) for s in args.premise]
    conclusion, trace = what_follows_traced(premises)
    conclusion = factor(conclusion, trace)
    print(trace.describe())
    print(f"conclusion: {print_view(conclusion)}")
    return 0


def _cmd_judge(args) -> int:
    problems = {p.id: p for p in load_problems(args.problems)}
    p = problems.get(args.problem_id)
    if p is None:
        print(f"unknown problem id {args.problem_id}", file=sys.stderr)
        return 1
    themes = load_themes(args.themes)
    theme = theme_for_problem(p.id, themes)
    mapping = bind_theme(p, theme, random.Random(args.mapping_seed))
    answer = parse_answer(args.answer, mapping)
    print(f"parse status: {answer.status}")
    if answer.conclusion is not None:
        print(f"conclusion: {print_view(answer.conclusion)}")
    if answer.status == "parse-error":
        return 1
    verdict = judge_response(p, answer, args.mode)
    print(
        json.dumps(
            {
                "logically_correct": verdict.logically_correct,
                "etr_predicted": verdict.etr_predicted,
                "human_like_fallacy": verdict.human_like_fallacy,
                "mode": verdict.mode,
            },
            indent=2,
        )
    )
    return 0


def _cmd_eval(args) -> int:
    problems = load_problems(args.problems)
    models = [
        ModelSpec(
            provider=args.provider,
            model=m,
            max_output_tokens=args.max_output_tokens,
            thinking_tokens=args.thinking_tokens,
            timeout=args.timeout,
            max_attempts=args.max_attempts,
        )
        for m in args.model
    ]
    cfg = HarnessConfig(
        base_url=args.base_url,
        api_key=os.environ.get(API_KEY_ENV, ""),
        max_in_flight=args.max_in_flight,
        mapping_seed=args.mapping_seed,
        judge_mode=args.mode,
        translator_model=args.translator_model,
        include_reversed=not args.no_reversed,
    )
    store = RunStore(args.store)
    run_suite(models, problems, cfg, store, load_themes(args.themes))
    manifest = exclusion_report(store)
    for model, row in sorted(manifest.per_model.items()):
        flag = " EXCLUDED" if row["excluded"] else ""
        print(f"{model}: {row['n']} records, parse-error rate {row['rate']:.1%}{flag}")
    return 0


def _cmd_analyze(args) -> int:
    store = RunStore(args.store)
    records = analysis_records(store)
    capability = stats.load_capability_table(args.capabilities) if args.capabilities else None
    results = stats.analyze(records, capability)
    models = sorted({r.model for r in records if r.verdict is not None})
    model_rows = [stats.model_stats(records, m) for m in models]
    stats.write_model_csv(model_rows, args.out_csv)
    stats.write_results_json(results, args.out_json)
    print(f"wrote {args.out_csv} and {args.out_json}")
    if args.plot and capability:
        for metric, row in results.get("capability_correlations", {}).items():
            xs = [capability[metric][m] for m in row["models"]]
            ys = [results["models"][m]["fallacy_rate"] for m in row["models"]]
            path = f"{args.plot_prefix}{metric}.svg"
            stats.write_scatter_svg(xs, ys, row["models"], path, xlabel=metric)
            print(f"wrote {path}")
    return 0


def _cmd_conformance(args) -> int:
    core, ext, trace = conformance.run_all()
    failed = 0
    for r in core:
        status = "PASS" if r.passed else "FAIL"
        failed += 0 if r.passed else 1
        detail = f"  ({r.detail})" if r.detail else ""
        print(f"{status} {r.name}{detail}")
    status = "PASS" if ext.passed else "DEVIATES (reported separately)"
    print(f"{status} {ext.name}")
    if not ext.passed and args.trace:
        print("--- extended vector trace ---")
        print(trace)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erotetic",
        description="Generate, render, and evaluate fallacy-inducing reasoning problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate validated problems to a JSONL file")
    g.add_argument("--n", type=int, default=400)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--max-premises", type=int, default=5)
    g.add_argument("--min-atoms", type=int, default=4)
    g.add_argument("--max-atoms", type=int, default=11)
    g.set_defaults(func=_cmd_generate)

    r = sub.add_parser("render", help="print the natural-language prompts for problems")
    r.add_argument("--problems", required=True)
    r.add_argument("--themes", default=None)
    r.add_argument("--mapping-seed", type=int, default=0)
    r.add_argument("--reversed", action="store_true", help="render reversed premise order")
    r.set_defaults(func=_cmd_render)

    p = sub.add_parser("predict", help="run the reasoning procedure on premises in view notation")
    p.add_argument("premise", nargs="+", help='premises, e.g. \'{Q(x())}\'')
    p.set_defaults(func=_cmd_predict)

    j = sub.add_parser("judge", help="judge a single answer against a stored problem")
    j.add_argument("--problems", required=True)
    j.add_argument("--problem-id", required=True)
    j.add_argument("--answer", required=True)
    j.add_argument("--themes", default=None)
    j.add_argument("--mapping-seed", type=int, default=0)
    j.add_argument("--mode", choices=("endorsement", "exact", "up-to-equivalence"),
                   default="endorsement")
    j.set_defaults(func=_cmd_judge)

    e = sub.add_parser("eval", help="evaluate models over a problem file")
    e.add_argument("--problems", required=True)
    e.add_argument("--store", required=True)
    e.add_argument("--base-url", required=True)
    e.add_argument("--model", action="append", required=True)
    e.add_argument("--provider", default="openai-compatible")
    e.add_argument("--themes", default=None)
    e.add_argument("--mapping-seed", type=int, default=0)
    e.add_argument("--max-output-tokens", type=int, default=3000)
    e.add_argument("--thinking-tokens", type=int, default=None)
    e.add_argument("--timeout", type=float, default=120.0)
    e.add_argument("--max-attempts", type=int, default=3)
    e.add_argument("--max-in-flight", type=int, default=8)
    e.add_argument("--mode", choices=("endorsement", "exact", "up-to-equivalence"),
                   default="endorsement")
    e.add_argument("--translator-model", default=None)
    e.add_argument("--no-reversed", action="store_true")
    e.set_defaults(func=_cmd_eval)

    a = sub.add_parser("analyze", help="aggregate a run store into reports")
    a.add_argument("--store", required=True)
    a.add_argument("--capabilities", default=None)
    a.add_argument("--out-csv", default="models.csv")
    a.add_argument("--out-json", default="results.json")
    a.add_argument("--plot", action="store_true")
    a.add_argument("--plot-prefix", default="scatter_")
    a.set_defaults(func=_cmd_analyze)

    c = sub.add_parser("conformance", help="run the gold reasoning vectors")
    c.add_argument("--trace", action="store_true", help="print the extended vector's trace")
    c.set_defaults(func=_cmd_conformance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # surface runtime errors as status 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
