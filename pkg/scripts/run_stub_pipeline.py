#!/usr/bin/env python3
"""Offline end-to-end pipeline demo against the in-repo stub endpoint.

Generates problems, serves scripted answers (predicted conclusion on the
original order, "nothing follows" on the reversed order), evaluates a
stub model, and prints the analysis summary.

Usage: python3 scripts/run_stub_pipeline.py [--n 50] [--seed 0] [--workdir DIR]
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from erotetic.generator import GenConfig, generate_problems, save_problems
from erotetic.harness import (
    HarnessConfig,
    ModelSpec,
    RunStore,
    analysis_records,
    exclusion_report,
    run_suite,
)
from erotetic.stats import analyze, fallacy_rate, write_model_csv, model_stats
from erotetic.stubserver import StubServer, scripted_answers


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workdir", default="stub_run")
    args = ap.parse_args()

    os.makedirs(args.workdir, exist_ok=True)
    problems = generate_problems(GenConfig(), args.seed, args.n)
    save_problems(problems, os.path.join(args.workdir, "problems.jsonl"))
    print(f"generated {len(problems)} problems")

    store_path = os.path.join(args.workdir, "run.jsonl")
    with StubServer(scripted_answers(problems, mapping_seed=args.seed)) as srv:
        cfg = HarnessConfig(base_url=srv.base_url, mapping_seed=args.seed)
        store = RunStore(store_path)
        run_suite([ModelSpec("stub", "stub-model")], problems, cfg, store)
    print(f"{len(store.records)} records in {store_path}")

    records = analysis_records(store, exclusion_report(store))
    results = analyze(records)
    print(json.dumps(results, indent=2))
    print(f"fallacy rate: {fallacy_rate(records):.3f}")
    write_model_csv(
        [model_stats(records, m) for m in sorted({r.model for r in records})],
        os.path.join(args.workdir, "models.csv"),
    )


if __name__ == "__main__":
    main()
