#!/usr/bin/env python3
"""Serve the stub chat-completions endpoint for a problem file.

Usage: python3 scripts/serve_stub.py --problems problems.jsonl [--port 8000]
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from erotetic.generator import load_problems
from erotetic.stubserver import StubServer, scripted_answers


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--problems", required=True)
    ap.add_argument("--port", type=int, default=8000)
    ap.add_argument("--mapping-seed", type=int, default=0)
    args = ap.parse_args()

    problems = load_problems(args.problems)
    answers = scripted_answers(problems, mapping_seed=args.mapping_seed)
    with StubServer(answers, port=args.port) as srv:
        print(f"serving {len(answers)} scripted prompts at {srv.base_url}")
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            pass


if __name__ == "__main__":
    main()
