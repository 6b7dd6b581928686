"""Reasoning-problem generation and LLM evaluation around an erotetic
(question-driven) inference engine.

Submodules:
- views: view terms, notation parser/printer, alpha-equality
- engine: update/query/factor and the default reasoning procedure
- oracle: monadic first-order decision procedure and finite models
- generator: mutation-based problem generation and validation
- render: thematic natural-language rendering
- judge: answer parsing and verdicts
- harness: endpoint evaluation runs and the record store
- stats: fallacy rates, correlations, z-tests, reports
- conformance: gold vectors
- cli: command-line entry point
"""

__version__ = "0.1.0"
