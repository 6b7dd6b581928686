"""In-process stub chat-completions endpoint for offline pipeline tests.

The stub is scripted per problem: on the original premise order it answers
with the engine-predicted conclusion, on the reversed order it answers
that nothing follows.  It recognizes prompts by re-rendering each problem
under the same deterministic theme mapping the harness uses.
"""

from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Sequence

from .generator import Problem, reverse_premises
from .render import bind_theme, load_themes, render_prompt, render_view, theme_for_problem

FALLACY_TEMPLATE = "Answer: From the premises, we can conclude that {conclusion}"
NOTHING_ANSWER = "Answer: From the premises, we cannot conclude anything."


def scripted_answers(problems: Sequence[Problem], mapping_seed: int = 0, themes=None) -> dict:
    """Map each rendered prompt to its scripted reply."""
    themes = themes or load_themes()
    table = {}
    for problem in problems:
        theme = theme_for_problem(problem.id, themes)
        for order in ("original", "reversed"):
            p = problem if order == "original" else reverse_premises(problem)
            mapping = bind_theme(p, theme, random.Random(mapping_seed))
            prompt = render_prompt(p, mapping)
            if order == "original":
                sentence = render_view(problem.predicted, mapping)
                reply = FALLACY_TEMPLATE.format(conclusion=sentence[0].lower() + sentence[1:])
            else:
                reply = NOTHING_ANSWER
            table[prompt] = reply
    return table


class _Handler(BaseHTTPRequestHandler):
    answers: dict = {}

    def log_message(self, *args):  # quiet
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        try:
            payload = json.loads(self.rfile.read(length))
            prompt = payload["messages"][0]["content"]
        except Exception:
            self.send_error(400, "bad request")
            return
        reply = self.answers.get(prompt)
        if reply is None:
            self.send_error(404, "unscripted prompt")
            return
        body = json.dumps(
            {
                "choices": [{"message": {"role": "assistant", "content": reply}}],
                "usage": {"prompt_tokens": 0, "completion_tokens": 0},
            }
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class StubServer:
    """Context manager serving scripted answers on a local port."""

    def __init__(self, answers: dict, port: int = 0):
        handler = type("BoundHandler", (_Handler,), {"answers": answers})
        self._server = ThreadingHTTPServer(("127.0.0.1", port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
        return False
