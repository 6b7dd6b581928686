"""Command-line interface smoke tests (no network)."""

import json

from erotetic.cli import main
from erotetic.generator import load_problems
from erotetic.harness import RunRecord, RunStore


class TestGenerate:
    def test_writes_problem_file(self, tmp_path, capsys):
        out = tmp_path / "problems.jsonl"
        assert main(["generate", "--n", "3", "--seed", "5", "--out", str(out)]) == 0
        assert len(load_problems(out)) == 3
        assert "wrote 3 problems" in capsys.readouterr().out


class TestRender:
    def test_prints_prompts(self, tmp_path, capsys):
        out = tmp_path / "problems.jsonl"
        main(["generate", "--n", "2", "--seed", "5", "--out", str(out)])
        capsys.readouterr()
        assert main(["render", "--problems", str(out)]) == 0
        text = capsys.readouterr().out
        assert text.count("===") == 4  # two header lines per problem
        assert "What follows?" in text


class TestPredict:
    def test_prints_conclusion_and_trace(self, capsys):
        code = main(
            ["predict", "{~vis(m()),vis(m())}", "{vis(a()),vis(m())}"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "conclusion: {vis(m())}" in out

    def test_bad_notation_is_error(self, capsys):
        assert main(["predict", "not-a-view"]) == 1
        assert "error:" in capsys.readouterr().err


class TestJudge:
    def test_judges_answer(self, tmp_path, capsys):
        out = tmp_path / "problems.jsonl"
        main(["generate", "--n", "1", "--seed", "5", "--out", str(out)])
        (p,) = load_problems(out)
        capsys.readouterr()
        code = main(
            [
                "judge",
                "--problems", str(out),
                "--problem-id", p.id,
                "--answer", "Answer: nothing follows.",
            ]
        )
        assert code == 0
        text = capsys.readouterr().out
        assert "parse status: nothing-follows" in text
        assert json.loads(text.split("\n", 1)[1])["logically_correct"] is True

    def test_unknown_problem(self, tmp_path, capsys):
        out = tmp_path / "problems.jsonl"
        main(["generate", "--n", "1", "--seed", "5", "--out", str(out)])
        code = main(
            ["judge", "--problems", str(out), "--problem-id", "nope", "--answer", "x"]
        )
        assert code == 1


class TestAnalyze:
    def test_emits_reports(self, tmp_path, capsys):
        store_path = tmp_path / "store.jsonl"
        store = RunStore(store_path)
        for i in range(4):
            store.append(
                RunRecord(
                    problem_id=f"p{i}",
                    order="original",
                    model="m",
                    prompt_sha256="0" * 64,
                    raw_reply="",
                    parse_status="parsed",
                    parsed_conclusion=None,
                    verdict={
                        "logically_correct": False,
                        "etr_predicted": True,
                        "human_like_fallacy": True,
                        "mode": "endorsement",
                    },
                    mapping_seed=0,
                    theme="Cards",
                    elapsed_s=0.0,
                    usage=None,
                    attempts=1,
                )
            )
        csv_out = tmp_path / "models.csv"
        json_out = tmp_path / "results.json"
        code = main(
            [
                "analyze",
                "--store", str(store_path),
                "--out-csv", str(csv_out),
                "--out-json", str(json_out),
            ]
        )
        assert code == 0
        assert json.loads(json_out.read_text())["models"]["m"]["fallacy_rate"] == 1.0
        assert csv_out.read_text().splitlines()[1].startswith("m,4,4,4")


class TestConformance:
    def test_reports_vectors(self, capsys):
        assert main(["conformance"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") >= 10
        assert "DEVIATES (reported separately)" in out

    def test_missing_subcommand_usage_error(self, capsys):
        assert main([]) == 2
