import json

import pytest

from finrelex import corpus
from finrelex.cli import main
from tests.conftest import FIXTURE_CORPUS, FIXTURE_GOLD, TOY_EMBEDDINGS


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def predictions_path(tmp_path):
    out = tmp_path / "pred.jsonl"
    assert run(
        "extract", "--corpus", FIXTURE_CORPUS, "--embeddings", TOY_EMBEDDINGS, "--out", out
    ) == 0
    return out


class TestExtract:
    def test_writes_prediction_per_document(self, predictions_path, documents):
        lines = predictions_path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == len(documents)
        first = json.loads(lines[0])
        assert first == {
            "id": "apple-income",
            "predicted_text": "Apple, revenue, $9.4 million, unknown-date|",
        }

    def test_predictions_follow_input_order(self, predictions_path, documents):
        ids = [json.loads(line)["id"] for line in predictions_path.read_text().splitlines()]
        assert ids == [d.id for d in documents]

    def test_missing_corpus_fails_without_output(self, tmp_path):
        out = tmp_path / "pred.jsonl"
        status = run("extract", "--corpus", tmp_path / "nope.jsonl",
                     "--embeddings", TOY_EMBEDDINGS, "--out", out)
        assert status != 0
        assert not out.exists()

    def test_bad_embeddings_fail_without_output(self, tmp_path):
        bad = tmp_path / "vectors.txt"
        bad.write_text("a 1\nb 1 2\n", encoding="utf-8")
        out = tmp_path / "pred.jsonl"
        status = run("extract", "--corpus", FIXTURE_CORPUS, "--embeddings", bad, "--out", out)
        assert status != 0
        assert not out.exists()

    def test_lexicon_override_changes_classification(self, tmp_path):
        # a near-impossible threshold suppresses every money classification
        lexicon_path = tmp_path / "lexicon.json"
        lexicon_path.write_text(json.dumps({"threshold": 0.9999}), encoding="utf-8")
        out = tmp_path / "pred.jsonl"
        assert run("extract", "--corpus", FIXTURE_CORPUS, "--embeddings", TOY_EMBEDDINGS,
                   "--lexicon", lexicon_path, "--out", out) == 0
        by_id = {
            json.loads(line)["id"]: json.loads(line)["predicted_text"]
            for line in out.read_text().splitlines()
        }
        assert by_id["konga-raise"] == ""
        # exact self-similarity 1.0 still exceeds the threshold
        assert by_id["apple-income"] == "Apple, revenue, $9.4 million, unknown-date|"

    def test_worker_count_does_not_change_output(self, tmp_path):
        single = tmp_path / "single.jsonl"
        pooled = tmp_path / "pooled.jsonl"
        assert run("extract", "--corpus", FIXTURE_CORPUS, "--embeddings", TOY_EMBEDDINGS,
                   "--out", single, "--workers", 1) == 0
        assert run("extract", "--corpus", FIXTURE_CORPUS, "--embeddings", TOY_EMBEDDINGS,
                   "--out", pooled, "--workers", 8) == 0
        assert single.read_bytes() == pooled.read_bytes()


class TestEvaluate:
    def test_perfect_predictions_score_one(self, tmp_path, predictions_path):
        report_path = tmp_path / "report.json"
        assert run("evaluate", "--gold", FIXTURE_GOLD, "--pred", predictions_path,
                   "--report", report_path) == 0
        report = json.loads(report_path.read_text())
        assert report["accuracy"] == 1.0
        assert report["fp"] == 0 and report["fn"] == 0
        # 69 = words across all non-empty targets after separator stripping,
        # 11 = one true negative per empty-target paragraph
        assert report["tp"] == 69
        assert report["tn"] == 11

    def test_gold_equals_pred_files(self, tmp_path, gold_examples):
        # predictions copied straight from the gold targets
        pred = tmp_path / "pred.jsonl"
        pred.write_text(
            "".join(
                json.dumps({"id": g.id, "predicted_text": g.target_text}) + "\n"
                for g in gold_examples
            ),
            encoding="utf-8",
        )
        report_path = tmp_path / "report.json"
        assert run("evaluate", "--gold", FIXTURE_GOLD, "--pred", pred, "--report", report_path) == 0
        assert json.loads(report_path.read_text())["accuracy"] == 1.0

    def test_breakdown_file(self, tmp_path, predictions_path, documents):
        report_path = tmp_path / "report.json"
        breakdown = tmp_path / "breakdown.jsonl"
        assert run("evaluate", "--gold", FIXTURE_GOLD, "--pred", predictions_path,
                   "--report", report_path, "--breakdown", breakdown) == 0
        rows = [json.loads(line) for line in breakdown.read_text().splitlines()]
        assert len(rows) == len(documents)
        assert all(set(row) == {"id", "tp", "tn", "fp", "fn"} for row in rows)

    def test_fuzzy_mode_flag(self, tmp_path, predictions_path):
        report_path = tmp_path / "report.json"
        assert run("evaluate", "--gold", FIXTURE_GOLD, "--pred", predictions_path,
                   "--mode", "fuzzy", "--threshold", 0.9, "--report", report_path) == 0
        assert json.loads(report_path.read_text())["accuracy"] == 1.0

    def test_missing_prediction_id_fails(self, tmp_path):
        pred = tmp_path / "pred.jsonl"
        pred.write_text(json.dumps({"id": "apple-income", "predicted_text": ""}) + "\n")
        report_path = tmp_path / "report.json"
        status = run("evaluate", "--gold", FIXTURE_GOLD, "--pred", pred, "--report", report_path)
        assert status != 0
        assert not report_path.exists()


class TestPrepare:
    @pytest.fixture()
    def distinct_gold_path(self, tmp_path):
        path = tmp_path / "gold.jsonl"
        lines = []
        for i in range(10):
            lines.append(json.dumps({
                "id": str(i),
                "input_text": f"paragraph {i}",
                "target_text": f"Company{i}, revenue, ${i} million, unknown-date|",
            }))
        for i in range(10, 14):
            lines.append(json.dumps({"id": str(i), "input_text": f"p{i}", "target_text": ""}))
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path

    def test_split_files_written(self, tmp_path, distinct_gold_path):
        out_dir = tmp_path / "splits"
        assert run("prepare", "--gold", distinct_gold_path, "--test-fraction", 0.2,
                   "--seed", 7, "--out-dir", out_dir) == 0
        train = corpus.load_gold(out_dir / "train.jsonl")
        test = corpus.load_gold(out_dir / "test.jsonl")
        assert len(train) + len(test) == 14
        assert len(test) == round(0.2 * 14)

    def test_ten_distinct_examples_split_eight_two(self, tmp_path):
        path = tmp_path / "gold.jsonl"
        path.write_text(
            "".join(
                json.dumps({
                    "id": str(i),
                    "input_text": f"paragraph {i}",
                    "target_text": f"Company{i}, revenue, ${i} million, unknown-date|",
                }) + "\n"
                for i in range(10)
            ),
            encoding="utf-8",
        )
        out_dir = tmp_path / "splits"
        assert run("prepare", "--gold", path, "--test-fraction", 0.2,
                   "--seed", 7, "--out-dir", out_dir) == 0
        assert len((out_dir / "train.jsonl").read_text().splitlines()) == 8
        assert len((out_dir / "test.jsonl").read_text().splitlines()) == 2

    def test_balanced_file_written(self, tmp_path, distinct_gold_path):
        out_dir = tmp_path / "splits"
        assert run("prepare", "--gold", distinct_gold_path, "--balanced",
                   "--seed", 7, "--out-dir", out_dir) == 0
        balanced = corpus.load_gold(out_dir / "balanced-train.jsonl")
        informative = [g for g in balanced if g.target_text]
        empty = [g for g in balanced if not g.target_text]
        assert len(empty) <= len(informative)

    def test_deterministic_outputs(self, tmp_path, distinct_gold_path):
        first = tmp_path / "one"
        second = tmp_path / "two"
        for out_dir in (first, second):
            assert run("prepare", "--gold", distinct_gold_path, "--seed", 11,
                       "--out-dir", out_dir) == 0
        assert (first / "test.jsonl").read_bytes() == (second / "test.jsonl").read_bytes()
        assert (first / "train.jsonl").read_bytes() == (second / "train.jsonl").read_bytes()


class TestInspect:
    def test_prints_document_details(self, capsys):
        assert run("inspect", "--corpus", FIXTURE_CORPUS, "--id", "apple-income") == 0
        out = capsys.readouterr().out
        assert "Apple" in out
        assert "nsubj" in out
        assert "MONEY: $9.4 million" in out
        assert "company-money path (c)" in out

    def test_unknown_id_fails(self):
        assert run("inspect", "--corpus", FIXTURE_CORPUS, "--id", "missing") != 0

    def test_document_without_relations(self, capsys):
        assert run("inspect", "--corpus", FIXTURE_CORPUS, "--id", "market-close") == 0
        assert "no heuristic fired" in capsys.readouterr().out


class TestConfigAndFlags:
    def test_config_file_supplies_defaults(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "corpus": str(FIXTURE_CORPUS),
            "embeddings": str(TOY_EMBEDDINGS),
            "out": str(tmp_path / "from_config.jsonl"),
        }))
        assert run("--config", config, "extract") == 0
        assert (tmp_path / "from_config.jsonl").exists()

    def test_explicit_flag_beats_config(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "corpus": str(FIXTURE_CORPUS),
            "embeddings": str(TOY_EMBEDDINGS),
            "out": str(tmp_path / "ignored.jsonl"),
        }))
        explicit = tmp_path / "explicit.jsonl"
        assert run("--config", config, "extract", "--out", explicit) == 0
        assert explicit.exists()
        assert not (tmp_path / "ignored.jsonl").exists()

    def test_missing_required_flag_fails(self, tmp_path):
        assert run("extract", "--corpus", FIXTURE_CORPUS) != 0

    def test_invalid_log_level_fails(self, tmp_path):
        out = tmp_path / "pred.jsonl"
        assert run("--log-level", "NOISY", "extract", "--corpus", FIXTURE_CORPUS,
                   "--embeddings", TOY_EMBEDDINGS, "--out", out) != 0
