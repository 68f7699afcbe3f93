import json

import pytest

from kgtables.cli import PipelineConfig, build_parser, main
from kgtables.dataset_io import load_dataset
from kgtables.errors import ConfigError

from .conftest import make_kg_lines


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "kg.tsv").write_bytes(b"".join(make_kg_lines(n_relations=4, triples_per=12)))
    (tmp_path / "corpus.jsonl").write_text(
        "\n".join(
            json.dumps({"doc_id": "d", "para_id": i, "text": text})
            for i, text in enumerate(
                [
                    f"s{r:02d}_{i:03d} is closely tied to o{r:02d}_{i:03d} in many ways."
                    for r in range(4)
                    for i in range(12)
                ]
            )
        )
        + "\n",
        encoding="utf-8",
    )
    (tmp_path / "webtables.jsonl").write_text(
        "\n".join(
            json.dumps(
                {
                    "table_id": f"wt{r}_{i}",
                    "headers": [f"head{r}l", f"head{r}r"],
                    "columns": [[f"s{r:02d}_{i:03d}"], [f"o{r:02d}_{i:03d}"]],
                }
            )
            for r in range(4)
            for i in range(12)
        )
        + "\n",
        encoding="utf-8",
    )
    return tmp_path


class TestGenerate:
    def test_table_count_matches_config_arithmetic(self, workdir):
        out = workdir / "dataset.jsonl"
        status = main(
            [
                "generate",
                "--triples", str(workdir / "kg.tsv"),
                "--out", str(out),
                "--seed", "11",
                "--tables-per-relation", "3",
                "--negative-fraction", "0.5",
            ]
        )
        assert status == 0
        tables = list(load_dataset(out))
        # 4 relations x 3 positives + ceil(0.5 * 12) negatives
        assert len(tables) == 18
        assert sum(t.is_negative for t in tables) == 6

    def test_missing_triples_file_fails_with_status_1(self, workdir):
        status = main(
            ["generate", "--triples", str(workdir / "none.tsv"), "--out", str(workdir / "x")]
        )
        assert status == 1


class TestEnrich:
    def build_assets(self, workdir):
        assert (
            main(
                [
                    "build-index",
                    "--corpus", str(workdir / "corpus.jsonl"),
                    "--out", str(workdir / "index.pkl"),
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "build-header-map",
                    "--tables", str(workdir / "webtables.jsonl"),
                    "--out", str(workdir / "headmap.json"),
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "generate",
                    "--triples", str(workdir / "kg.tsv"),
                    "--out", str(workdir / "dataset.jsonl"),
                    "--seed", "1",
                    "--tables-per-relation", "2",
                ]
            )
            == 0
        )

    def test_enrich_with_both_kinds_of_metadata(self, workdir):
        self.build_assets(workdir)
        status = main(
            [
                "enrich",
                "--dataset", str(workdir / "dataset.jsonl"),
                "--out", str(workdir / "enriched.jsonl"),
                "--context", "--index", str(workdir / "index.pkl"),
                "--headers", "--header-map", str(workdir / "headmap.json"),
                "--seed", "1",
            ]
        )
        assert status == 0
        tables = list(load_dataset(workdir / "enriched.jsonl"))
        assert tables
        assert all(t.headers is not None for t in tables)
        positive_rows = [r for t in tables if not t.is_negative for r in t.rows]
        assert all(r.context is not None for r in positive_rows)

    def test_enrich_without_flags_is_a_usage_error(self, workdir):
        self.build_assets(workdir)
        status = main(
            [
                "enrich",
                "--dataset", str(workdir / "dataset.jsonl"),
                "--out", str(workdir / "enriched.jsonl"),
            ]
        )
        assert status == 2

    def test_context_requires_index_flag(self, workdir):
        self.build_assets(workdir)
        status = main(
            [
                "enrich",
                "--dataset", str(workdir / "dataset.jsonl"),
                "--out", str(workdir / "e.jsonl"),
                "--context",
            ]
        )
        assert status == 2


class TestSplit:
    def test_split_writes_both_files(self, workdir):
        main(
            [
                "generate",
                "--triples", str(workdir / "kg.tsv"),
                "--out", str(workdir / "dataset.jsonl"),
                "--tables-per-relation", "5",
            ]
        )
        status = main(
            [
                "split",
                "--dataset", str(workdir / "dataset.jsonl"),
                "--train-ratio", "0.8",
                "--seed", "3",
            ]
        )
        assert status == 0
        train = (workdir / "dataset.train.jsonl").read_text(encoding="utf-8").splitlines()
        valid = (workdir / "dataset.valid.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(train) == 16 and len(valid) == 4


class TestScore:
    def test_perfect_score_report_on_stdout(self, workdir, capsys):
        gold = workdir / "gold.jsonl"
        pred = workdir / "pred.jsonl"
        gold.write_text(
            '{"table_id": "t1", "gold": "a"}\n{"table_id": "t2", "gold": "b"}\n',
            encoding="utf-8",
        )
        pred.write_text(
            '{"table_id": "t1", "pred": "a"}\n{"table_id": "t2", "pred": "b"}\n',
            encoding="utf-8",
        )
        status = main(["score", "--gold", str(gold), "--pred", str(pred)])
        assert status == 0
        report = json.loads(capsys.readouterr().out)
        assert report["precision"] == 1.0
        assert report["recall"] == 1.0
        assert report["f1"] == 1.0


class TestConfigHandling:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["frobnicate"])
        assert exc_info.value.code == 2

    def test_invalid_config_returns_2(self, workdir):
        status = main(
            [
                "generate",
                "--triples", str(workdir / "kg.tsv"),
                "--out", str(workdir / "x.jsonl"),
                "--rows-min", "9",
                "--rows-max", "5",
            ]
        )
        assert status == 2

    def test_flags_override_config_file(self, workdir):
        config_path = workdir / "config.json"
        config_path.write_text(
            json.dumps({"tables_per_relation": 1, "master_seed": 5}), encoding="utf-8"
        )
        out = workdir / "d.jsonl"
        status = main(
            [
                "generate",
                "--triples", str(workdir / "kg.tsv"),
                "--out", str(out),
                "--config", str(config_path),
                "--tables-per-relation", "2",
            ]
        )
        assert status == 0
        assert len(list(load_dataset(out))) == 8  # flag value 2 wins over file value 1

    def test_unknown_config_keys_rejected(self, workdir):
        config_path = workdir / "config.json"
        config_path.write_text(json.dumps({"bogus": 1}), encoding="utf-8")
        status = main(
            [
                "generate",
                "--triples", str(workdir / "kg.tsv"),
                "--out", str(workdir / "x.jsonl"),
                "--config", str(config_path),
            ]
        )
        assert status == 2

    def test_pipeline_config_validation(self):
        PipelineConfig().validate()
        with pytest.raises(ConfigError):
            PipelineConfig(top_k=0).validate()
        with pytest.raises(ConfigError):
            PipelineConfig(train_ratio=1.5).validate()
        with pytest.raises(ConfigError):
            PipelineConfig(rows_min=0).validate()

    def test_parser_knows_all_subcommands(self):
        parser = build_parser()
        for command in ["build-index", "build-header-map", "generate", "enrich", "split", "score"]:
            args = parser.parse_args(
                [command]
                + {
                    "build-index": ["--corpus", "c", "--out", "o"],
                    "build-header-map": ["--tables", "t", "--out", "o"],
                    "generate": ["--triples", "t", "--out", "o"],
                    "enrich": ["--dataset", "d", "--out", "o"],
                    "split": ["--dataset", "d"],
                    "score": ["--gold", "g", "--pred", "p"],
                }[command]
            )
            assert args.command == command
