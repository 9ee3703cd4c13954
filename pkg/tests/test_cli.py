import csv
import json
import os
import time

import pytest

from emocast.cli import main
from emocast.emotion import EMOTION_COLUMNS


def run_cli(*args):
    return main([str(a) for a in args])


@pytest.fixture
def fixture_args(fixtures_dir, tmp_path):
    out = tmp_path / "out"
    return [
        "--scripts", fixtures_dir / "scripts",
        "--metadata", fixtures_dir / "metadata.csv",
        "--lexicon", fixtures_dir / "lexicon.tsv",
        "--out", out,
    ], out


class TestParseStage:
    def test_matches_golden_characters_json(self, fixtures_dir, fixture_args):
        args, out = fixture_args
        assert run_cli("parse", *args) == 0
        golden = (fixtures_dir / "golden" / "characters.json").read_bytes()
        assert (out / "characters.json").read_bytes() == golden

    def test_corpus_written(self, fixture_args):
        args, out = fixture_args
        run_cli("parse", *args)
        corpus = json.loads((out / "corpus.json").read_text())
        assert len(corpus["records"]) == 6
        genders = {rec["gender"] for rec in corpus["records"]}
        assert genders == {"female", "male"}


class TestStagedRuns:
    def test_score_after_parse(self, fixture_args):
        args, out = fixture_args
        run_cli("parse", *args)
        assert run_cli("score", *args) == 0
        with (out / "emotions.csv").open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 6
        assert list(rows[0])[3 : 3 + 32] == list(EMOTION_COLUMNS)

    def test_score_without_parse_fails(self, fixture_args):
        args, _ = fixture_args
        assert run_cli("score", *args) == 1

    def test_all_stages_compose(self, fixture_args):
        args, out = fixture_args
        for stage in ("parse", "score", "stats", "cluster", "project", "words"):
            assert run_cli(stage, *args) == 0, stage
        staged = {name: (out / name).read_bytes() for name in os.listdir(out)}

        out2 = out.parent / "out2"
        args2 = [a if a != out else out2 for a in args]
        assert run_cli("run-all", *args2) == 0
        for name, content in staged.items():
            assert (out2 / name).read_bytes() == content, name
        assert (out2 / "report.json").exists()


class TestRunAll:
    def test_report_consistent_with_corpus(self, fixture_args):
        args, out = fixture_args
        assert run_cli("run-all", *args) == 0
        report = json.loads((out / "report.json").read_text())
        corpus = json.loads((out / "corpus.json").read_text())
        assert report["summary"]["characters"] == len(corpus["records"])
        assert report["summary"]["dialogues"] == sum(
            len(r["dialogues"]) for r in corpus["records"]
        )
        assert (
            report["summary"]["female"] + report["summary"]["male"] + report["summary"]["unknown"]
            == report["summary"]["characters"]
        )
        assert len(report["tests"]) == 32
        clustered = report["clusters"]["assignments"]
        assert len(clustered) + report["clusters"]["excluded_no_affect"] == len(corpus["records"])
        assert all(0 <= row["kmeans"] < report["clusters"]["k"] for row in clustered)

    def test_all_artifacts_exist(self, fixture_args):
        args, out = fixture_args
        run_cli("run-all", *args)
        expected = [
            "characters.json", "corpus.json", "emotions.csv", "stats.csv", "timebins.csv",
            "clusters.csv", "composition.csv", "ssecurve.csv", "tsne.csv", "tsne.svg",
            "wordfreq.csv", "report.json",
        ]
        for name in expected:
            assert (out / name).is_file(), name

    def test_auto_k_matches_elbow_of_emitted_curve(self, fixture_args):
        from emocast.clustering import elbow_detect

        args, out = fixture_args
        run_cli("run-all", *args)
        report = json.loads((out / "report.json").read_text())
        with (out / "ssecurve.csv").open(newline="") as fh:
            curve = [(int(r["k"]), float(r["sse"])) for r in csv.DictReader(fh)]
        assert report["clusters"]["auto"] is True
        assert report["clusters"]["k"] == elbow_detect(curve)

    def test_fixed_k_respected(self, fixture_args):
        args, out = fixture_args
        assert run_cli("run-all", *args, "--k", "3") == 0
        report = json.loads((out / "report.json").read_text())
        assert report["clusters"]["k"] == 3
        assert report["clusters"]["auto"] is False


class TestErrors:
    def test_missing_lexicon_names_path(self, fixtures_dir, tmp_path, capsys):
        code = run_cli(
            "run-all",
            "--scripts", fixtures_dir / "scripts",
            "--metadata", fixtures_dir / "metadata.csv",
            "--lexicon", tmp_path / "nope.tsv",
            "--out", tmp_path / "out",
        )
        assert code != 0
        assert "nope.tsv" in capsys.readouterr().err

    def test_missing_required_option(self, capsys):
        assert run_cli("parse") == 2
        assert "--scripts" in capsys.readouterr().err

    def test_unknown_subcommand_rejected(self):
        with pytest.raises(SystemExit):
            run_cli("explode")

    def test_parse_error_names_script_file(self, fixtures_dir, tmp_path, capsys):
        scripts = tmp_path / "scripts"
        scripts.mkdir()
        (scripts / "flatfile.txt").write_text("all lines\nat the same\nindent level\n")
        code = run_cli(
            "parse",
            "--scripts", scripts,
            "--metadata", fixtures_dir / "metadata.csv",
            "--lexicon", fixtures_dir / "lexicon.tsv",
            "--out", tmp_path / "out",
        )
        assert code == 1
        err = capsys.readouterr().err
        assert "parse" in err and "flatfile.txt" in err

    def test_duplicate_movie_stem_rejected(self, fixtures_dir, tmp_path, capsys):
        scripts = tmp_path / "scripts"
        scripts.mkdir()
        source = (fixtures_dir / "scripts" / "harbor_lights.txt").read_text()
        (scripts / "same.txt").write_text(source)
        (scripts / "same.jsonl").write_text(
            (fixtures_dir / "scripts" / "glass_orchard.jsonl").read_text()
        )
        code = run_cli(
            "parse",
            "--scripts", scripts,
            "--metadata", fixtures_dir / "metadata.csv",
            "--lexicon", fixtures_dir / "lexicon.tsv",
            "--out", tmp_path / "out",
        )
        assert code == 1
        assert "already seen" in capsys.readouterr().err


class TestConfigFile:
    def test_config_file_supplies_paths(self, fixtures_dir, tmp_path):
        out = tmp_path / "out"
        config = tmp_path / "run.conf"
        config.write_text(
            f"scripts = {fixtures_dir / 'scripts'}\n"
            f"metadata = {fixtures_dir / 'metadata.csv'}\n"
            f"lexicon = {fixtures_dir / 'lexicon.tsv'}\n"
            f"out = {out}\n"
            "# comment line\n"
            "seed = 7\n"
            "k = 2\n"
        )
        assert run_cli("parse", "--config", config) == 0
        assert (out / "characters.json").exists()

    def test_flags_override_config(self, fixtures_dir, tmp_path):
        out_config = tmp_path / "from_config"
        out_flag = tmp_path / "from_flag"
        config = tmp_path / "run.conf"
        config.write_text(
            f"scripts = {fixtures_dir / 'scripts'}\n"
            f"metadata = {fixtures_dir / 'metadata.csv'}\n"
            f"lexicon = {fixtures_dir / 'lexicon.tsv'}\n"
            f"out = {out_config}\n"
        )
        assert run_cli("parse", "--config", config, "--out", out_flag) == 0
        assert (out_flag / "characters.json").exists()
        assert not out_config.exists()

    def test_unknown_key_rejected(self, tmp_path, capsys):
        config = tmp_path / "bad.conf"
        config.write_text("mystery = 1\n")
        assert run_cli("parse", "--config", config) == 2
        assert "mystery" in capsys.readouterr().err


class TestStaleness:
    def _touch_future(self, path):
        future = time.time() + 60
        os.utime(path, (future, future))

    def test_stale_warns_by_default(self, fixtures_dir, fixture_args, capsys, tmp_path):
        args, out = fixture_args
        run_cli("parse", *args)
        # make the metadata newer than the parsed corpus
        meta_copy = tmp_path / "metadata.csv"
        meta_copy.write_text((fixtures_dir / "metadata.csv").read_text())
        self._touch_future(meta_copy)
        args = [("--metadata" if str(a).endswith("metadata.csv") else a) for a in args]
        args[args.index("--metadata") + 1] = meta_copy
        capsys.readouterr()
        assert run_cli("score", *args) == 0
        assert "older than" in capsys.readouterr().err

    def test_stale_fails_with_strict(self, fixtures_dir, fixture_args, tmp_path, capsys):
        args, out = fixture_args
        run_cli("parse", *args)
        meta_copy = tmp_path / "metadata.csv"
        meta_copy.write_text((fixtures_dir / "metadata.csv").read_text())
        self._touch_future(meta_copy)
        args[args.index("--metadata") + 1] = meta_copy
        assert run_cli("score", *args, "--strict") == 1
        assert "older than" in capsys.readouterr().err
