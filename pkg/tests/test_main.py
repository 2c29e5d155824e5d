import json
import os

import pytest

import bench
import cfgparser
import hypercascade
import main
import reports

SMALL_BENCH = ["--scale", "12", "--batch-size", "500", "--batches", "6",
               "--warmup", "1"]


@pytest.fixture(autouse=True)
def config(etc_dir):
    assert cfgparser.load_config(os.path.join(etc_dir, "config.toml"),
                                 pedantic=False)
    return cfgparser.cfg


def run(*argv):
    return main.run(hypercascade.arguments(list(argv)))


def test_verify_passes(capsys):
    assert run("verify", "--scale", "10", "--batch-size", "500",
               "--batches", "6", "--cuts", "100,1000") == main.EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "PASS"


def test_verify_bad_cuts():
    assert run("verify", "--cuts", "5,3") == main.EXIT_CONFIG


def test_verify_over_limit():
    assert run("verify", "--batches", "1000") == main.EXIT_CONFIG


def test_bad_skew():
    assert run("verify", "--skew", "a,b") == main.EXIT_CONFIG
    assert run("verify", "--skew", "0.1,0.3,0.3,0.3") == main.EXIT_CONFIG


def test_ingest(tmp_path, capsys):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\t5\n0\t2\t3\n0\t1\t2\n")
    assert run("ingest", str(path), "--top-k", "1") == main.EXIT_OK
    out = capsys.readouterr().out
    assert "nnz 2, value sum 10" in out
    assert "top row sums: 0->10" in out


def test_ingest_missing_file(tmp_path):
    assert run("ingest", str(tmp_path / "missing.tsv")) == main.EXIT_IO


def test_ingest_malformed(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("a\tb\tc\n")
    assert run("ingest", str(path)) == main.EXIT_IO


def test_ingest_out_of_range(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\t5\n10\t1\t5\n")
    assert run("ingest", str(path), "--dims", "10,10") == main.EXIT_IO


@pytest.mark.parametrize("text", [
    "0\t0\t9223372036854775807\n0\t0\t1\n",
    "0\t0\t9223372036854775807\n1\t1\t1\n",
])
def test_ingest_value_overflow(tmp_path, text):
    path = tmp_path / "edges.tsv"
    path.write_text(text)
    assert run("ingest", str(path)) == main.EXIT_IO


@pytest.mark.parametrize("dims", ["10", "10,x", "0,10"])
def test_ingest_bad_dims(tmp_path, dims):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\t5\n")
    assert run("ingest", str(path), "--dims", dims) == main.EXIT_CONFIG


def test_gen_then_ingest(tmp_path, capsys):
    path = tmp_path / "stream.tsv"
    assert run("gen", str(path), "--scale", "8", "--batch-size", "100",
               "--batches", "2") == main.EXIT_OK
    assert len(path.read_text().splitlines()) == 200
    assert run("ingest", str(path), "--dims", "256,256") == main.EXIT_OK
    assert "200 triples" in capsys.readouterr().out


def test_bench_to_stdout(capsys):
    assert run("bench", *SMALL_BENCH) == main.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["config"]["warmup_batches"] == 1
    assert sum(w["triples_ingested"] for w in report["workers"]) == 2500


def test_bench_to_file(tmp_path):
    path = tmp_path / "report.csv"
    assert run("bench", *SMALL_BENCH, "--workers", "2", "--format", "csv",
               "--output", str(path)) == main.EXIT_OK
    report = reports.load_report(str(path))
    assert len(report.workers) == 2
    assert report.inconsistencies() == []


def test_bench_unwritable_output(tmp_path):
    path = tmp_path / "missing" / "report.json"
    assert run("bench", *SMALL_BENCH, "--output", str(path)) == main.EXIT_IO


def test_bench_too_many_workers():
    assert run("bench", *SMALL_BENCH, "--workers", "6") == main.EXIT_CONFIG


def test_worker_failure_exit_code(monkeypatch):
    def failing_run(cfg, record=None):
        raise bench.WorkerError(1, "Traceback ...\nMemoryError\n")

    monkeypatch.setattr(bench, "run_bench", failing_run)
    assert run("bench", *SMALL_BENCH) == main.EXIT_WORKER


def test_history_needs_database():
    assert run("history") == main.EXIT_CONFIG


def test_history(config, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(config.database, "report_url",
                        "sqlite:///{}".format(tmp_path / "runs.db"))
    assert run("bench", *SMALL_BENCH, "--output",
               str(tmp_path / "r.json")) == main.EXIT_OK
    assert run("bench", *SMALL_BENCH, "--mode", "flat", "--output",
               str(tmp_path / "r.json")) == main.EXIT_OK
    capsys.readouterr()
    assert run("history", "--limit", "5") == main.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert " flat " in lines[0]


def test_version():
    with pytest.raises(SystemExit) as excinfo:
        hypercascade.arguments(["--version"])
    assert excinfo.value.code == 0


def test_command_required():
    with pytest.raises(SystemExit) as excinfo:
        hypercascade.arguments([])
    assert excinfo.value.code == 2
