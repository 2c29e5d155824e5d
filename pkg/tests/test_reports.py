import csv
import io
import json

import pytest

import reports
from reports import BenchReport, WorkerResult


def worker(worker_id, triples, started, finished, **final):
    seconds = finished - started
    return WorkerResult(
        worker_id=worker_id,
        triples_ingested=triples,
        wall_seconds=seconds,
        updates_per_second=int(triples / seconds),
        started_at=started,
        finished_at=finished,
        cascade_stats={"updates_applied": triples + 1000,
                       "cascades_per_level": [3, 1, 0],
                       "entries_promoted_per_level": [9000, 500, 0]},
        layer_nnz=[10, 200, 0],
        **final
    )


@pytest.fixture
def report():
    return BenchReport.from_workers(
        {"workers": 2, "mode": "hierarchical", "cuts": [32768, 524288]},
        [worker(1, 400000, 0.25, 2.0), worker(0, 500000, 0.0, 1.5)],
        timestamp="2024-01-02T03:04:05+00:00",
    )


def test_from_workers(report):
    assert [w.worker_id for w in report.workers] == [0, 1]
    assert report.wall_seconds == 2.0
    assert report.total_triples() == 900000
    assert report.aggregate_updates_per_second == 450000
    assert report.inconsistencies() == []


def test_inconsistencies(report):
    report.aggregate_updates_per_second += 1
    report.workers[0].updates_per_second = 7
    problems = report.inconsistencies()
    assert len(problems) == 2
    assert problems[0].startswith("aggregate_updates_per_second")
    assert problems[1].startswith("worker 0")


def test_json_key_order(report):
    loaded = json.loads(reports.to_json(report))
    assert list(loaded) == ["config", "workers",
                            "aggregate_updates_per_second", "wall_seconds",
                            "timestamp"]
    assert loaded["workers"][1]["finished_at"] == 2.0
    assert loaded["workers"][0]["final_digest"] is None


def test_json_file_roundtrip(report, tmp_path):
    path = tmp_path / "report.json"
    reports.emit_report(report, "json", path)
    assert reports.load_report(path) == report


def test_csv_rows(report):
    rows = reports.to_csv_rows(report)
    assert len(rows) == len(report.workers) + 1
    assert [row["row"] for row in rows] == ["worker", "worker", "aggregate"]
    assert rows[0]["cascades_per_level"] == "3;1;0"
    assert rows[-1]["triples_ingested"] == 900000
    assert json.loads(rows[-1]["config"])["mode"] == "hierarchical"


def test_csv_file_roundtrip(report, tmp_path):
    report.workers[0].final_nnz = 12
    report.workers[0].final_value_sum = 500000
    report.workers[0].final_digest = "abc"
    path = tmp_path / "report.csv"
    reports.emit_report(report, "csv", path)
    with open(path, newline="") as report_file:
        assert next(csv.reader(report_file)) == reports.CSV_FIELDS
    loaded = reports.load_report(path)
    assert loaded == report
    assert loaded.inconsistencies() == []


def test_write_report_to_stream(report):
    out = io.StringIO()
    reports.write_report(report, "csv", out)
    assert len(out.getvalue().strip().splitlines()) == 4


def test_unknown_format(report, tmp_path):
    with pytest.raises(ValueError):
        reports.emit_report(report, "xml", tmp_path / "report.xml")


def test_csv_needs_aggregate(report):
    rows = [{key: str(value) for key, value in row.items()}
            for row in reports.to_csv_rows(report)[:-1]]
    with pytest.raises(ValueError):
        reports.from_csv_rows(rows)


def test_empty_report():
    report = BenchReport.from_workers({}, [])
    assert report.wall_seconds == 0.0
    assert report.aggregate_updates_per_second == 0
    assert report.timestamp
