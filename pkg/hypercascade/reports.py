# SPDX-License-Identifier: GPL-2.0-only

"""
Benchmark reports and their JSON and CSV forms.

JSON: a single object with the keys config, workers, aggregate_updates_per_second,
wall_seconds and timestamp (RFC 3339), in that order.

CSV: one row per worker followed by one aggregate row, with the columns in
CSV_FIELDS. List fields are joined with ";" and the config echo is carried as
JSON in the aggregate row.

Rates are integer updates (ingested triples) per second. Worker start and
finish times are offsets in seconds from the earliest worker start, so
wall_seconds = max(finished_at) and the aggregate rate is
sum(triples_ingested) / wall_seconds; both can be recomputed from the worker
rows.
"""

import csv
import dataclasses
import datetime
import json
import logging
import math

import timers

logger = logging.getLogger("hypercascade." + __name__)

FORMATS = ("json", "csv")

CSV_FIELDS = [
    "row",
    "worker_id",
    "triples_ingested",
    "wall_seconds",
    "updates_per_second",
    "started_at",
    "finished_at",
    "updates_applied",
    "cascades_per_level",
    "entries_promoted_per_level",
    "layer_nnz",
    "final_nnz",
    "final_value_sum",
    "final_digest",
    "timestamp",
    "config",
]


def rfc3339_now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(
        timespec="seconds"
    )


@dataclasses.dataclass
class WorkerResult:
    """
    What one worker measured. final_* fields are only filled when the run
    asked for digests.
    """
    worker_id: int
    triples_ingested: int
    wall_seconds: float
    updates_per_second: int
    started_at: float
    finished_at: float
    cascade_stats: dict
    layer_nnz: list
    final_nnz: int = None
    final_value_sum: int = None
    final_digest: str = None

    def as_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, worker):
        return cls(**worker)


@dataclasses.dataclass
class BenchReport:
    config: dict
    workers: list
    aggregate_updates_per_second: int
    wall_seconds: float
    timestamp: str = dataclasses.field(default_factory=rfc3339_now)

    @classmethod
    def from_workers(cls, config, workers, timestamp=None):
        """
        Builds a report from worker results, computing the aggregates.
        """
        workers = sorted(workers, key=lambda worker: worker.worker_id)
        wall_seconds = max((w.finished_at for w in workers), default=0.0)
        total = sum(w.triples_ingested for w in workers)
        return cls(
            config=config,
            workers=workers,
            aggregate_updates_per_second=timers.rate(total, wall_seconds),
            wall_seconds=wall_seconds,
            timestamp=timestamp or rfc3339_now(),
        )

    def total_triples(self):
        return sum(worker.triples_ingested for worker in self.workers)

    def inconsistencies(self):
        """
        Returns a list of descriptions of aggregates that don't match what
        the worker rows recompute to. Empty for a consistent report.
        """
        problems = []
        span = max((w.finished_at for w in self.workers), default=0.0)
        if not math.isclose(span, self.wall_seconds, rel_tol=1e-9,
                            abs_tol=1e-9):
            problems.append("wall_seconds {} != max(finished_at) {}".format(
                self.wall_seconds, span
            ))
        expected = timers.rate(self.total_triples(), self.wall_seconds)
        if expected != self.aggregate_updates_per_second:
            problems.append(
                "aggregate_updates_per_second {} != {} recomputed".format(
                    self.aggregate_updates_per_second, expected
                )
            )
        for worker in self.workers:
            worker_rate = timers.rate(worker.triples_ingested,
                                      worker.wall_seconds)
            if worker_rate != worker.updates_per_second:
                problems.append(
                    "worker {} updates_per_second {} != {} recomputed".format(
                        worker.worker_id, worker.updates_per_second,
                        worker_rate
                    )
                )
        return problems

    def as_dict(self):
        return {
            "config": self.config,
            "workers": [worker.as_dict() for worker in self.workers],
            "aggregate_updates_per_second": self.aggregate_updates_per_second,
            "wall_seconds": self.wall_seconds,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, report):
        return cls(
            config=report["config"],
            workers=[WorkerResult.from_dict(w) for w in report["workers"]],
            aggregate_updates_per_second=report["aggregate_updates_per_second"],
            wall_seconds=report["wall_seconds"],
            timestamp=report["timestamp"],
        )


def to_json(report):
    return json.dumps(report.as_dict(), indent=2) + "\n"


def _join(values):
    return ";".join(str(value) for value in values)


def _split(text):
    return [int(value) for value in text.split(";")] if text else []


def _blank(value):
    return "" if value is None else value


def to_csv_rows(report):
    """
    Returns the report as a list of CSV row dicts keyed by CSV_FIELDS.
    """
    rows = []
    for worker in report.workers:
        stats = worker.cascade_stats
        rows.append({
            "row": "worker",
            "worker_id": worker.worker_id,
            "triples_ingested": worker.triples_ingested,
            "wall_seconds": repr(worker.wall_seconds),
            "updates_per_second": worker.updates_per_second,
            "started_at": repr(worker.started_at),
            "finished_at": repr(worker.finished_at),
            "updates_applied": stats["updates_applied"],
            "cascades_per_level": _join(stats["cascades_per_level"]),
            "entries_promoted_per_level": _join(
                stats["entries_promoted_per_level"]
            ),
            "layer_nnz": _join(worker.layer_nnz),
            "final_nnz": _blank(worker.final_nnz),
            "final_value_sum": _blank(worker.final_value_sum),
            "final_digest": _blank(worker.final_digest),
            "timestamp": report.timestamp,
            "config": "",
        })
    aggregate = dict.fromkeys(CSV_FIELDS, "")
    aggregate.update({
        "row": "aggregate",
        "triples_ingested": report.total_triples(),
        "wall_seconds": repr(report.wall_seconds),
        "updates_per_second": report.aggregate_updates_per_second,
        "timestamp": report.timestamp,
        "config": json.dumps(report.config, sort_keys=True),
    })
    rows.append(aggregate)
    return rows


def _optional_int(text):
    return int(text) if text != "" else None


def _optional_number(text):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def from_csv_rows(rows):
    """
    Rebuilds a BenchReport from rows produced by to_csv_rows (values as
    strings, the way csv.DictReader returns them).
    """
    workers = []
    aggregate = None
    for row in rows:
        if row["row"] == "aggregate":
            aggregate = row
            continue
        workers.append(WorkerResult(
            worker_id=int(row["worker_id"]),
            triples_ingested=int(row["triples_ingested"]),
            wall_seconds=float(row["wall_seconds"]),
            updates_per_second=int(row["updates_per_second"]),
            started_at=float(row["started_at"]),
            finished_at=float(row["finished_at"]),
            cascade_stats={
                "updates_applied": int(row["updates_applied"]),
                "cascades_per_level": _split(row["cascades_per_level"]),
                "entries_promoted_per_level": _split(
                    row["entries_promoted_per_level"]
                ),
            },
            layer_nnz=_split(row["layer_nnz"]),
            final_nnz=_optional_int(row["final_nnz"]),
            final_value_sum=_optional_number(row["final_value_sum"]),
            final_digest=row["final_digest"] or None,
        ))
    if aggregate is None:
        raise ValueError("CSV report has no aggregate row")
    return BenchReport(
        config=json.loads(aggregate["config"]),
        workers=workers,
        aggregate_updates_per_second=int(aggregate["updates_per_second"]),
        wall_seconds=float(aggregate["wall_seconds"]),
        timestamp=aggregate["timestamp"],
    )


def emit_report(report, fmt, path):
    """
    Writes the report to path as "json" or "csv". Raises OSError if the path
    can't be written.
    """
    if fmt not in FORMATS:
        raise ValueError("unknown report format {!r}; expected one of "
                         "{}".format(fmt, ", ".join(FORMATS)))
    with open(path, "w", newline="") as out:
        write_report(report, fmt, out)
    logger.info("Wrote %s report to %s", fmt, path)


def write_report(report, fmt, out):
    """
    Writes the report as "json" or "csv" to an open text file.
    """
    if fmt == "json":
        out.write(to_json(report))
    else:
        writer = csv.DictWriter(out, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(to_csv_rows(report))


def load_report(path, fmt=None):
    """
    Reads a report written by emit_report. The format defaults to the file
    extension (.csv or anything else as JSON).
    """
    if fmt is None:
        fmt = "csv" if str(path).endswith(".csv") else "json"
    with open(path, newline="") as report_file:
        if fmt == "csv":
            return from_csv_rows(csv.DictReader(report_file))
        return BenchReport.from_dict(json.load(report_file))
