# SPDX-License-Identifier: GPL-2.0-only

"""
A history of benchmark runs kept in a database: one row per run plus one row
per worker of that run.
"""

import json
import logging
import types

import sqlalchemy
from sqlalchemy import (BigInteger, Column, Float, ForeignKey, Integer,
                        String, Table, Text)

import database

logger = logging.getLogger("hypercascade." + __name__)


class ReportDB(database.Database):
    """
    Reads and writes the run history.
    """

    def __init__(self, url):
        """
        url: str
            A sqlalchemy database url, e.g. sqlite:///../logs/runs.db
        """
        super().__init__(url)
        self.runs = Table(
            "runs", self.metadata,
            Column("id", Integer, primary_key=True, autoincrement=True),
            Column("timestamp", String(40), nullable=False),
            Column("mode", String(16), nullable=False),
            Column("workers", Integer, nullable=False),
            Column("total_triples", BigInteger, nullable=False),
            Column("wall_seconds", Float, nullable=False),
            Column("aggregate_updates_per_second", BigInteger, nullable=False),
            Column("config", Text, nullable=False),
        )
        self.run_workers = Table(
            "run_workers", self.metadata,
            Column("run_id", Integer, ForeignKey("runs.id", ondelete="CASCADE"),
                   nullable=False),
            Column("worker_id", Integer, nullable=False),
            Column("triples_ingested", BigInteger, nullable=False),
            Column("wall_seconds", Float, nullable=False),
            Column("updates_per_second", BigInteger, nullable=False),
        )

    def add_report(self, report):
        """
        Records a reports.BenchReport and returns the new run id.
        """
        self.create_tables_if_needed()
        with self.engine.begin() as connection:
            result = connection.execute(self.runs.insert().values(
                timestamp=report.timestamp,
                mode=report.config.get("mode", ""),
                workers=len(report.workers),
                total_triples=report.total_triples(),
                wall_seconds=report.wall_seconds,
                aggregate_updates_per_second=report.aggregate_updates_per_second,
                config=json.dumps(report.config, sort_keys=True),
            ))
            run_id = result.inserted_primary_key[0]
            if report.workers:
                connection.execute(self.run_workers.insert(), [
                    {
                        "run_id": run_id,
                        "worker_id": worker.worker_id,
                        "triples_ingested": worker.triples_ingested,
                        "wall_seconds": worker.wall_seconds,
                        "updates_per_second": worker.updates_per_second,
                    }
                    for worker in report.workers
                ])
        logger.debug("Recorded run %s in %s", run_id, self.redacted_url())
        return run_id

    def read_runs(self, limit=10):
        """
        Returns the most recent runs, newest first, as namespaces with the
        runs table's columns (config decoded) and a worker_rows list.
        """
        self.create_tables_if_needed()
        select_runs = (sqlalchemy.select(self.runs)
                       .order_by(self.runs.c.id.desc())
                       .limit(limit))
        with self.engine.connect() as connection:
            runs = [types.SimpleNamespace(**row._asdict())
                    for row in connection.execute(select_runs)]
            for run in runs:
                run.config = json.loads(run.config)
                select_workers = (
                    sqlalchemy.select(self.run_workers)
                    .where(self.run_workers.c.run_id == run.id)
                    .order_by(self.run_workers.c.worker_id)
                )
                run.worker_rows = [types.SimpleNamespace(**row._asdict())
                               for row in connection.execute(select_workers)]
        return runs
