# SPDX-License-Identifier: GPL-2.0-only

"""
The streaming-insert benchmark: W independent worker processes, each owning
a private HierarchicalMatrix and a disjoint slice of a shared power-law
stream, started together and timed with a common monotonic clock.

Batch indices [0, warmup) are ingested by every worker before timing starts.
The timed indices [warmup, num_batches) are split into W contiguous slices
whose sizes differ by at most one. With pre-generation (the default) each
worker builds its slice in memory before the start barrier, so only
insertion is timed; otherwise generation happens inside the timed loop.
"""

import dataclasses
import logging
import multiprocessing
import os
import queue
import threading
import traceback
import types

import hierarchy
import monoids
import plots
import reports
import streamgen
import timers

logger = logging.getLogger("hypercascade." + __name__)

MODES = ("hierarchical", "flat")


class BenchConfigError(ValueError):
    """
    Raised for a benchmark configuration that can't be run.
    """


class WorkerError(RuntimeError):
    """
    Raised when a worker fails; carries the worker's traceback text.
    """

    def __init__(self, worker_id, traceback_text):
        last_line = traceback_text.strip().splitlines()[-1:] or ["unknown"]
        super().__init__("worker {} failed: {}".format(worker_id,
                                                       last_line[0]))
        self.worker_id = worker_id
        self.traceback_text = traceback_text


def default_stream():
    return streamgen.StreamConfig(num_batches=100)


@dataclasses.dataclass
class BenchConfig:
    workers: int = 1
    stream: streamgen.StreamConfig = dataclasses.field(
        default_factory=default_stream
    )
    cuts: hierarchy.CutSchedule = dataclasses.field(
        default_factory=hierarchy.CutSchedule
    )
    mode: str = "hierarchical"
    warmup_batches: int = 10
    pregen: bool = True
    digest: bool = False
    output_path: str = ""
    fmt: str = "json"
    value_type: str = "int64"

    def validate(self):
        """
        Raises BenchConfigError if the benchmark can't be run as configured.
        """
        if self.workers < 1:
            raise BenchConfigError("workers = {} must be at least 1".format(
                self.workers
            ))
        if self.mode not in MODES:
            raise BenchConfigError("mode = {!r} must be one of {}".format(
                self.mode, ", ".join(MODES)
            ))
        if self.fmt not in reports.FORMATS:
            raise BenchConfigError("format = {!r} must be one of {}".format(
                self.fmt, ", ".join(reports.FORMATS)
            ))
        if not 0 <= self.warmup_batches < self.stream.num_batches:
            raise BenchConfigError(
                "warmup = {} must be in [0, batches = {})".format(
                    self.warmup_batches, self.stream.num_batches
                )
            )
        timed = self.stream.num_batches - self.warmup_batches
        if self.workers > timed:
            raise BenchConfigError(
                "{} workers can't share {} timed batches; every worker needs "
                "at least one".format(self.workers, timed)
            )
        try:
            monoids.for_value_type(self.value_type)
        except ValueError as err:
            raise BenchConfigError(str(err)) from None

    def effective_cuts(self):
        """
        Returns the cut schedule the workers use: none for the flat baseline.
        """
        if self.mode == "flat":
            return hierarchy.CutSchedule(())
        return self.cuts

    def timed_batches(self):
        return self.stream.num_batches - self.warmup_batches

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        """
        Returns the configuration echo carried by reports.
        """
        return {
            "workers": self.workers,
            "mode": self.mode,
            "cuts": list(self.effective_cuts()),
            "warmup_batches": self.warmup_batches,
            "pregen": self.pregen,
            "digest": self.digest,
            "value_type": self.value_type,
            "stream": self.stream.as_dict(),
        }


def assign_batches(num_batches, warmup, workers):
    """
    Splits the timed batch indices [warmup, num_batches) into `workers`
    contiguous ranges whose lengths differ by at most one.

    >>> assign_batches(10, 2, 3)
    [range(2, 5), range(5, 8), range(8, 10)]
    """
    base, extra = divmod(num_batches - warmup, workers)
    slices = []
    start = warmup
    for worker_id in range(workers):
        size = base + (1 if worker_id < extra else 0)
        slices.append(range(start, start + size))
        start += size
    return slices


def new_matrix(cfg):
    """
    Returns an empty hierarchy shaped for the configured stream.
    """
    dimension = cfg.stream.dimension()
    return hierarchy.HierarchicalMatrix(
        dimension, dimension, cfg.effective_cuts(),
        monoids.for_value_type(cfg.value_type)
    )


def ingest_worker(cfg, worker_id, indices, barrier=None):
    """
    Runs one worker in the calling process and returns its WorkerResult.
    started_at and finished_at hold raw monotonic readings; run_bench turns
    them into offsets.

    cfg: BenchConfig
        The benchmark being run.
    worker_id: int
        This worker's number.
    indices: range
        The timed batch indices assigned to this worker.
    barrier: multiprocessing.Barrier, None
        Waited on after warmup so every worker starts timing together.
    """
    stream = cfg.stream
    matrix = new_matrix(cfg)
    for batch in streamgen.iter_batches(stream, range(cfg.warmup_batches)):
        matrix.update(batch)

    batches = None
    if cfg.pregen:
        batches = list(streamgen.iter_batches(stream, indices))
    logger.debug("Worker %s ready with batches [%s, %s)", worker_id,
                 indices.start, indices.stop)
    if barrier is not None:
        barrier.wait()

    started = timers.now()
    if batches is not None:
        for batch in batches:
            matrix.update(batch)
    else:
        for batch in streamgen.iter_batches(stream, indices):
            matrix.update(batch)
    finished = timers.now()

    ingested = len(indices) * stream.batch_size
    result = reports.WorkerResult(
        worker_id=worker_id,
        triples_ingested=ingested,
        wall_seconds=finished - started,
        updates_per_second=timers.rate(ingested, finished - started),
        started_at=started,
        finished_at=finished,
        cascade_stats=matrix.stats().as_dict(),
        layer_nnz=matrix.layer_nnz(),
    )
    if cfg.digest:
        final = matrix.flatten()
        result.final_nnz = final.nnz()
        result.final_value_sum = final.value_sum()
        result.final_digest = final.digest()
    return result


def _worker_main(cfg, worker_id, indices, barrier, results):
    try:
        result = ingest_worker(cfg, worker_id, indices, barrier)
    except threading.BrokenBarrierError:
        results.put(("aborted", worker_id, traceback.format_exc()))
    except BaseException:
        barrier.abort()
        results.put(("error", worker_id, traceback.format_exc()))
    else:
        results.put(("ok", worker_id, result))


def _drain(results, messages):
    while True:
        try:
            status, worker_id, payload = results.get_nowait()
        except queue.Empty:
            return
        messages[worker_id] = (status, payload)


def _exit_description(exitcode):
    if exitcode is not None and exitcode < 0:
        return "killed by signal {} before reporting".format(-exitcode)
    return "exited with code {} before reporting".format(exitcode)


def _collect(processes, results, barrier):
    """
    Gathers one message per worker. A worker that exits without reporting
    (killed by a signal, say) never reaches the barrier, so the barrier is
    aborted and the remaining workers are stopped.
    """
    messages = {}
    lost = []
    while len(messages) < len(processes):
        try:
            status, worker_id, payload = results.get(timeout=1.0)
        except queue.Empty:
            exited = [worker_id for worker_id, process in enumerate(processes)
                      if process.exitcode is not None]
            # an exited worker's last message is already in the pipe
            _drain(results, messages)
            lost = [worker_id for worker_id in exited
                    if worker_id not in messages]
            if lost:
                logger.error("Worker(s) %s exited without reporting; "
                             "stopping the run", lost)
                barrier.abort()
                for process in processes:
                    if process.is_alive():
                        process.terminate()
                break
            continue
        messages[worker_id] = (status, payload)
    for process in processes:
        process.join()

    # Workers behind a broken barrier report "aborted"; raise the failure
    # that broke it
    failures = [(worker_id, payload)
                for worker_id, (status, payload) in sorted(messages.items())
                if status == "error"]
    if failures:
        raise WorkerError(*failures[0])
    if lost:
        raise WorkerError(lost[0],
                          _exit_description(processes[lost[0]].exitcode))
    for worker_id, process in enumerate(processes):
        if worker_id not in messages:
            raise WorkerError(worker_id,
                              _exit_description(process.exitcode))
        if messages[worker_id][0] != "ok":
            raise WorkerError(worker_id, messages[worker_id][1])
    return [payload for _, (status, payload) in sorted(messages.items())]


def _as_offsets(results):
    """
    Rewrites raw monotonic start and finish readings as offsets from the
    earliest start.
    """
    earliest = min(result.started_at for result in results)
    for result in results:
        result.started_at -= earliest
        result.finished_at -= earliest
    return results


def run_bench(cfg, record=None):
    """
    Runs the benchmark and returns its BenchReport, writing it to
    cfg.output_path when set. Raises BenchConfigError for an invalid
    configuration and WorkerError if any worker fails, in which case no
    report is written.

    cfg: BenchConfig
        The benchmark to run.
    record: reportdb.ReportDB, None
        Run history the report is appended to.
    """
    cfg.validate()
    slices = assign_batches(cfg.stream.num_batches, cfg.warmup_batches,
                            cfg.workers)
    logger.info("Starting %s worker(s): %s mode, %s timed batches of %s, "
                "%s warmup, cuts %s", cfg.workers, cfg.mode,
                cfg.timed_batches(), cfg.stream.batch_size,
                cfg.warmup_batches, list(cfg.effective_cuts()))

    context = multiprocessing.get_context()
    barrier = context.Barrier(cfg.workers)
    results = context.Queue()
    processes = [
        context.Process(target=_worker_main,
                        args=(cfg, worker_id, indices, barrier, results),
                        name="hypercascade-worker-{}".format(worker_id))
        for worker_id, indices in enumerate(slices)
    ]
    for process in processes:
        process.start()
    try:
        workers = _collect(processes, results, barrier)
    except WorkerError:
        for process in processes:
            if process.is_alive():
                process.terminate()
        raise

    report = reports.BenchReport.from_workers(cfg.as_dict(),
                                              _as_offsets(workers))
    logger.info("Ingested %s triples in %.3f s: %s updates/s",
                report.total_triples(), report.wall_seconds,
                report.aggregate_updates_per_second)
    if cfg.output_path:
        reports.emit_report(report, cfg.fmt, cfg.output_path)
    if record is not None:
        record.add_report(report)
    return report


def usable_cpus():
    """
    Returns the number of CPUs this process may run on.
    """
    if hasattr(os, "sched_getaffinity"):
        return len(os.sched_getaffinity(0))
    return os.cpu_count() or 1


def default_worker_counts(limit=None):
    """
    Returns 1, 2, 4, ... up to limit (the usable CPU count by default),
    always ending with limit itself.
    """
    limit = limit or usable_cpus()
    counts = []
    count = 1
    while count < limit:
        counts.append(count)
        count *= 2
    counts.append(limit)
    return counts


def run_scaling(cfg, worker_counts=None, plot_path="", record=None):
    """
    Runs the benchmark once per worker count and returns a namespace with
    the reports and an efficiency table. Every worker ingests the same
    number of timed batches at every count (cfg's timed batches), so ideal
    scaling doubles the aggregate rate when the worker count doubles.

    cfg: BenchConfig
        The per-worker workload; cfg.workers is ignored.
    worker_counts: [int, ]
        Worker counts to measure; defaults to default_worker_counts().
    plot_path: str
        Where to save a plot of the rate against worker count, if anywhere.
    """
    worker_counts = sorted(set(worker_counts or default_worker_counts()))
    if worker_counts[0] < 1:
        raise BenchConfigError("worker counts must be positive")
    per_worker = cfg.timed_batches()
    if per_worker < 1:
        raise BenchConfigError("warmup = {} leaves no timed batches".format(
            cfg.warmup_batches
        ))

    runs = []
    for count in worker_counts:
        stream = cfg.stream.replace(
            num_batches=cfg.warmup_batches + per_worker * count
        )
        runs.append(run_bench(cfg.replace(workers=count, stream=stream,
                                          output_path=""), record))

    single_rate = runs[0].aggregate_updates_per_second / worker_counts[0]
    table = []
    for count, report in zip(worker_counts, runs):
        rate = report.aggregate_updates_per_second
        efficiency = rate / (count * single_rate) if single_rate else 0.0
        table.append({"workers": count, "updates_per_second": rate,
                      "efficiency": efficiency})
        logger.info("%s worker(s): %s updates/s, efficiency %.2f", count,
                    rate, efficiency)

    if plot_path:
        plots.make_scaling_plot(
            plot_path,
            "Update rate, scale {} stream".format(cfg.stream.scale),
            [row["workers"] for row in table],
            [row["updates_per_second"] for row in table],
            [row["efficiency"] for row in table],
        )
    return types.SimpleNamespace(reports=runs, table=table)
