# SPDX-License-Identifier: GPL-2.0-only

"""
Runs the hypercascade subcommands once the configuration and logging are set
up, and maps their failures onto exit codes:

    0  success
    1  verification mismatch
    2  configuration error
    3  I/O error (unreadable or malformed input, values that overflow while
       ingesting, unwritable output, database)
    4  a benchmark worker failed
"""

import logging
import sys

from cfgparser import cfg
import bench
import database
import edgelist
import hierarchy
import hypersparse
import ingest
import reportdb
import reports
import streamgen
import verify

logger = logging.getLogger("hypercascade." + __name__)
service_logger = logging.getLogger("hypercascade_service")

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_WORKER = 4

config_errors = (
    hierarchy.CutScheduleError,
    streamgen.StreamConfigError,
    bench.BenchConfigError,
    hypersparse.DimensionError,
)
io_errors = (OSError, edgelist.EdgeListError) + database.common_db_errors


def run(args):
    """
    Runs the subcommand named by args.command and returns the exit code.
    """
    try:
        return runners[args.command](args)
    except config_errors as err:
        logger.error("Configuration error: %s", err)
        return EXIT_CONFIG
    except io_errors as err:
        logger.error("I/O error: %s", err)
        return EXIT_IO
    except bench.WorkerError as err:
        logger.error("%s\n%s", err, err.traceback_text)
        return EXIT_WORKER


def parse_list(text, cast, name):
    """
    Parses "a,b,c" into a list of cast values; "" is an empty list.
    """
    text = text.strip()
    if not text:
        return []
    try:
        return [cast(item.strip()) for item in text.split(",")]
    except ValueError:
        raise bench.BenchConfigError("{} {!r} is not a comma separated list "
                                     "of {}s".format(name, text,
                                                     cast.__name__)) from None


def parse_dims(text):
    dims = parse_list(text, int, "--dims")
    if len(dims) != 2:
        raise bench.BenchConfigError("--dims {!r} should be ROWS,COLS".format(
            text
        ))
    return tuple(hypersparse.check_dimension(d, "dims") for d in dims)


def cut_schedule(args):
    if getattr(args, "cuts", None) is not None:
        return hierarchy.CutSchedule.parse(args.cuts)
    return hierarchy.CutSchedule(cfg.hierarchy.cuts)


def _override(value, fallback):
    return fallback if value is None else value


def stream_config(args, scale=None, batch_size=None, num_batches=None):
    """
    Returns the StreamConfig described by the [stream] section, the given
    section-specific defaults and any command line overrides.
    """
    skew = cfg.stream.skew
    if getattr(args, "skew", None) is not None:
        skew = parse_list(args.skew, float, "--skew")
    return streamgen.StreamConfig(
        scale=_override(args.scale, _override(scale, cfg.stream.scale)),
        skew=skew,
        batch_size=_override(args.batch_size,
                             _override(batch_size, cfg.stream.batch_size)),
        num_batches=_override(args.batches,
                              _override(num_batches, cfg.stream.num_batches)),
        seed=_override(args.seed, cfg.stream.seed),
        value_mode=_override(args.value_mode, cfg.stream.value_mode),
    )


def bench_config(args):
    """
    Returns the BenchConfig for the bench and scale subcommands.
    """
    return bench.BenchConfig(
        workers=_override(getattr(args, "workers", None), cfg.bench.workers),
        stream=stream_config(args, num_batches=cfg.bench.batches),
        cuts=cut_schedule(args),
        mode=_override(args.mode, cfg.bench.mode),
        warmup_batches=_override(args.warmup, cfg.bench.warmup),
        pregen=_override(args.pregen, cfg.bench.pregen),
        digest=args.digest or cfg.bench.digest,
        output_path=_override(getattr(args, "output", None), cfg.bench.output),
        fmt=_override(getattr(args, "format", None), cfg.bench.format),
        value_type=cfg.matrix.value_type,
    )


def report_db():
    """
    Returns the run history database, or None when none is configured.
    """
    if not cfg.database.report_url:
        return None
    return reportdb.ReportDB(cfg.database.report_url)


def run_bench(args):
    bench_cfg = bench_config(args)
    history = report_db()
    try:
        report = bench.run_bench(bench_cfg, record=history)
    finally:
        if history is not None:
            history.dispose()
    if not bench_cfg.output_path:
        reports.write_report(report, bench_cfg.fmt, sys.stdout)
    service_logger.info("bench: %s worker(s), %s mode, %s triples in %.3f s, "
                        "%s updates/s", len(report.workers), bench_cfg.mode,
                        report.total_triples(), report.wall_seconds,
                        report.aggregate_updates_per_second)
    return EXIT_OK


def run_scale(args):
    bench_cfg = bench_config(args)
    counts = None
    if args.workers_list is not None:
        counts = parse_list(args.workers_list, int, "--workers-list")
    counts = counts or cfg.bench.scaling_workers or None
    plot_path = _override(args.plot, cfg.bench.plot_location)
    history = report_db()
    try:
        scaling = bench.run_scaling(bench_cfg, counts, plot_path, history)
    finally:
        if history is not None:
            history.dispose()
    print("{:>8} {:>16} {:>10}".format("workers", "updates/s", "efficiency"))
    for row in scaling.table:
        print("{workers:>8} {updates_per_second:>16} {efficiency:>10.2f}".format(
            **row
        ))
    service_logger.info("scale: %s", ", ".join(
        "{workers}:{updates_per_second}".format(**row)
        for row in scaling.table
    ))
    return EXIT_OK


def run_verify(args):
    stream = stream_config(args, scale=cfg.verify.scale,
                           batch_size=cfg.verify.batch_size,
                           num_batches=cfg.verify.batches)
    result = verify.run_verify(stream, cut_schedule(args),
                               cfg.matrix.value_type, cfg.verify.max_triples)
    for line in result.describe():
        print(line)
    service_logger.info("verify: %s, %s triples, cuts %s",
                        "pass" if result.passed else "FAIL", result.triples,
                        result.cuts)
    return EXIT_OK if result.passed else EXIT_MISMATCH


def run_ingest(args):
    dims = (cfg.matrix.nrows, cfg.matrix.ncols)
    if args.dims is not None:
        dims = parse_dims(args.dims)
    cuts = cut_schedule(args)
    try:
        summary = ingest.run_ingest(
            args.path, cuts, dims,
            batch_size=_override(args.batch_size, cfg.ingest.batch_size),
            top_k=_override(args.top_k, cfg.ingest.top_k),
        )
    except (hypersparse.IndexOutOfBounds, hypersparse.ValueOverflow) as err:
        logger.error("I/O error: %s", err)
        return EXIT_IO
    for line in summary.describe():
        print(line)
    service_logger.info("ingest: %s, %s triples, nnz %s, %s updates/s",
                        summary.path, summary.triples, summary.nnz,
                        summary.updates_per_second)
    return EXIT_OK


def run_gen(args):
    stream = stream_config(args)
    written = streamgen.dump_stream(stream, args.path)
    print("{} triples written to {}".format(written, args.path))
    service_logger.info("gen: %s triples to %s", written, args.path)
    return EXIT_OK


def run_history(args):
    history = report_db()
    if history is None:
        logger.error("Configuration error: database.report_url is not set")
        return EXIT_CONFIG
    try:
        runs = history.read_runs(args.limit)
    finally:
        history.dispose()
    for run in runs:
        print("{} {} {:>3} worker(s) {:>12} triples {:>10.3f} s {:>14} "
              "updates/s".format(run.timestamp, run.mode, run.workers,
                                 run.total_triples, run.wall_seconds,
                                 run.aggregate_updates_per_second))
    return EXIT_OK


runners = {
    "bench": run_bench,
    "scale": run_scale,
    "verify": run_verify,
    "ingest": run_ingest,
    "gen": run_gen,
    "history": run_history,
}
