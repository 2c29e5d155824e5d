#!/usr/bin/env python3
# SPDX-License-Identifier: GPL-2.0-only

"""
A starting wrapper around main.py that gets arguments, loads the
configuration and sets up logging.
"""

import argparse
import logging
import os
import sys

import toml

import cfgparser
import logger

startup_logger = logging.getLogger("hypercascade_startup")
service_logger = logging.getLogger("hypercascade_service")
debug_logger = logging.getLogger("hypercascade")


def parse_bool(text):
    """
    Parses true/false style command line values.
    """
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise argparse.ArgumentTypeError("expected true or false, got {!r}".format(
        text
    ))


def stream_options():
    """
    Returns a parent parser with the flags that describe a generated stream.
    Unset flags fall back to the configuration.
    """
    parser = argparse.ArgumentParser(add_help=False)
    stream = parser.add_argument_group("stream")
    stream.add_argument("--scale",
                        type=int,
                        metavar="B",
                        help="Generate row and column indices in [0, 2**B).",
                        dest="scale")
    stream.add_argument("--skew",
                        type=str,
                        metavar="a,b,c,d",
                        help="R-MAT quadrant probabilities; a must be the "
                             "largest and they must sum to 1.",
                        dest="skew")
    stream.add_argument("--batch-size",
                        type=int,
                        metavar="N",
                        help="Triples per batch (per update call).",
                        dest="batch_size")
    stream.add_argument("--batches",
                        type=int,
                        metavar="N",
                        help="Number of batches in the stream, warmup "
                             "included.",
                        dest="batches")
    stream.add_argument("--seed",
                        type=int,
                        metavar="S",
                        help="The stream's seed; equal seeds give identical "
                             "streams.",
                        dest="seed")
    stream.add_argument("--value-mode",
                        choices=("ones", "random"),
                        help="Store 1 per triple, or a random value in "
                             "[1, 1024].",
                        dest="value_mode")
    return parser


def cuts_option():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--cuts",
                        type=str,
                        metavar="c1,c2,...",
                        help="Strictly increasing layer thresholds; an empty "
                             "string gives a single layer.",
                        dest="cuts")
    return parser


def bench_options():
    """
    Returns a parent parser with the flags shared by bench and scale.
    """
    parser = argparse.ArgumentParser(add_help=False)
    run = parser.add_argument_group("benchmark")
    run.add_argument("--warmup",
                     type=int,
                     metavar="N",
                     help="Batches every worker ingests before timing "
                          "starts.",
                     dest="warmup")
    run.add_argument("--mode",
                     choices=("hierarchical", "flat"),
                     help="Use the hierarchy, or a single layer as the flat "
                          "baseline.",
                     dest="mode")
    run.add_argument("--pregen",
                     type=parse_bool,
                     metavar="true|false",
                     help="Generate each worker's batches before timing "
                          "(true) or inside the timed loop (false).",
                     dest="pregen")
    run.add_argument("--digest",
                     action="store_true",
                     help="Flatten every worker's matrix after timing and "
                          "report its nnz, value sum and digest.",
                     dest="digest")
    return parser


def arguments(argv=None):
    """
    Defines the arguments that hypercascade takes in and returns them.
    """
    desc = ("Hierarchical hypersparse matrices: streaming-insert benchmark, "
            "edge list ingest and correctness checks.")
    parser = argparse.ArgumentParser(description=desc)
    parser.add_argument("-p", "--print",
                        action="store_true",
                        help="Print out the application logging to stderr. "
                             "Logs are also written to the configured "
                             "log_location when it is writable.",
                        dest="print_logs")
    parser.add_argument("--version",
                        action="store_true",
                        help="Show version information and exit.",
                        dest="version")
    env = parser.add_mutually_exclusive_group()
    env.add_argument("-q", "--quiet",
                     action="store_true",
                     help="Only outputs critical information to stderr if "
                          "the -p flag is used. Startup logging ignores "
                          "this.",
                     dest="quiet")
    env.add_argument("-v", "--verbose",
                     action="store_true",
                     help="Turns on debugging output to stderr if the -p "
                          "flag is used.",
                     dest="verbose")
    parser.add_argument("-g", "--config",
                        type=str,
                        nargs="+",
                        default=["../etc/config.toml"],
                        help="The configuration files to use. Configs will "
                             "be cascaded together starting at the leftmost "
                             "(the primary config) going right (the "
                             "overwriting configs).",
                        dest="configs")

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    stream, cuts, run = stream_options(), cuts_option(), bench_options()

    bench = commands.add_parser(
        "bench", parents=[stream, cuts, run],
        help="Run the multi-worker streaming-insert benchmark."
    )
    bench.add_argument("--workers",
                       type=int,
                       metavar="N",
                       help="Number of worker processes.",
                       dest="workers")
    bench.add_argument("--output",
                       type=str,
                       metavar="PATH",
                       help="Write the report here instead of stdout.",
                       dest="output")
    bench.add_argument("--format",
                       choices=("json", "csv"),
                       help="The report format.",
                       dest="format")

    scale = commands.add_parser(
        "scale", parents=[stream, cuts, run],
        help="Run the benchmark at several worker counts and report the "
             "parallel efficiency."
    )
    scale.add_argument("--workers-list",
                       type=str,
                       metavar="1,2,4",
                       help="Worker counts to measure. Defaults to powers of "
                            "two up to the usable CPU count.",
                       dest="workers_list")
    scale.add_argument("--plot",
                       type=str,
                       metavar="PATH",
                       help="Save a plot of update rate against worker "
                            "count.",
                       dest="plot")

    commands.add_parser(
        "verify", parents=[stream, cuts],
        help="Check a hierarchy against the flat oracle on a small stream."
    )

    ingest = commands.add_parser(
        "ingest", parents=[cuts],
        help="Ingest a TSV edge list and summarize it."
    )
    ingest.add_argument("path", help="The row<TAB>col<TAB>value file.")
    ingest.add_argument("--dims",
                        type=str,
                        metavar="R,C",
                        help="The matrix's rows and columns.",
                        dest="dims")
    ingest.add_argument("--batch-size",
                        type=int,
                        metavar="N",
                        help="Lines per update.",
                        dest="batch_size")
    ingest.add_argument("--top-k",
                        type=int,
                        metavar="K",
                        help="How many of the largest row and column sums to "
                             "print.",
                        dest="top_k")

    gen = commands.add_parser(
        "gen", parents=[stream],
        help="Write a generated stream to a TSV edge list."
    )
    gen.add_argument("path", help="The file to write.")

    history = commands.add_parser(
        "history",
        help="List the most recent benchmark runs recorded in the database."
    )
    history.add_argument("--limit",
                         type=int,
                         default=10,
                         metavar="N",
                         help="How many runs to list.",
                         dest="limit")

    args = parser.parse_args(argv)

    if args.version:
        version_file = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                    "version.txt")
        try:
            with open(version_file) as vf:
                print(vf.readline().strip())
        except FileNotFoundError:
            print("No version file found.")
            sys.exit(1)
        sys.exit(0)

    if args.command is None:
        parser.error("a command is required")
    return args


def setup_config(config_files):
    """
    Loads the given configs. If there is a problem, exits with a error code of
    2.

    config_files: iter
        A iterable of configuration files to load.
    """
    startup_logger.debug("Importing and validating configuration...")
    try:
        if not cfgparser.load_config(*config_files):
            startup_logger.error("There was a problem with the configuration. "
                                 "Please check above.")
            sys.exit(2)
    except (TypeError, OSError, toml.decoder.TomlDecodeError) as err:
        startup_logger.error("Configuration error: %s", str(err))
        sys.exit(2)


def setup_logging(args, cfg, shared):
    """
    Sets up logging for the rest of hypercascade based on the arguments and
    the configuration. File logging is skipped when log_location isn't a
    writable directory.

    args: argparse.Namespace
        The parsed arguments.
    cfg: cfgparser.Configuration()
        The configuration.
    shared: cfgparser.Configuration()
        The shared values.
    """
    stream_level = logger.stream_level(args.quiet, args.verbose)
    if args.print_logs:
        logger.add_stream(debug_logger, level=stream_level)
        logger.add_stream(service_logger, fmttr=logger.service_fmttr,
                          level=stream_level)

    log_location = cfg.general.log_location
    if not os.path.isdir(log_location):
        startup_logger.warning("%s directory does not exist; not logging to "
                               "files.", log_location)
        return
    if not os.access(log_location, os.W_OK):
        startup_logger.warning("Not enough permissions to write to %s; not "
                               "logging to files.", log_location)
        return

    logger.add_rotating_file(
        debug_logger,
        os.path.join(log_location, shared.debuglog_prefix),
        shared.log_datefmt + ".log",
        cfg.general.log_rotate_period,
        level=logging.DEBUG
    )
    logger.add_rotating_file(
        service_logger,
        os.path.join(log_location, shared.servicelog_prefix),
        shared.log_datefmt + ".log",
        cfg.general.log_rotate_period,
        fmttr=logger.service_fmttr,
        level=logging.INFO
    )
    level_str = logging.getLevelName(stream_level)
    startup_logger.debug("Operational logging (hypercascade.module) will be "
                         "sent to %s%s with a verbosity of %s.",
                         log_location,
                         " and stderr" if args.print_logs else "",
                         level_str)


def pre_run(args):
    """
    Makes preparations before main.run() is ran.
    """
    setup_config(args.configs)
    setup_logging(args, cfgparser.cfg, cfgparser.shared)


if __name__ == "__main__":
    args = arguments()
    pre_run(args)
    import main
    sys.exit(main.run(args))
