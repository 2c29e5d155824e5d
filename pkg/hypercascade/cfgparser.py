#!/usr/bin/env python3
# SPDX-License-Identifier: GPL-2.0-only

"""
Loads, fills in and validates the TOML configuration. Configuration files are
cascaded left to right; values missing from every file take the defaults
declared in base_validation_config.
"""

import argparse
import copy
import logging
import os
import re
import socket
import sys

import sqlalchemy
import toml

import bench
import database
import hierarchy
import hypersparse
import reports
import streamgen

logger = logging.getLogger("hypercascade_startup")

# Special variables that replace values in strings. The key is a regex
# whose first group is handed to the function returning the replacement.
special_vars = {
    r"(%H)": lambda _: socket.gethostname(),
    r"\$\{(\w+)\}": lambda var: os.environ.get(var, ""),
}


class Configuration(argparse.Namespace):
    """
    A simple object for storing a configuration.
    """

    def __init__(self, config):
        """
        config: dict
            The dictionary to initialize the config with.
        """
        self.add_subconfig(config)

    def add_subconfig(self, config):
        """
        Adds a (possibly nested) config dictionary as attributes.
        """
        for key, value in config.items():
            if isinstance(value, dict):
                setattr(self, key, Configuration(value))
            else:
                setattr(self, key, value)


# The global configuration used in different modules.
cfg = Configuration({})

# Settings that aren't meant to be configured.
shared = Configuration({
    "debuglog_prefix": "debug",
    "servicelog_prefix": "log",
    "log_datefmt": "%Y-%m-%d",
})


class ValidationProtocol():
    """
    How to validate a given item: allowed types, checks and a default.
    """

    def __init__(self, types, *validations, default_value=None):
        """
        types: tuple, type
            A tuple of types, or a single type, the value must be.
        *validations: Validate()
            Checks run against the value.
        default_value: object
            The value used when the configuration leaves it out.
        """
        self.types = types if isinstance(types, tuple) else tuple([types])
        self.default_value = default_value
        self.validations = list(validations)


class Validate():
    """
    A check that makes the configuration invalid when it fails.
    """

    def __init__(self, check, excuse, pedantic=False):
        """
        check: func
            Takes the value and returns whether it is valid.
        excuse: str
            Appended to the error message.
        pedantic: bool
            Whether the check looks at the host (files, directories) and can
            be skipped.
        """
        self.check = check
        self.err_message = "%s.%s = %s is not valid since it " + excuse
        self.pedantic = pedantic

    def log(self, context, key, value):
        logger.error(self.err_message % (context, key, value))


class ValidateRedactedURL(Validate):
    """
    Same as Validate, but redacts the value when logging.
    """

    def log(self, context, key, value):
        logger.error(self.err_message % (context, key,
                                         database.redacted_url(value)))


class Warn(Validate):
    """
    A check that only logs a warning when it fails.
    """

    def __init__(self, check, excuse, pedantic=False):
        super().__init__(check, "", pedantic=pedantic)
        self.err_message = "%s.%s = %s " + excuse

    def log(self, context, key, value):
        logger.warning(self.err_message % (context, key, value))


def check_exception(check, exception, *args, **kwargs):
    """
    Returns check(*args, **kwargs), or False if it raised the exception.

    check: func
        A function that returns whether the *args and **kwargs are valid.
    exception: Exception, (Exception, )
        A exception, or a tuple of exceptions, to catch.
    """
    try:
        return check(*args, **kwargs)
    except exception:
        return False


def one_of(choices):
    return Validate(
        lambda value: value in choices,
        "is not one of {}.".format(", ".join(str(c) for c in choices))
    )


def at_least(lowest):
    return Validate(
        lambda num: num >= lowest,
        "is not above (or equal) {}.".format(lowest)
    )


isaboveeq1 = at_least(1)
isaboveeq0 = at_least(0)
all_are_int = Validate(
    lambda items: all(isinstance(item, int) for item in items),
    "is not all ints."
)
all_are_positive = Validate(
    lambda items: all(item >= 1 for item in items),
    "is not all positive."
)
valid_dimension = Validate(
    lambda dim: check_exception(
        lambda d: hypersparse.check_dimension(d, "dimension") > 0,
        hypersparse.DimensionError, dim
    ),
    "is not in [1, 2**64 - 1]."
)
valid_cuts = Validate(
    lambda cuts: check_exception(
        lambda c: hierarchy.CutSchedule(c) is not None,
        hierarchy.CutScheduleError, cuts
    ),
    "is not a strictly increasing list of positive ints."
)
valid_skew = Validate(
    lambda skew: check_exception(
        lambda s: streamgen.StreamConfig(skew=s) is not None,
        (streamgen.StreamConfigError, TypeError, ValueError), skew
    ),
    "is not 4 probabilities (a, b, c, d) that sum to 1 with a the largest."
)
valid_scale = Validate(
    lambda scale: 1 <= scale <= 63,
    "is not in [1, 63]."
)
valid_seed = Validate(
    lambda seed: 0 <= seed <= hypersparse.UINT64_MAX,
    "is not an unsigned 64-bit integer."
)
dir_exists = Warn(
    lambda path: os.path.isdir(path) and os.access(path, os.W_OK),
    "is not a writable directory; logs will not be written to files.",
    pedantic=True
)
valid_sqlalchemy_url = ValidateRedactedURL(
    lambda url: (
        check_exception(
            lambda u: sqlalchemy.engine.make_url(u) is not None,
            sqlalchemy.exc.ArgumentError, url
        )
        if url != "" else True
    ),
    "appears that the sqlalchemy url (RFC 1738 format) is not valid. See "
    "https://docs.sqlalchemy.org/en/20/core/engines.html#database-urls for "
    "more information."
)

# Stores the validation protocols, layout and defaults of the configuration.
base_validation_config = {
    "general": {
        "log_location": ValidationProtocol(
            str,
            dir_exists,
            default_value="../logs/%H"
        ),
        "log_rotate_period": ValidationProtocol(
            int,
            isaboveeq1,
            default_value=7
        ),
    },
    "matrix": {
        "nrows": ValidationProtocol(int, valid_dimension, default_value=2**32),
        "ncols": ValidationProtocol(int, valid_dimension, default_value=2**32),
        "value_type": ValidationProtocol(
            str,
            one_of(("int64", "float64")),
            default_value="int64"
        ),
    },
    "hierarchy": {
        "cuts": ValidationProtocol(
            list,
            all_are_int,
            valid_cuts,
            default_value=list(hierarchy.DEFAULT_CUTS)
        ),
    },
    "stream": {
        "scale": ValidationProtocol(int, valid_scale, default_value=32),
        "skew": ValidationProtocol(
            list,
            valid_skew,
            default_value=list(streamgen.DEFAULT_SKEW)
        ),
        "batch_size": ValidationProtocol(int, isaboveeq1,
                                         default_value=100000),
        "num_batches": ValidationProtocol(int, isaboveeq1, default_value=1000),
        "seed": ValidationProtocol(int, valid_seed, default_value=1),
        "value_mode": ValidationProtocol(
            str,
            one_of(streamgen.VALUE_MODES),
            default_value="ones"
        ),
    },
    "bench": {
        "workers": ValidationProtocol(int, isaboveeq1, default_value=1),
        "batches": ValidationProtocol(int, isaboveeq1, default_value=100),
        "warmup": ValidationProtocol(int, isaboveeq0, default_value=10),
        "mode": ValidationProtocol(
            str,
            one_of(bench.MODES),
            default_value="hierarchical"
        ),
        "pregen": ValidationProtocol(bool, default_value=True),
        "format": ValidationProtocol(
            str,
            one_of(reports.FORMATS),
            default_value="json"
        ),
        "output": ValidationProtocol(str, default_value=""),
        "digest": ValidationProtocol(bool, default_value=False),
        "scaling_workers": ValidationProtocol(
            list,
            all_are_int,
            all_are_positive,
            default_value=[]
        ),
        "plot_location": ValidationProtocol(str, default_value=""),
    },
    "ingest": {
        "batch_size": ValidationProtocol(int, isaboveeq1,
                                         default_value=100000),
        "top_k": ValidationProtocol(int, isaboveeq0, default_value=10),
    },
    "verify": {
        "max_triples": ValidationProtocol(int, isaboveeq1,
                                          default_value=1000000),
        "scale": ValidationProtocol(int, valid_scale, default_value=20),
        "batch_size": ValidationProtocol(int, isaboveeq1, default_value=10000),
        "batches": ValidationProtocol(int, isaboveeq1, default_value=50),
    },
    "database": {
        "report_url": ValidationProtocol(
            str,
            valid_sqlalchemy_url,
            # if blank, no history is recorded
            default_value=""
        ),
    },
}


def check_config(config, pedantic=True):
    """
    Returns whether the config is valid. Passing this function indicates that
    cfg can be set and used.

    config: dict
        The dictionary checked.
    pedantic: bool
        Whether or not to include pedantic checks.
    """
    return valid_config_values(config, pedantic=pedantic)


def place_optional_values(config, validation_config=base_validation_config):
    """
    Places default values (and missing sections) in the config if they are
    not overriden.
    """
    for key, value, context in context_iter(validation_config):
        inner_config = config
        for child in context:
            inner_config = inner_config.setdefault(child, {})
        if key not in inner_config:
            inner_config[key] = copy.deepcopy(value.default_value)


def place_special_vars(config):
    """
    Substitutes special variables in every string of the config.
    """
    for key, value, context in context_iter(copy.deepcopy(config)):
        if not isinstance(value, str):
            continue
        for var, repl_func in special_vars.items():
            value = re.sub(var, lambda match: repl_func(match.group(1)), value)
        context_insert(value, config, context + [key])


def valid_config_values(config, validation_config=base_validation_config,
                        context="", pedantic=True):
    """
    Validates a config against validation_config, checking value types and
    running each value's checks. Unknown keys are warned about and ignored.

    context: str
        The parent keys joined with dots.
    """
    isvalid = True
    for key, value in config.items():
        parent = context + "." + key if context != "" else key
        if key not in validation_config:
            logger.warning("Unrecognized variable '%s.%s = %s'. Will be "
                           "ignored", context, key, value)
        elif isinstance(validation_config[key], dict):
            if not isinstance(value, dict):
                logger.error("'%s' should be a section, not %s", parent,
                             value)
                isvalid = False
            elif not valid_config_values(value, validation_config[key],
                                         parent, pedantic=pedantic):
                isvalid = False
        elif not valid_value(validation_config, key, value, context,
                             pedantic=pedantic):
            isvalid = False
    return isvalid


def valid_value(validation_config, key, value, context, pedantic=True):
    """
    Checks the value's type and runs its checks, returning whether the value
    is usable.
    """
    validation_protocol = validation_config[key]
    types = validation_protocol.types
    # bool is an int subclass; keep true/false out of numeric settings
    if (not isinstance(value, types)
            or (isinstance(value, bool) and bool not in types)):
        logger.error(
            "Invalid type in variable '%s.%s = %s'. Allowed Types: %s",
            context,
            key,
            value,
            ", ".join(t.__name__ for t in types),
        )
        return False
    for validity_check in validation_protocol.validations:
        if not pedantic and validity_check.pedantic:
            continue
        if validity_check.check(value) is not True:
            validity_check.log(context, key, value)
            # If it's only a warning, don't die
            if isinstance(validity_check, Warn):
                continue
            return False
    return True


def context_iter(dictionary, context=()):
    """
    Iterates through a nested dictionary, yielding each leaf's key, value
    and the list of parent keys.
    """
    for key, value in dictionary.items():
        if isinstance(value, dict):
            yield from context_iter(value, list(context) + [key])
        else:
            yield key, value, list(context)


def context_insert(item, dictionary, context):
    """
    Sets the value found by following the context's keys.
    """
    key = context.pop(0)
    if context:
        context_insert(item, dictionary[key], context)
    else:
        dictionary[key] = item


def merge_dicts(first_dict, second_dict):
    """
    Update two dicts of dicts recursively, if either mapping has leaves that
    are non-dicts, the second's leaf overwrites the first's.
    """
    for k, v in first_dict.items():
        if k in second_dict and all(isinstance(e, dict) for e in (v, second_dict[k])):
            second_dict[k] = merge_dicts(v, second_dict[k])
    new_dict = first_dict.copy()
    new_dict.update(second_dict)
    return new_dict


def combine_toml(*files):
    """
    Combine the toml files together into a single configuration that is
    returned.

    files: str
        A series of paths to toml files.
    """
    resulting_config = {}
    for config in files:
        resulting_config = merge_dicts(resulting_config, toml.load(config))
    return resulting_config


def load_config(*config_files, check=True, pedantic=True):
    """
    Attempts to load the given configuration files into cfg and returns
    whether it was successful in doing so. May raise TypeError, OSError or
    toml.decoder.TomlDecodeError.

    config_files: str
        A series of paths to configuration files (toml).
    check: bool
        Whether or not to check the configuration for problems.
    pedantic: bool
        Whether or not to include checks that look at the host.
    """
    config = combine_toml(*config_files)
    place_optional_values(config)
    place_special_vars(config)
    if check and not check_config(config, pedantic=pedantic):
        return False

    cfg.add_subconfig(config)
    return True


def arguments():
    desc = "Check for errors or print the resulting config.toml."
    parser = argparse.ArgumentParser(description=desc)
    parser.add_argument(
        "configs",
        type=str,
        nargs="+",
        help="The configuration files to use. Configs will be cascaded "
             "together starting at the leftmost (the primary config) going "
             "right (the overwriting configs).",
    )
    parser.add_argument(
        "--print",
        "-p",
        dest="print",
        action="store_true",
        help="Print out the interpreted toml file, defaults included.",
    )
    parser.add_argument(
        "--non-pedantic",
        dest="pedantic",
        action="store_false",
        help="Skip pedantic tests like directories existing."
    )
    return parser.parse_args()


if __name__ == "__main__":
    args = arguments()
    logging.basicConfig(level=logging.INFO)
    if args.print:
        resulting_config = combine_toml(*args.configs)
        place_optional_values(resulting_config)
        place_special_vars(resulting_config)
        print(toml.dumps(resulting_config))
    elif load_config(*args.configs, pedantic=args.pedantic) is not True:
        sys.exit(2)
