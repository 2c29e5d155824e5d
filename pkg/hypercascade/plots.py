# SPDX-License-Identifier: GPL-2.0-only

import logging
import matplotlib
import matplotlib.pyplot as plt
matplotlib.use("Agg")  # Required for hosts without a display

logger = logging.getLogger("hypercascade." + __name__)


def make_scaling_plot(filepath, title, workers, rates, efficiency=None):
    """
    Creates a plot of aggregate ingest rate against worker count, with the
    parallel efficiency on a second axis.

    filepath: str
        The name and path of the file to save to.
    title: str
        The title of the plot.
    workers: [int, ]
        Worker counts; the x-axis.
    rates: [int, ]
        Aggregate updates per second measured at each worker count.
    efficiency: [float, ], None
        rate / (workers * single worker rate) at each worker count.
    """
    if len(workers) < 2 or len(workers) != len(rates):
        logger.warning("Scaling plot could not be created from %s points",
                       len(workers))
        return False

    figure, rate_axis = plt.subplots(figsize=(7, 5))
    try:
        rate_axis.plot(workers, rates, marker="o", label="Measured")
        ideal = [rates[0] * count / workers[0] for count in workers]
        rate_axis.plot(workers, ideal, linestyle="--", color="grey",
                       label="Linear")
        rate_axis.set_xlabel("Workers")
        rate_axis.set_ylabel("Updates per second")
        rate_axis.set_title(title)
        rate_axis.set_xticks(workers)
        rate_axis.legend(frameon=False, loc=2)

        if efficiency:
            efficiency_axis = rate_axis.twinx()
            efficiency_axis.plot(workers, efficiency, marker="x", color="r")
            efficiency_axis.set_ylabel("Parallel efficiency", color="r")
            efficiency_axis.set_ylim([0, 1.1])

        plt.savefig(filepath, bbox_inches="tight")
    finally:
        plt.close(figure)
    logger.debug("Saved scaling plot to %s", filepath)
    return True
