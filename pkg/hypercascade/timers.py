# SPDX-License-Identifier: GPL-2.0-only

"""
A module containing helper objects for timing.
"""

import time


def now():
    """
    Returns a monotonic clock reading in seconds. On Linux and macOS this
    clock is shared by every process on the machine, so readings from worker
    processes can be compared with each other.
    """
    return time.monotonic()


class TimeRecorder:
    """
    Accurately record spans of time.
    """

    def __init__(self):
        self.start_time = now()
        self.stop_time = None

    def start_now(self):
        """
        Starts (or restarts) the recorder.
        """
        self.start_time = now()
        self.stop_time = None

    def stop(self):
        """
        Stops the recorder and returns the recorded span in seconds.
        """
        self.stop_time = now()
        return self.elapsed()

    def elapsed(self):
        """
        Returns the span between start and stop, or start and now if the
        recorder is still running.
        """
        end = self.stop_time if self.stop_time is not None else now()
        return end - self.start_time


def rate(count, seconds):
    """
    Returns count / seconds rounded down to an integer; 0 when no time
    passed.
    """
    if seconds <= 0:
        return 0
    return int(count / seconds)
