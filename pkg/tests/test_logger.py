import logging

import logger


def test_stream_level():
    assert logger.stream_level() == logging.INFO
    assert logger.stream_level(quiet=True) == logging.CRITICAL
    assert logger.stream_level(verbose=True) == logging.DEBUG


def test_noisy_loggers_silenced():
    assert logging.getLogger("matplotlib").level == logging.CRITICAL


def test_rotating_file(tmp_path):
    target = logging.getLogger("hypercascade.test_rotating_file")
    handler = logger.add_rotating_file(target, str(tmp_path / "debug"),
                                       "%Y-%m-%d.log", 7,
                                       level=logging.DEBUG)
    try:
        target.info("ingested %s triples", 3)
        handler.flush()
        text = (tmp_path / "debug").read_text()
        assert "hypercascade.test_rotating_file - INFO: ingested 3" in text
        assert "MainProcess" in text
    finally:
        target.removeHandler(handler)
        handler.close()
