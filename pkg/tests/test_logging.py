import logging

import pytest

from hfbem._logging import LOG_CLASS
from hfbem._logging import LogLevel
from hfbem._logging import init_logging
from hfbem._logging import log_to_file
from hfbem._logging import logger


def test_get_logger() -> None:
    log = logger()
    assert log.name == LOG_CLASS

    module_logger = logger("hfbem.nystrom")
    assert module_logger.name == "hfbem.nystrom"
    assert module_logger.parent is log


@pytest.mark.parametrize(
    ["level", "expected"],
    [
        pytest.param(LogLevel.CRITICAL, logging.CRITICAL, id="critical"),
        pytest.param(LogLevel.ERROR, logging.ERROR, id="error"),
        pytest.param(LogLevel.WARN, logging.WARN, id="warn"),
        pytest.param(LogLevel.INFO, logging.INFO, id="info"),
        pytest.param(LogLevel.DEBUG, logging.DEBUG, id="debug"),
        pytest.param("debug", logging.DEBUG, id="string"),
    ]
)
def test_init_logging(level: LogLevel, expected: int) -> None:
    init_logging(level)
    log = logger()
    assert LOG_CLASS == log.name
    assert expected == log.level
    init_logging(LogLevel.INFO)


def test_init_logging_file(tmp_path) -> None:
    filename = tmp_path / "solver.log"
    log = init_logging(LogLevel.INFO, name="hfbem-file-test", filename=str(filename))
    try:
        log.info("assembled 600 x 600")
        log.debug("not written")
    finally:
        for handler in list(log.handlers):
            log.removeHandler(handler)
            handler.close()
    text = filename.read_text()
    assert "hfbem-file-test - INFO assembled 600 x 600" in text
    assert "not written" not in text


def test_log_to_file(tmp_path) -> None:
    init_logging(LogLevel.INFO)
    filename = tmp_path / "run.log"
    before = len(logger().handlers)
    with log_to_file(str(filename)):
        logger("hfbem.experiments").info("k=50: 600 nodes")
        assert len(logger().handlers) == before + 1
    logger("hfbem.experiments").info("after the block")
    assert len(logger().handlers) == before

    text = filename.read_text()
    assert "hfbem.experiments - INFO k=50: 600 nodes" in text
    assert "after the block" not in text
