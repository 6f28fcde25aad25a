import os
from unittest import mock

import pytest

from hfbem._console import ENV_TERMINAL_WIDTH
from hfbem._console import TEST_TERMINAL_WIDTH
from hfbem._console import console_factory


def test_console_width_argument():
    with mock.patch.dict(os.environ, {ENV_TERMINAL_WIDTH: "33"}):
        console = console_factory(width=23)
    assert console.width == 23


def test_console_width_env():
    with mock.patch.dict(os.environ, {ENV_TERMINAL_WIDTH: "140"}):
        console = console_factory()
    assert console.width == 140


@pytest.mark.parametrize(
    "value",
    [
        pytest.param("wide", id="text"),
        pytest.param("0", id="zero"),
        pytest.param("", id="empty"),
    ]
)
def test_console_width_env_ignored(value):
    with mock.patch.dict(os.environ, {ENV_TERMINAL_WIDTH: value}):
        console = console_factory()
    assert console.width == TEST_TERMINAL_WIDTH


def test_console_width_pytest():
    console = console_factory()
    assert console.width == TEST_TERMINAL_WIDTH


def test_console_width_unspecified():
    with mock.patch.dict(os.environ, {}, clear=True):
        console = console_factory()
    assert console.width != TEST_TERMINAL_WIDTH
