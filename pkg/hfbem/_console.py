import os
from typing import Optional

from rich.console import Console

ENV_TERMINAL_WIDTH = "HFBEM_TERMINAL_WIDTH"
TEST_TERMINAL_WIDTH = 100


def _env_width() -> Optional[int]:
    value = os.environ.get(ENV_TERMINAL_WIDTH, "").strip()
    if value.isdigit() and int(value) > 0:
        return int(value)
    return None


def console_factory(*args, **kwargs) -> Console:
    """Create the console used for result tables and error lines.

    The width comes from the `width` argument, then HFBEM_TERMINAL_WIDTH, then a fixed test width
    under pytest so result tables never wrap. Number highlighting is off unless asked for.
    """
    width = kwargs.pop("width", None)
    kwargs.setdefault("highlight", False)
    if width is None:
        width = _env_width()
    if width is None and os.environ.get("PYTEST_VERSION") is not None:
        width = TEST_TERMINAL_WIDTH
    return Console(*args, width=width, **kwargs)
