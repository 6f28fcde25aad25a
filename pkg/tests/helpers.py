import io
import math
from pathlib import Path

from hfbem.geometry import IncidentWave
from hfbem.geometry import make_circle
from hfbem.geometry import make_ellipse
from hfbem.geometry import shadow_geometry

ASSET_PATH = Path(__file__).parent / "assets"


class StringIo(io.StringIO):
    """StringIO whose getvalue() drops carriage returns, so captured console output compares the same on every OS."""

    def getvalue(self) -> str:
        return super().getvalue().replace("\r", "")


def asset_filename(filename: str) -> str:
    return str(ASSET_PATH / filename)


def unit_circle():
    return make_circle(1.0)


def rotated_ellipse():
    return make_ellipse(1.5, 0.5, math.pi / 6.0)


def shifted(curve, direction=(1.0, 0.0)):
    """Shadow geometry and the origin-shifted curve for a plane wave along direction."""
    return shadow_geometry(curve, direction)


def wave(k: float, direction=(1.0, 0.0)) -> IncidentWave:
    return IncidentWave(direction, k)
