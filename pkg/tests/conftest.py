import pytest

from hfbem.nystrom import assemble
from hfbem.nystrom import build_grid
from tests.helpers import shifted
from tests.helpers import unit_circle
from tests.helpers import wave


@pytest.fixture(scope="session")
def circle_k10():
    """Unit circle at k = 10 (origin moved so that t1 + t2 = 2P) with its assembled Nystrom system."""
    shadow, curve = shifted(unit_circle())
    incident = wave(10.0)
    grid = build_grid(curve, incident.k, ppw=12.0)
    return shadow, curve, incident, assemble(curve, incident, grid)
