"""Galerkin boundary element methods for high-frequency scattering by smooth convex obstacles."""
from hfbem.analytic import circle_density_on_grid
from hfbem.experiments import boundary_layer_diagnostic
from hfbem.experiments import run_sweep
from hfbem.galerkin import galerkin_solve
from hfbem.geometry import IncidentWave
from hfbem.geometry import make_circle
from hfbem.geometry import make_ellipse
from hfbem.geometry import shadow_geometry
from hfbem.nystrom import assemble
from hfbem.nystrom import build_grid
from hfbem.nystrom import solve_system
from hfbem.spaces import build_space
