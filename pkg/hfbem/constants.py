"""Solver-wide constants and defaults."""
LOG_CLASS = "hfbem"

DEFAULT_PPW = 12.0
DEFAULT_REFERENCE_PPW = 16.0
MIN_PPW = 8.0
MAX_PPW = 16.0
DEFAULT_MAX_NODES = 20000
DEFAULT_MIN_WAVENUMBER = 1.0
LARGE_WAVENUMBER = 400.0

DEFAULT_K_LIST = (50.0, 100.0, 200.0, 400.0)
DEFAULT_D_LIST = (4, 8, 12, 16, 20)

ROOT_TOLERANCE = 1e-12
NEWTON_MAX_ITER = 50
NEAR_DIAGONAL = 1e-4
CONDITION_LIMIT = 1e12
SINGULAR_CONDITION = 1e14
ASSEMBLY_BLOCK = 256
