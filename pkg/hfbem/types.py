"""Collection of types used throughout the project."""
from enum import Enum


class ConfigField(str, Enum):
    """Keys accepted in a sweep configuration file."""

    GEOMETRY = "geometry"
    RADIUS = "radius"
    SEMI_A = "semi_a"
    SEMI_B = "semi_b"
    ROTATION = "rotation_rad"
    INCIDENCE = "incidence"
    K = "k"
    DEGREES = "degrees"
    METHOD = "method"
    M = "m"
    XI = "xi"
    ZETA = "zeta"
    XI_PRIME = "xi_prime"
    ZETA_PRIME = "zeta_prime"
    PPW = "ppw"
    REFERENCE_PPW = "reference_ppw"
    OUTPUT_DIR = "output_dir"
    ALLOW_LARGE = "allow_large"
    MAX_NODES = "max_nodes"
    WORKERS = "workers"

    @classmethod
    def contains(cls, value: str) -> bool:
        """Check whether the value is a class member (aka enum value)."""
        try:
            cls(value)
            return True
        except ValueError:
            return False


class GeometryKind(str, Enum):
    """Supported obstacle shapes."""

    CIRCLE = "circle"
    ELLIPSE = "ellipse"


class Method(str, Enum):
    """Galerkin approximation spaces."""

    FREQ_ADAPTED = "freq_adapted"
    COV = "cov"


class DensityKind(str, Enum):
    """What a sampled boundary density represents."""

    TOTAL_FIELD = "total_field"
    SLOW_ENVELOPE = "slow_envelope"


class RegionLabel(str, Enum):
    """Labels of the parameter regions carrying the piecewise polynomial spaces."""

    IL = "IL"
    IT1 = "IT1"
    IT2 = "IT2"
    ST1 = "ST1"
    ST2 = "ST2"
    SB1 = "SB1"
    SB2 = "SB2"
    SR = "SR"
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    I4 = "I4"
    I5 = "I5"
    I6 = "I6"
