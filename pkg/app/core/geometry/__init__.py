from .critical import (
    CriticalPoint,
    find_critical_points,
    is_morse,
    min_pairwise_distance,
    morse_counts,
    select_points,
)
from .fields import ScalarField, builtin_field, parse_field_name
from .mesh import Mesh, build_mesh, write_mesh_text
from .surfaces import (
    DEFAULT_RESOLUTION,
    Surface,
    make_surface,
    metric_defect,
    parse_surface_descriptor,
    surface_area,
)

__all__ = [
    "CriticalPoint",
    "DEFAULT_RESOLUTION",
    "Mesh",
    "ScalarField",
    "Surface",
    "build_mesh",
    "builtin_field",
    "find_critical_points",
    "is_morse",
    "make_surface",
    "metric_defect",
    "min_pairwise_distance",
    "morse_counts",
    "parse_field_name",
    "parse_surface_descriptor",
    "select_points",
    "surface_area",
    "write_mesh_text",
]
