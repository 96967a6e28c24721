"""Exact cylinder calculus on translation surfaces."""

from .exactalg import FieldElem, Subspace, Vec2, parse_elem
from .surface import GL2, Surface, SurfaceError, build, canonical_form, is_isomorphic, loads
from .homology import Homology
from .flow import Decomposition, Undetermined, decompose, shortest_saddle_connections
from .deform import add_cocycle, shear_cylinders, stretch_cylinders
from .tangent import TangentModel, stratum_tangent
from .boundary import CollapsePath, CollapseResult, boundary_tangent, collapse, pushforward

__all__ = [
    "FieldElem",
    "Subspace",
    "Vec2",
    "parse_elem",
    "GL2",
    "Surface",
    "SurfaceError",
    "build",
    "canonical_form",
    "is_isomorphic",
    "loads",
    "Homology",
    "Decomposition",
    "Undetermined",
    "decompose",
    "shortest_saddle_connections",
    "add_cocycle",
    "shear_cylinders",
    "stretch_cylinders",
    "TangentModel",
    "stratum_tangent",
    "CollapsePath",
    "CollapseResult",
    "boundary_tangent",
    "collapse",
    "pushforward",
]
