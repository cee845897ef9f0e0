"""Constraint-preserving hybrid finite elements for 2-D Maxwell's equations."""

from ._hybridem import (
    __version__,
    check,
    convergence,
    eigenmode,
    mesh_info,
    time_domain,
)

__all__ = [
    "__version__",
    "check",
    "convergence",
    "eigenmode",
    "mesh_info",
    "time_domain",
]
