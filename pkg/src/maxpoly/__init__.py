"""maxpoly: largest small even n-gon toolkit.

Builds the nonconvex quadratic programs whose maxima are the
maximal-area convex polygons of unit diameter with an even number of
vertices, solves them with a deterministic multistart local method,
exports Lasserre-style moment relaxations for external SDP solvers, and
certifies candidate polygons with interval arithmetic.
"""

from .formulation import (
    Assignment,
    QuadraticProgram,
    apply_sigma,
    assignment_to_polygon,
    build_program,
    evaluate,
    expand_assignment,
    reduce_symmetric,
)
from .geometry import (
    DiameterGraph,
    Point2,
    Polygon,
    area_shoelace,
    check_graham_configuration,
    diameter_graph,
    diameter_sq,
    is_convex,
    regular_small_area,
    render_svg,
    upper_bound_area,
)
from .interval_cert import Certificate, Interval, bracket, certify
from .local_solver import SolveResult, SolverConfig, initial_seeds, solve
from .moment_relaxation import build_relaxation, export_sdpa, extract, stats

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "QuadraticProgram",
    "apply_sigma",
    "assignment_to_polygon",
    "build_program",
    "evaluate",
    "expand_assignment",
    "reduce_symmetric",
    "DiameterGraph",
    "Point2",
    "Polygon",
    "area_shoelace",
    "check_graham_configuration",
    "diameter_graph",
    "diameter_sq",
    "is_convex",
    "regular_small_area",
    "render_svg",
    "upper_bound_area",
    "Certificate",
    "Interval",
    "bracket",
    "certify",
    "SolveResult",
    "SolverConfig",
    "initial_seeds",
    "solve",
    "build_relaxation",
    "export_sdpa",
    "extract",
    "stats",
    "__version__",
]
