"""Spectra, fractional torsion functions and torsional rigidity of compact
metric graphs, with surgery transformations, closed-form bounds and an
independent finite-difference oracle."""

__version__ = "0.1.0"

from .analytic import (
    BoundsPair,
    extremal_bounds,
    flower_rigidity,
    interval_rigidity_dn,
    interval_torsion_dn,
    odd_zeta,
    zeta,
)
from .fractional import (
    RigidityResult,
    SpectralVector,
    TorsionSample,
    h_alpha_norm_sq,
    j_functional,
    project_edgewise_quadratic,
    rayleigh_quotient,
    rigidity,
    simple_bounds,
    torsion_at,
    torsion_coefficients,
)
from .graph import (
    Edge,
    GraphPoint,
    InvalidGraphError,
    MetricGraph,
    insert_dummy_vertex,
    total_length,
    validate,
    vertex_degree,
)
from .oracle import (
    Discretization,
    OracleSizeError,
    discretize,
    fd_rigidity,
    fd_rigidity_extrapolated,
    fd_spectrum,
    fd_torsion,
    richardson,
)
from .serialize import (
    DocumentError,
    dump_graph_json,
    graph_from_document,
    graph_to_document,
    load_graph_file,
)
from .solver import (
    EigenPair,
    SolverError,
    SolverOptions,
    SpectralBasis,
    eval_eigenfunction,
    mass_coefficient,
    orthonormalize,
    scan_n_eigenvalues,
    scan_spectrum,
    secular_matrix,
    sigma_min,
    vertex_residual,
)
from .surgery import (
    SurgeryOp,
    SurgeryPreconditionError,
    cut_cycle,
    double_edges,
    glue_vertices,
    unfold_to_cycle,
    upper_bound_chain,
)

__all__ = [
    "BoundsPair",
    "Discretization",
    "DocumentError",
    "Edge",
    "EigenPair",
    "GraphPoint",
    "InvalidGraphError",
    "MetricGraph",
    "OracleSizeError",
    "RigidityResult",
    "SolverError",
    "SolverOptions",
    "SpectralBasis",
    "SpectralVector",
    "SurgeryOp",
    "SurgeryPreconditionError",
    "TorsionSample",
    "cut_cycle",
    "discretize",
    "double_edges",
    "dump_graph_json",
    "eval_eigenfunction",
    "extremal_bounds",
    "fd_rigidity",
    "fd_rigidity_extrapolated",
    "fd_spectrum",
    "fd_torsion",
    "flower_rigidity",
    "glue_vertices",
    "graph_from_document",
    "graph_to_document",
    "h_alpha_norm_sq",
    "insert_dummy_vertex",
    "interval_rigidity_dn",
    "interval_torsion_dn",
    "j_functional",
    "load_graph_file",
    "mass_coefficient",
    "odd_zeta",
    "orthonormalize",
    "project_edgewise_quadratic",
    "rayleigh_quotient",
    "richardson",
    "rigidity",
    "scan_n_eigenvalues",
    "scan_spectrum",
    "secular_matrix",
    "sigma_min",
    "simple_bounds",
    "torsion_at",
    "torsion_coefficients",
    "total_length",
    "unfold_to_cycle",
    "upper_bound_chain",
    "validate",
    "vertex_degree",
    "vertex_residual",
    "zeta",
]
