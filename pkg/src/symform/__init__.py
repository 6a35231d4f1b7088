"""Symmetry-constrained formation control on cycle graphs.

Constraint trees labeled with cyclic-group rotations define a matrix-weighted
Laplacian whose null space is exactly the set of compatible formations; the
induced gradient flow drives agents onto it, and a reference augmentation
steers the achieved formation along translating/rotating/scaling trajectories.
"""
from __future__ import annotations

from .symgroup import (
    CyclicAutomorphism,
    PointGroupAssignment,
    Rotation,
    assignment,
    identity,
    rotation2,
    rotational_automorphisms,
)
from .topology import (
    CycleGraph,
    InteractionGraph,
    RotationChain,
    chain_matrices,
    cycle_minus_edge,
    permutation_action,
    rotation_chain,
    validate,
    weighted_edges,
)
from .laplacian import (
    NullBasis,
    NumericFailure,
    Spectrum,
    SymmetryIncidence,
    SymmetryLaplacian,
    build_incidence,
    build_laplacian,
    closed_form_solution,
    incidence_from_edges,
    laplacian_from_edges,
    null_basis,
    null_basis_from_chain,
    product_laplacian,
    spectrum,
    steady_state,
    steady_state_per_agent,
    symmetric_configuration,
)
from .dynamics import (
    Configuration,
    SimulationTrace,
    control,
    control_per_agent,
    edge_errors,
    edge_residual_norms,
    fit_rate,
    integrate,
    potential,
    resolve_grid,
    rk4_step,
)
from .maneuver import (
    ManeuverTrace,
    ReferenceInputs,
    ReferencePath,
    ReferenceState,
    frame_to_world,
    from_waypoints,
    maneuver_control,
    moving_frame,
    omega_matrix,
    propagate_reference,
    shifted_errors,
    simulate_maneuver,
    zeta_consistency_residual,
)
from .spatial3d import (
    CompositeLaplacian,
    CubeSpec,
    build_cube,
    cube_corners,
    rotation3,
    simulate_cube,
)

__version__ = "0.1.0"

__all__ = [
    "CompositeLaplacian", "Configuration", "CubeSpec", "CycleGraph",
    "CyclicAutomorphism", "InteractionGraph", "ManeuverTrace", "NullBasis",
    "NumericFailure", "PointGroupAssignment", "ReferenceInputs",
    "ReferencePath", "ReferenceState", "Rotation", "RotationChain",
    "SimulationTrace", "Spectrum", "SymmetryIncidence", "SymmetryLaplacian",
    "assignment", "build_cube", "build_incidence", "build_laplacian",
    "chain_matrices", "closed_form_solution", "control", "control_per_agent",
    "cube_corners", "cycle_minus_edge", "edge_errors", "edge_residual_norms",
    "fit_rate", "frame_to_world", "from_waypoints", "identity",
    "incidence_from_edges", "integrate", "laplacian_from_edges",
    "maneuver_control", "moving_frame", "null_basis", "null_basis_from_chain",
    "omega_matrix", "permutation_action", "potential", "product_laplacian",
    "propagate_reference", "resolve_grid", "rk4_step", "rotation2", "rotation3",
    "rotation_chain", "rotational_automorphisms", "shifted_errors",
    "simulate_cube", "simulate_maneuver", "spectrum", "steady_state",
    "steady_state_per_agent", "symmetric_configuration", "validate",
    "weighted_edges", "zeta_consistency_residual",
]
