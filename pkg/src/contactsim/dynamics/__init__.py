from .body import RigidBody, integrate
from .scene import Scene, StepReport, step
from .solver import (
    RESTITUTION_THRESHOLD,
    ContactConstraints,
    SolverParams,
    SolverState,
    solve_contact_sweep,
)

__all__ = [
    "RigidBody",
    "integrate",
    "Scene",
    "StepReport",
    "step",
    "SolverParams",
    "SolverState",
    "ContactConstraints",
    "solve_contact_sweep",
    "RESTITUTION_THRESHOLD",
]
