"""Energy-preserving discrete-gradient integrators on Lie groups and manifolds.

Modules: ``lie_core`` (groups, exp/log, dexp family), ``manifold`` (sphere
retraction), ``discrete_diff`` (Gonzalez / AVF discrete differentials),
``bivector``, ``integrator`` (one-step methods and solver), ``problems``
(model systems) and ``harness`` (experiments and CSV output).
"""

from .discrete_diff import FirstIntegral, Scheme, ddiff
from .integrator import (
    GAUSS2,
    CollocationTableau,
    SolverError,
    StepConfig,
    collocation_step,
    dg_step,
    fixed_point_solve,
    heun_step,
    manifold_dg_step,
)
from .lie_core import GLPlus3, SL3, SO3, DomainError, Semidirect, UnitQuaternions
from .problems import PROBLEMS, PseudoRigidBody, QuaternionRigidBody, SphereRigidBody

__version__ = "0.1.0"

__all__ = [
    "CollocationTableau",
    "DomainError",
    "FirstIntegral",
    "GAUSS2",
    "GLPlus3",
    "PROBLEMS",
    "PseudoRigidBody",
    "QuaternionRigidBody",
    "SL3",
    "SO3",
    "Scheme",
    "Semidirect",
    "SolverError",
    "SphereRigidBody",
    "StepConfig",
    "UnitQuaternions",
    "collocation_step",
    "ddiff",
    "dg_step",
    "fixed_point_solve",
    "heun_step",
    "manifold_dg_step",
]
