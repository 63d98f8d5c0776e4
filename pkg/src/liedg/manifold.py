"""Retractions on the unit sphere S^{n-1} embedded in R^n.

Points are unit vectors, tangent vectors at ``p`` are vectors orthogonal to
``p``. The retraction is the radial projection ``(p + v) / |p + v|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_core import DomainError

CONE_GUARD = 1e-8


@dataclass(frozen=True)
class TangentVector:
    base: np.ndarray
    vec: np.ndarray

    def check(self, tol: float = 1e-12) -> None:
        if abs(float(self.base @ self.vec)) > tol * max(1.0, np.linalg.norm(self.vec)):
            raise ValueError("tangent vector is not orthogonal to its base point")


def as_point(p, tol: float = 1e-12) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if abs(np.linalg.norm(p) - 1.0) > tol:
        raise ValueError(f"|p| = {np.linalg.norm(p)!r}, expected a unit vector")
    return p


def _vec(v):
    return np.asarray(v.vec if isinstance(v, TangentVector) else v, dtype=float)


def retract(p, v) -> np.ndarray:
    w = np.asarray(p, dtype=float) + _vec(v)
    n = np.linalg.norm(w)
    if n < CONE_GUARD:
        raise DomainError("p + v vanishes: retraction of an antipodal vector")
    return w / n


def retract_inverse(p, q) -> TangentVector:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pq = float(p @ q)
    if pq <= CONE_GUARD:
        raise DomainError(f"(p, q) = {pq!r}: q is outside the retraction cone of p")
    return TangentVector(p, q / pq - p)


def center(p, q) -> np.ndarray:
    """Geodesic midpoint; the symmetric solution of phi_c^-1(p) + phi_c^-1(q) = 0."""
    s = np.asarray(p, dtype=float) + np.asarray(q, dtype=float)
    n = np.linalg.norm(s)
    if n < CONE_GUARD:
        raise DomainError("antipodal points have no midpoint")
    return s / n


def center_left(p, q) -> np.ndarray:
    """The non-symmetric choice c(p, q) = p."""
    return np.asarray(p, dtype=float)


def retraction_tangent_map(c, u, w=None):
    """Differential of phi_c at u.

    Returns the matrix ``(I - l l^T / |l|^2) / |l|`` with ``l = c + u``, or
    its product with ``w`` when ``w`` is given. The matrix is symmetric so it
    also pulls covectors back.
    """
    l = np.asarray(c, dtype=float) + _vec(u)
    n = np.linalg.norm(l)
    T = (np.eye(l.size) - np.outer(l, l) / n**2) / n
    if w is None:
        return T
    return T @ np.asarray(w, dtype=float)


def symmetry_residual(c, p, q) -> float:
    return float(np.linalg.norm(retract_inverse(c, p).vec + retract_inverse(c, q).vec))
