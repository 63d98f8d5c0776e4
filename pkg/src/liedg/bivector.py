"""Skew bilinear forms on g* (bivectors) and the constructions built from them.

A form is stored through its contraction ``contract(mu) = mu ⌟ omega``, the
algebra element with ``<beta, contract(alpha)> = omega(alpha, beta)``. In
coordinates ``contract(mu) = S @ mu`` with ``S`` skew, so the Euclidean case
reproduces ``x' = S grad H``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .lie_core import DomainError, cross


def _dot(a, b) -> float:
    return float(np.sum(np.asarray(a) * np.asarray(b)))


@dataclass(frozen=True)
class BivectorForm:
    contract: Callable[[np.ndarray], np.ndarray]
    pair: Callable[[np.ndarray, np.ndarray], float] = _dot
    matrix: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def apply(self, a, b) -> float:
        return self.pair(b, self.contract(a))

    __call__ = apply


def from_matrix(S) -> BivectorForm:
    S = np.asarray(S, dtype=float)
    return BivectorForm(lambda mu: S @ mu, matrix=S)


def bivector_from_gradient(F, grad_h) -> BivectorForm:
    """omega = grad H ∧ F / |grad H|^2 as the rank-2 matrix (F g^T - g F^T)/|g|^2."""
    F = np.asarray(F, dtype=float)
    g = np.asarray(grad_h, dtype=float)
    gg = float(g @ g)
    if gg < 1e-28:
        if float(F @ F) < 1e-28:
            # rest point: the zero form reproduces the zero field
            return from_matrix(np.zeros((F.size, F.size)))
        raise DomainError("grad H vanishes while the field does not (relative equilibrium): omega is undefined")
    return from_matrix((np.outer(F, g) - np.outer(g, F)) / gg)


def omega_bar_midpoint_s3(q, q_next, problem) -> BivectorForm:
    """The quaternion bivector omega_R evaluated at q_bar = exp(eta/2) q."""
    G = problem.group
    eta = G.log(G.compose(q_next, G.inverse(q)))
    return problem.omega(G.compose(G.exp(0.5 * eta), q))


def omega_bar_sphere(p, q) -> BivectorForm:
    """omega_bar(p, q)(alpha, beta) = ((p + q)/2, alpha x beta)."""
    m = 0.5 * (np.asarray(p, dtype=float) + np.asarray(q, dtype=float))
    S = np.array([[0.0, -m[2], m[1]], [m[2], 0.0, -m[0]], [-m[1], m[0], 0.0]])
    return BivectorForm(lambda a: cross(m, a), matrix=S)


def darboux_contract(mu):
    """Inverse Darboux matrix [[0, I], [-I, 0]] on a stacked (F, P) covector."""
    mu = np.asarray(mu, dtype=float)
    return np.stack([mu[1], -mu[0]])


def trivialized_bivector(group, x, ambient_contract) -> BivectorForm:
    """Right-trivialise an ambient bivector at x.

    ``ambient_contract(x, p)`` maps an ambient covector at x to an ambient
    tangent vector. The result acts on g*: a -> R_x^{-1}_* omega_x(R_{x^-1}^* a).
    """

    def contract(a):
        return group.tangent_pull(x, ambient_contract(x, group.covector_push(x, a)))

    return BivectorForm(contract, pair=group.pair)


def omega_bar_collocation(group, x0, sigma, ambient_contract) -> BivectorForm:
    """Exact bivector pulled back to the stage point X = exp(sigma) x0."""
    X = group.compose(group.exp(sigma), x0)
    return trivialized_bivector(group, X, ambient_contract)


def dense(form: BivectorForm, shape) -> np.ndarray:
    """Assemble the matrix of ``form.contract`` in flattened coordinates."""
    n = int(np.prod(shape))
    M = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        M[:, k] = np.ravel(form.contract(e.reshape(shape)))
    return M
