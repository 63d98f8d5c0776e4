"""Model systems: free rigid body on S^2, attitude in unit quaternions, and
the St Venant-Kirchhoff pseudo-rigid body on GL+(3) x gl(3)*.

Group problems expose ``group``, ``H`` (a FirstIntegral whose differential
is right-trivialised), ``field(x)`` (the right-trivialised vector field),
``omega(x)`` (the exact bivector, trivialised at x) and ``x0``.
"""

from __future__ import annotations

import numpy as np

from .bivector import (
    BivectorForm,
    bivector_from_gradient,
    darboux_contract,
    omega_bar_sphere,
    trivialized_bivector,
)
from .discrete_diff import _ETA_FLOOR, FirstIntegral
from .lie_core import (
    GLPlus3,
    SL3,
    cross,
    Semidirect,
    UnitQuaternions,
    euler_rodriguez,
    hat,
    quat_conj,
    quat_mul,
)


def _diag(values, what):
    d = np.asarray(values, dtype=float).reshape(-1)
    if d.shape != (3,) or np.any(d <= 0):
        raise ValueError(f"{what} must be three positive diagonal entries, got {values!r}")
    return d


class SphereRigidBody:
    """Body angular momentum p on the unit sphere, H(p) = (p, I^-1 p) / 2."""

    kind = "sphere"

    def __init__(self, inertia=(1.0, 2.0, 3.0), p0=None):
        self.inertia = _diag(inertia, "inertia")
        self.inv_inertia = 1.0 / self.inertia
        if p0 is None:
            p0 = np.array([1.0, 0.6, 0.8])
        p0 = np.asarray(p0, dtype=float)
        self.x0 = p0 / np.linalg.norm(p0)
        self.H = FirstIntegral(self.energy, self.gradient)

    def energy(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return 0.5 * float(p @ (self.inv_inertia * p))

    def gradient(self, p):
        return self.inv_inertia * np.asarray(p, dtype=float)

    def field(self, p):
        p = np.asarray(p, dtype=float)
        return cross(p, self.inv_inertia * p)

    def omega(self, p) -> BivectorForm:
        return omega_bar_sphere(p, p)

    def omega_bar(self, p, q) -> BivectorForm:
        return omega_bar_sphere(p, q)

    def gonzalez_closed_form(self, p, q):
        """Closed form of the sphere Gonzalez differential with c the midpoint."""
        m = 0.5 * (np.asarray(p) + np.asarray(q))
        nm = np.linalg.norm(m)
        d = np.asarray(q) - np.asarray(p)
        return (self.inv_inertia * m + (nm**2 - 1.0) / (d @ d) * (self.energy(q) - self.energy(p)) * d) / nm

    def invariants(self, p) -> dict:
        return {"norm": float(np.linalg.norm(p))}

    def state_columns(self):
        return ["p1", "p2", "p3"]

    def flatten(self, p):
        return np.asarray(p, dtype=float).ravel()


class QuaternionRigidBody:
    """Free rigid body attitude, q' = f(q) . q with f(q) = q . [0, v] . conj(q).

    ``v = I^-1 E(conj q) m0 / 2`` and the preserved energy is
    ``H(q) = m0^T E(q) I^-1 E(conj q) m0 / 2``.
    """

    kind = "group"

    def __init__(self, inertia=(1.0, 5.0, 60.0), v0=(1.0, 0.5, -1.0), q0=None, m0=None):
        self.group = UnitQuaternions()
        self.inertia = _diag(inertia, "inertia")
        self.inv_inertia = 1.0 / self.inertia
        if m0 is None:
            m0 = self.inertia * np.asarray(v0, dtype=float)
        self.m0 = np.asarray(m0, dtype=float)
        self.x0 = self.group.identity() if q0 is None else self.group.normalize(q0)
        self.H = FirstIntegral(self.energy, self.trivialized_gradient)

    def body_momentum(self, q):
        return euler_rodriguez(quat_conj(q)) @ self.m0

    def energy(self, q) -> float:
        M = self.body_momentum(q)
        return 0.5 * float(M @ (self.inv_inertia * M))

    def euclidean_gradient(self, q):
        """Gradient in R^4 of the quadratic extension of H off the sphere."""
        q = np.asarray(q, dtype=float)
        qv = q[1:]
        m = self.m0
        J = np.empty((3, 4))
        J[:, 0] = -2.0 * cross(qv, m)
        J[:, 1:] = 2.0 * q[0] * hat(m) - 2.0 * hat(cross(qv, m)) - 2.0 * hat(qv) @ hat(m)
        return J.T @ (self.inv_inertia * self.body_momentum(q))

    def riemannian_gradient(self, q):
        q = np.asarray(q, dtype=float)
        g = self.euclidean_gradient(q)
        return g - q * (q @ g)

    def trivialized_gradient_ambient(self, q):
        """gamma = grad H|_q . conj(q) through the R^4 gradient (reference route)."""
        return quat_mul(self.riemannian_gradient(q), quat_conj(q))[1:]

    def spatial_velocity(self, q):
        """w = E(q) I^-1 E(conj q) m0; the field is w / 2."""
        R = euler_rodriguez(q)
        return R @ (self.inv_inertia * (R.T @ self.m0))

    def trivialized_gradient(self, q):
        """gamma = grad H|_q . conj(q) as a 3-vector; closed form 2 w x m0.

        Perturbing q -> exp(eps eta) q rotates the body momentum by
        E(q)^T (-2 eps hat(eta)) m0, which gives <gamma, eta> = 2 <w x m0, eta>.
        """
        return 2.0 * cross(self.spatial_velocity(q), self.m0)

    def field(self, q):
        return 0.5 * self.spatial_velocity(q)

    def omega(self, q) -> BivectorForm:
        """omega_R(q) = (xi gamma^T - gamma xi^T) / |gamma|^2 on s^3 ~ R^3."""
        return bivector_from_gradient(self.field(q), self.trivialized_gradient(q))

    def ambient_omega(self, q, p):
        """grad H ∧ F / |grad H|^2 on R^4 contracted with an ambient covector p."""
        F = self.group.tangent_push(q, self.field(q))
        return bivector_from_gradient(F, self.riemannian_gradient(q)).contract(p)

    def invariants(self, q) -> dict:
        return {"qnorm": float(np.linalg.norm(q))}

    def state_columns(self):
        return ["q0", "q1", "q2", "q3"]

    def flatten(self, q):
        return np.asarray(q, dtype=float).ravel()


class PseudoRigidBody:
    """Homogeneous St Venant-Kirchhoff body on T*G ~ G x g*.

    State is ``x = stack(F, P)`` with the deformation gradient F and its
    canonical momentum P; H(F, P) = <P, P E^-1>/2 + W(F^T F).
    """

    kind = "group"

    def __init__(
        self,
        lam=1.0 / 3.0,
        mu=1.0,
        E=(1.0, 2.0, 3.0),
        F0=None,
        P0=(0.2575, 0.8407, 0.2543),
        incompressible: bool = False,
    ):
        if not (mu > 0 and 3 * lam + 2 * mu > 0):
            raise ValueError("Lame constants need mu > 0 and 3 lam + 2 mu > 0")
        self.lam = float(lam)
        self.mu = float(mu)
        self.E = np.diag(_diag(E, "E"))
        self.E_inv = np.linalg.inv(self.E)
        self.incompressible = incompressible
        self.group = Semidirect(SL3() if incompressible else GLPlus3())
        F0 = np.eye(3) if F0 is None else np.asarray(F0, dtype=float).reshape(3, 3)
        P0 = np.asarray(P0, dtype=float)
        P0 = np.diag(P0) if P0.shape == (3,) else P0.reshape(3, 3)
        self.x0 = Semidirect.make(F0, P0)
        self.group.validate(self.x0)
        self.H = FirstIntegral(self.energy, self.trivialized_differential)

    # energy -------------------------------------------------------------------
    def stored_energy(self, C) -> float:
        D = np.asarray(C, dtype=float) - np.eye(3)
        return 0.5 * self.lam * np.trace(D) ** 2 + self.mu * np.trace(D @ D)

    def stored_energy_gradient(self, C):
        D = np.asarray(C, dtype=float) - np.eye(3)
        return self.lam * np.trace(D) * np.eye(3) + 2.0 * self.mu * D

    def kinetic_energy(self, P) -> float:
        P = np.asarray(P, dtype=float)
        return 0.5 * float(np.sum(P * (P @ self.E_inv)))

    def energy(self, x) -> float:
        F, P = x
        return self.kinetic_energy(P) + self.stored_energy(F.T @ F)

    def variational_derivs(self, x):
        """(dH/dF, dH/dP) = (2 F grad W(F^T F), P E^-1).

        The sign of dH/dF is the one the finite-difference check confirms.
        """
        F, P = x
        return 2.0 * F @ self.stored_energy_gradient(F.T @ F), P @ self.E_inv

    # trivialised objects --------------------------------------------------------
    def trivialized_differential(self, x):
        """R_x^* dH: pairs with (xi, mu) to give d/dt H(Exp(t(xi, mu)) x) at 0."""
        dF, dP = self.variational_derivs(x)
        return self.group.covector_pull(x, Semidirect.make(dF, dP))

    def darboux_pair(self, x):
        """(gamma1, gamma2) = (dH/dF - coad(gamma2, P), dH/dP F^-1).

        Applying the inverse Darboux matrix to this pair gives the trivialised
        Hamiltonian vector field.
        """
        F, P = x
        dF, dP = self.variational_derivs(x)
        g2 = dP @ np.linalg.inv(F)
        g1 = dF - Semidirect.mat_coad(g2, P)
        return Semidirect.make(g1, g2)

    def field(self, x):
        return darboux_contract(self.darboux_pair(x))

    def ambient_omega(self, x, p):
        return darboux_contract(p)

    def omega(self, x) -> BivectorForm:
        """The Darboux bivector right-trivialised at x.

        Closed form of ``trivialized_bivector(group, x, ambient_omega)`` with
        F^-1 computed once.
        """
        F, P = x
        Finv = np.linalg.inv(F)
        coad = Semidirect.mat_coad

        def contract(mu):
            p0 = (mu[0] - coad(mu[1], P)) @ Finv.T
            A = mu[1] @ Finv
            return Semidirect.make(A, -p0 + A.T @ P - P @ A.T)

        return BivectorForm(contract, pair=self.group.pair)

    def dg_step_assembly(self, x0, x1, h, alpha: bool = True, eta=None):
        """Algebra increment h * omega(x_bar)(dH_bar) of the energy-preserving step.

        ``x_bar = Exp(eta/2) x0`` with ``eta = Log(x1 x0^-1)``. With
        ``alpha=False`` the correction is dropped, giving the symmetric
        comparator that does not preserve H.
        """
        G = self.group
        if eta is None:
            eta = G.log(G.compose(x1, G.inverse(x0)))
        xbar = G.compose(G.exp(0.5 * eta), x0)
        om = self.omega(xbar)
        inc = om.contract(self.trivialized_differential(xbar))
        nn = G.pair(eta, eta)
        if alpha and nn > _ETA_FLOOR:
            a = (
                self.energy(x1)
                - self.energy(x0)
                - G.pair(self.trivialized_differential(xbar), eta)
            ) / nn
            inc = inc + a * om.contract(eta)
        return h * inc

    def invariants(self, x) -> dict:
        return {"detF": float(np.linalg.det(x[0]))}

    def state_columns(self):
        return [f"F{i}{j}" for i in range(1, 4) for j in range(1, 4)] + [
            f"P{i}{j}" for i in range(1, 4) for j in range(1, 4)
        ]

    def flatten(self, x):
        return np.asarray(x, dtype=float).ravel()


PROBLEMS = {
    "sphere-rb": SphereRigidBody,
    "quat-rb": QuaternionRigidBody,
    "pseudo-rigid": PseudoRigidBody,
}
