"""Shared helpers for the test-suite: random states and test first integrals."""

import numpy as np

from liedg.discrete_diff import FirstIntegral
from liedg.lie_core import SL3, SO3, GLPlus3, Semidirect, UnitQuaternions
from liedg.problems import PseudoRigidBody, QuaternionRigidBody

# lines printed by the acceptance suite, collected for the terminal summary
ACCEPTANCE_LINES: list = []


def _traceless(M):
    return M - np.trace(M) / 3.0 * np.eye(3)


def random_algebra(G, rng, scale=1.0):
    xi = scale * rng.standard_normal(G.alg_shape)
    if isinstance(G, SL3):
        xi = _traceless(xi)
    if isinstance(G, Semidirect) and isinstance(G.base, SL3):
        xi[0] = _traceless(xi[0])
    return xi


def random_element(G, rng, scale=0.5, base=None):
    g = G.exp(random_algebra(G, rng, scale))
    return g if base is None else G.compose(g, base)


def ambient_integral(G, value, grad):
    """A FirstIntegral whose differential is R_x^* of an ambient gradient."""
    return FirstIntegral(value, lambda x: G.covector_pull(x, grad(x)))


_A = np.array([[0.3, -0.2, 0.5], [0.1, 0.4, -0.3], [0.2, 0.0, 0.6]])
_D = np.diag([1.0, 2.0, 3.0])
_a = np.array([0.2, -0.5, 0.3])
_b = np.array([1.0, 0.4, -0.7])
_c = np.array([0.3, 0.9, 0.1])


def matrix_integral(G):
    """H(X) = |X - A|^2 / 2 + log det X on GL+(3) and SL(3)."""
    return ambient_integral(
        G,
        lambda X: 0.5 * float(np.sum((X - _A) ** 2)) + float(np.log(np.linalg.det(X))),
        lambda X: (X - _A) + np.linalg.inv(X).T,
    )


def rotation_integral(G):
    """H(R) = <a, R b> + (R c)^T D (R c) / 2 on SO(3)."""
    return ambient_integral(
        G,
        lambda R: float(_a @ R @ _b) + 0.5 * float((R @ _c) @ _D @ (R @ _c)),
        lambda R: np.outer(_a, _b) + np.outer(_D @ R @ _c, _c),
    )


def group_cases():
    """(label, group, first integral, base point) for every group in the package."""
    qp = QuaternionRigidBody()
    pr = PseudoRigidBody()
    pri = PseudoRigidBody(incompressible=True)
    return [
        ("S3", qp.group, qp.H, qp.x0),
        ("SO3", SO3(), rotation_integral(SO3()), np.eye(3)),
        ("GL+3", GLPlus3(), matrix_integral(GLPlus3()), np.eye(3)),
        ("SL3", SL3(), matrix_integral(SL3()), np.eye(3)),
        ("GL+3 x g*", pr.group, pr.H, pr.x0),
        ("SL3 x g*", pri.group, pri.H, pri.x0),
    ]


def fd_ratio(err_fn, eps=(1e-3, 5e-4)):
    """Ratio err(eps0)/err(eps1) of a central-difference error (about 4 for O(eps^2))."""
    e0, e1 = err_fn(eps[0]), err_fn(eps[1])
    return e0 / e1, e0, e1


def quat_random(rng):
    return UnitQuaternions.normalize(rng.standard_normal(4))
