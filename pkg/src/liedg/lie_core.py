"""Lie groups used by the integrators.

Every group works on plain numpy arrays. Algebra elements and covectors
share one coordinate layout per group and are paired by the Euclidean/trace
pairing ``sum(mu * xi)``, so the coordinate basis is orthonormal and every
dual map is a plain transpose.

Trivialisation is on the right throughout: a tangent vector at ``x`` is
``xi . x`` and ``d/dt exp(s(t)) = dexp_s(s'(t)) . exp(s(t))``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from math import cos, factorial, sin, sqrt, tan

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of log, dexpinv or a retraction."""


class GroupMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


def hat(q):
    """Skew matrix with ``hat(q) @ v == cross(q, v)``."""
    q1, q2, q3 = q
    return np.array([[0.0, -q3, q2], [q3, 0.0, -q1], [-q2, q1, 0.0]])


def vee(S):
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[float, ...]:
    """B_0..B_n with the B_1 = -1/2 convention."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * B[k]
            binom = binom * (m + 1 - k) // (k + 1)
        B.append(-acc / (m + 1))
    return tuple(float(b) for b in B)


def phi_series(M, max_terms: int = 60):
    """(e^M - I) / M as a power series, for a square matrix M."""
    n = M.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, max_terms):
        term = term @ M / (k + 1)
        out = out + term
        if np.abs(term).max() < 1e-18 * max(1.0, np.abs(out).max()):
            break
    return out


def phi_expm(M):
    """(e^M - I) / M via the exponential of the block matrix [[M, I], [0, 0]]."""
    n = M.shape[0]
    B = np.zeros((2 * n, 2 * n))
    B[:n, :n] = M
    B[:n, n:] = np.eye(n)
    return expm(B)[:n, n:]


def bernoulli_series(M, max_terms: int = 30):
    """sum_k B_k / k! M^k, the inverse of phi_series(M) for rho(M) < 2 pi."""
    n = M.shape[0]
    B = bernoulli_numbers(max_terms)
    out = np.eye(n)
    power = np.eye(n)
    fact = 1.0
    for k in range(1, max_terms + 1):
        power = power @ M
        fact *= k
        if B[k] == 0.0:
            continue
        term = (B[k] / fact) * power
        out = out + term
        if np.abs(term).max() < 1e-16 * max(1.0, np.abs(out).max()):
            break
    return out


# ---------------------------------------------------------------------------
# dense matrix exp / log
# ---------------------------------------------------------------------------


_TAYLOR16 = np.array([1.0 / factorial(k) for k in range(17)])
_PS_COEFFS = np.zeros((5, 4))
for _j in range(5):
    for _i in range(4):
        if 4 * _j + _i <= 16:
            _PS_COEFFS[_j, _i] = _TAYLOR16[4 * _j + _i]


def expm(A):
    """Matrix exponential by scaling and squaring with a 16-term Taylor kernel.

    The matrix is scaled to 1-norm <= 1/2 (tail bound ~1e-20) and the
    polynomial is evaluated Paterson-Stockmeyer style in powers of X^4.
    """
    A = np.asarray(A, dtype=float)
    norm = np.abs(A).sum(axis=0).max()
    s = 0
    if norm > 0.5:
        s = int(np.ceil(np.log2(norm / 0.5)))
    X = A / 2.0**s if s else A
    X2 = X @ X
    X3 = X2 @ X
    X4 = X2 @ X2
    B = np.tensordot(_PS_COEFFS, np.stack([np.eye(A.shape[0]), X, X2, X3]), axes=1)
    out = B[3] + X4 @ B[4]
    out = B[2] + X4 @ out
    out = B[1] + X4 @ out
    out = B[0] + X4 @ out
    for _ in range(s):
        out = out @ out
    return out


def sqrtm_db(A, tol: float = 1e-15, max_iter: int = 60):
    """Principal square root by the (product form) Denman-Beavers iteration."""
    n = A.shape[0]
    Y = np.array(A, dtype=float)
    Z = np.eye(n)
    for _ in range(max_iter):
        Yi = np.linalg.inv(Y)
        Zi = np.linalg.inv(Z)
        Y_new = 0.5 * (Y + Zi)
        Z = 0.5 * (Z + Yi)
        delta = np.abs(Y_new - Y).max()
        Y = Y_new
        if delta <= tol * max(1.0, np.abs(Y).max()):
            break
    return Y


def _log1p_matrix(X, nodes: int = 10):
    """log(I + X) for small X through Gauss-Legendre on int_0^1 X (I + tX)^-1 dt.

    This is the diagonal Pade approximant written in partial fractions.
    """
    t, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    n = X.shape[0]
    out = np.zeros_like(X)
    for tj, wj in zip(t, w):
        out = out + wj * np.linalg.solve(np.eye(n) + tj * X, X)
    return out


def logm(A, max_roots: int = 40):
    """Principal matrix logarithm by inverse scaling and squaring."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    eig = np.linalg.eigvals(A)
    if np.any((np.abs(eig.imag) <= 1e-14 * np.abs(eig)) & (eig.real <= 0.0)):
        raise DomainError("matrix has an eigenvalue on the closed negative real axis")
    k = 0
    while np.abs(A - np.eye(n)).sum(axis=0).max() > 0.25:
        if k >= max_roots:
            raise DomainError("square-root phase did not approach the identity")
        A = sqrtm_db(A)
        k += 1
    return 2.0**k * _log1p_matrix(A - np.eye(n))


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------


class LieGroup:
    """Base class. Subclasses fix the coordinate shapes and the group law.

    ``alg_shape`` is the coordinate shape of algebra elements and covectors;
    ``ad_matrix(xi)`` is the matrix of ``ad_xi`` acting on flattened
    coordinates. The series-based dexp family below is correct for every
    subclass, closed forms override it where they exist.
    """

    name = "group"
    alg_shape: tuple = ()

    @property
    def dim(self) -> int:
        return int(np.prod(self.alg_shape))

    # group law -----------------------------------------------------------
    def identity(self):
        raise NotImplementedError

    def compose(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def exp(self, xi):
        raise NotImplementedError

    def log(self, g):
        raise NotImplementedError

    def validate(self, g, tol: float = 1e-10):
        """Raise ValueError unless ``g`` satisfies the group constraint."""

    def _same(self, *elems):
        shape = self.__dict__.get("_elem_shape")
        if shape is None:
            shape = self._elem_shape = np.shape(self.identity())
        for e in elems:
            if np.shape(e) != shape:
                raise GroupMismatch(
                    f"{self.name}: element of shape {np.shape(e)} does not belong here"
                )

    def zero(self):
        return np.zeros(self.alg_shape)

    # pairing ---------------------------------------------------------------
    def pair(self, mu, xi) -> float:
        return float(np.sum(np.asarray(mu) * np.asarray(xi)))

    def norm(self, xi) -> float:
        return float(np.sqrt(self.pair(xi, xi)))

    # algebra ---------------------------------------------------------------
    def bracket(self, xi, eta):
        return (self.ad_matrix(xi) @ np.ravel(eta)).reshape(self.alg_shape)

    def ad_matrix(self, xi):
        raise NotImplementedError

    def coad(self, xi, mu):
        """Dual of ad: <coad(xi, mu), eta> = <mu, [xi, eta]>."""
        return (self.ad_matrix(xi).T @ np.ravel(mu)).reshape(self.alg_shape)

    def dexpinv_radius_check(self, xi):
        ev = np.linalg.eigvals(self.ad_matrix(xi))
        if ev.size and np.abs(ev).max() >= 2 * np.pi - 1e-8:
            raise DomainError("dexp is singular: |ad| spectrum reaches 2*pi")

    def dexp_matrix(self, xi):
        return phi_expm(self.ad_matrix(xi))

    def dexpinv_matrix(self, xi):
        # a linear solve stays accurate right up to the 2 pi radius, where the
        # Bernoulli series converges too slowly to be useful
        self.dexpinv_radius_check(xi)
        D = self.dexp_matrix(xi)
        return np.linalg.solve(D, np.eye(D.shape[0]))

    def _apply(self, M, v):
        return (M @ np.ravel(v)).reshape(self.alg_shape)

    def dexp(self, xi, eta):
        return self._apply(self.dexp_matrix(xi), eta)

    def dexpinv(self, xi, eta):
        return self._apply(self.dexpinv_matrix(xi), eta)

    def dexp_dual(self, xi, mu):
        return self._apply(self.dexp_matrix(xi).T, mu)

    def dexpinv_dual(self, xi, mu):
        return self._apply(self.dexpinv_matrix(xi).T, mu)

    # right trivialisation of tangent / cotangent vectors ---------------------
    # Points are embedded in a Euclidean space of the element's shape and the
    # ambient pairing is again sum(a * b).
    def tangent_push(self, x, xi):
        """R_{x*} xi as an ambient tangent vector."""
        raise NotImplementedError

    def tangent_pull(self, x, v):
        """Inverse of tangent_push on T_x G."""
        raise NotImplementedError

    def covector_pull(self, x, p):
        """R_x^* p: the algebra covector with <R_x^* p, xi> = <p, R_{x*} xi>."""
        raise NotImplementedError

    def covector_push(self, x, mu):
        """An ambient covector p with covector_pull(x, p) == mu."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class Euclidean(LieGroup):
    """R^d under addition. exp and log are the identity map."""

    def __init__(self, d: int):
        self.d = d
        self.alg_shape = (d,)
        self.name = f"R{d}"

    def identity(self):
        return np.zeros(self.d)

    def compose(self, g, h):
        self._same(g, h)
        return np.asarray(g, float) + np.asarray(h, float)

    def inverse(self, g):
        return -np.asarray(g, float)

    def exp(self, xi):
        return np.array(xi, dtype=float)

    def log(self, g):
        return np.array(g, dtype=float)

    def ad_matrix(self, xi):
        return np.zeros((self.d, self.d))

    def dexp_matrix(self, xi):
        return np.eye(self.d)

    def dexpinv_matrix(self, xi):
        return np.eye(self.d)

    def tangent_push(self, x, xi):
        return np.array(xi, dtype=float)

    tangent_pull = tangent_push

    def covector_pull(self, x, p):
        return np.array(p, dtype=float)

    covector_push = covector_pull

    def __repr__(self):
        return f"Euclidean({self.d})"


# quaternions ---------------------------------------------------------------


def cross(a, b):
    """3-vector cross product (np.cross has a large per-call overhead)."""
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    )


def quat_mul(p, q):
    p0, p1, p2, p3 = p
    q0, q1, q2, q3 = q
    return np.array(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 + p2 * q0 + p3 * q1 - p1 * q3,
            p0 * q3 + p3 * q0 + p1 * q2 - p2 * q1,
        ]
    )


def quat_conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]], dtype=float)


def euler_rodriguez(q):
    """Rotation matrix I + 2 q0 hat(q) + 2 hat(q)^2 of a unit quaternion."""
    a, b, c, d = q
    return np.array(
        [
            [1.0 - 2.0 * (c * c + d * d), 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
            [2.0 * (b * c + a * d), 1.0 - 2.0 * (b * b + d * d), 2.0 * (c * d - a * b)],
            [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), 1.0 - 2.0 * (b * b + c * c)],
        ]
    )


def _small_angle_coeffs(theta):
    """(1-cos t)/t^2, (t-sin t)/t^3 and (1 - (t/2)cot(t/2))/t^2, series near 0."""
    t2 = theta * theta
    if theta < 1e-8:
        return 0.5, 1.0 / 6.0, 1.0 / 12.0
    a = 2.0 * sin(0.5 * theta) ** 2 / t2
    if theta < 0.1:
        # truncation error below 1e-17 on this range
        b = 1.0 / 6.0 - t2 / 120.0 + t2**2 / 5040.0 - t2**3 / 362880.0
        c = 1.0 / 12.0 + t2 / 720.0 + t2**2 / 30240.0 + t2**3 / 1209600.0
        return a, b, c
    b = (theta - sin(theta)) / (t2 * theta)
    c = (1.0 - 0.5 * theta / tan(0.5 * theta)) / t2
    return a, b, c


def _rotation_dexp(A, theta):
    a, b, _ = _small_angle_coeffs(theta)
    return np.eye(3) + a * A + b * A @ A


def _rotation_dexpinv(A, theta):
    if theta >= 2 * np.pi - 1e-8:
        raise DomainError("dexp is singular: rotation angle reaches 2*pi")
    _, _, c = _small_angle_coeffs(theta)
    return np.eye(3) - 0.5 * A + c * A @ A


class UnitQuaternions(LieGroup):
    """S^3 with the quaternion product; algebra = pure quaternions ~ R^3.

    ``exp([0, v]) = [cos|v|, sin|v| v/|v|]`` so ``ad_v = 2 hat(v)``.
    """

    name = "S3"
    alg_shape = (3,)

    def identity(self):
        return np.array([1.0, 0.0, 0.0, 0.0])

    @staticmethod
    def normalize(q):
        q = np.asarray(q, dtype=float)
        return q / sqrt(float(q @ q))

    def compose(self, g, h):
        self._same(g, h)
        return self.normalize(quat_mul(g, h))

    def inverse(self, g):
        return quat_conj(g)

    def exp(self, xi):
        v = np.asarray(xi, dtype=float)
        a = sqrt(float(v @ v))
        k = sin(a) / a if a > 1e-8 else 1.0 - a * a / 6.0
        return self.normalize(np.array([cos(a), k * v[0], k * v[1], k * v[2]]))

    def log(self, g):
        g = np.asarray(g, dtype=float)
        s = np.linalg.norm(g[1:])
        if g[0] <= -1.0 + 1e-14 and s < 1e-7:
            raise DomainError("quaternion log undefined at -1; reduce the step size")
        angle = np.arctan2(s, g[0])
        if s < 1e-300:
            return np.zeros(3)
        return angle * g[1:] / s

    def validate(self, g, tol=1e-10):
        if abs(np.linalg.norm(g) - 1.0) > tol:
            raise ValueError(f"quaternion norm {np.linalg.norm(g)!r} is not 1")

    def ad_matrix(self, xi):
        return 2.0 * hat(xi)

    def dexp_matrix(self, xi):
        xi = np.asarray(xi, dtype=float)
        return _rotation_dexp(2.0 * hat(xi), 2.0 * np.linalg.norm(xi))

    def dexpinv_matrix(self, xi):
        xi = np.asarray(xi, dtype=float)
        return _rotation_dexpinv(2.0 * hat(xi), 2.0 * np.linalg.norm(xi))

    # vector forms of the same closed formulas: A eta = 2 xi x eta, A^T = -A
    def _rot_terms(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        Ae = 2.0 * cross(xi, eta)
        return Ae, 2.0 * cross(xi, Ae), 2.0 * sqrt(float(xi @ xi))

    def dexp(self, xi, eta):
        Ae, AAe, theta = self._rot_terms(xi, eta)
        a, b, _ = _small_angle_coeffs(theta)
        return eta + a * Ae + b * AAe

    def dexp_dual(self, xi, mu):
        Ae, AAe, theta = self._rot_terms(xi, mu)
        a, b, _ = _small_angle_coeffs(theta)
        return mu - a * Ae + b * AAe

    def dexpinv(self, xi, eta):
        Ae, AAe, theta = self._rot_terms(xi, eta)
        if theta >= 2 * np.pi - 1e-8:
            raise DomainError("dexp is singular: rotation angle reaches 2*pi")
        _, _, c = _small_angle_coeffs(theta)
        return eta - 0.5 * Ae + c * AAe

    def dexpinv_dual(self, xi, mu):
        Ae, AAe, theta = self._rot_terms(xi, mu)
        if theta >= 2 * np.pi - 1e-8:
            raise DomainError("dexp is singular: rotation angle reaches 2*pi")
        _, _, c = _small_angle_coeffs(theta)
        return mu + 0.5 * Ae + c * AAe

    def tangent_push(self, x, xi):
        return quat_mul(np.array([0.0, xi[0], xi[1], xi[2]]), x)

    def tangent_pull(self, x, v):
        return quat_mul(v, quat_conj(x))[1:]

    # right multiplication by a unit quaternion is an isometry of R^4
    covector_pull = tangent_pull
    covector_push = tangent_push


# matrix groups -------------------------------------------------------------


def _mat_ad(xi):
    """Matrix of eta -> xi eta - eta xi on row-major flattened 3x3 matrices."""
    I = np.eye(3)
    return np.kron(xi, I) - np.kron(I, xi.T)


class GLPlus3(LieGroup):
    """3x3 real matrices with positive determinant."""

    name = "GL+(3)"
    alg_shape = (3, 3)

    def identity(self):
        return np.eye(3)

    def compose(self, g, h):
        self._same(g, h)
        return np.asarray(g, float) @ np.asarray(h, float)

    def inverse(self, g):
        d = np.linalg.det(g)
        if not d > 0.0:
            raise DomainError(f"det(F) = {d!r} is not positive")
        return np.linalg.inv(g)

    def check_algebra(self, xi):
        """Raise ValueError unless ``xi`` lies in the algebra (no-op for gl(3))."""

    def exp(self, xi):
        self.check_algebra(xi)
        return expm(xi)

    def log(self, g):
        return logm(g)

    def validate(self, g, tol=1e-10):
        if not np.linalg.det(g) > 0.0:
            raise ValueError("det(F) must be positive")

    def ad_matrix(self, xi):
        return _mat_ad(np.asarray(xi, dtype=float))

    def tangent_push(self, x, xi):
        return xi @ x

    def tangent_pull(self, x, v):
        return v @ np.linalg.inv(x)

    def covector_pull(self, x, p):
        return p @ x.T

    def covector_push(self, x, mu):
        return mu @ np.linalg.inv(x).T


class SL3(GLPlus3):
    """Unimodular 3x3 matrices; algebra = traceless matrices."""

    name = "SL(3)"

    def validate(self, g, tol=1e-10):
        if abs(np.linalg.det(g) - 1.0) > tol:
            raise ValueError(f"det(F) = {np.linalg.det(g)!r} is not 1")

    def check_algebra(self, xi):
        if abs(np.trace(xi)) > 1e-12 * max(1.0, np.abs(xi).max()):
            raise ValueError("sl(3) elements must be traceless")

    def log(self, g):
        L = logm(g)
        return L - np.trace(L) / 3.0 * np.eye(3)


class SO3(LieGroup):
    """Rotation matrices; algebra coordinates are 3-vectors (hat map)."""

    name = "SO(3)"
    alg_shape = (3,)

    def identity(self):
        return np.eye(3)

    def compose(self, g, h):
        self._same(g, h)
        return np.asarray(g, float) @ np.asarray(h, float)

    def inverse(self, g):
        return np.asarray(g, float).T.copy()

    def exp(self, xi):
        xi = np.asarray(xi, dtype=float)
        t = np.linalg.norm(xi)
        A = hat(xi)
        if t < 1e-4:
            a = 1.0 - t * t / 6.0
            b = 0.5 - t * t / 24.0
        else:
            a = np.sin(t) / t
            b = (1.0 - np.cos(t)) / t**2
        return np.eye(3) + a * A + b * A @ A

    def log(self, g):
        R = np.asarray(g, dtype=float)
        c = np.clip(0.5 * (np.trace(R) - 1.0), -1.0, 1.0)
        t = np.arccos(c)
        if t > np.pi - 1e-6:
            raise DomainError("rotation angle is pi; principal log is not unique")
        w = vee(R - R.T)
        if t < 1e-4:
            return 0.5 * (1.0 + t * t / 6.0) * w
        return 0.5 * t / np.sin(t) * w

    def validate(self, g, tol=1e-10):
        if np.abs(g.T @ g - np.eye(3)).max() > tol or abs(np.linalg.det(g) - 1) > tol:
            raise ValueError("matrix is not a rotation")

    def ad_matrix(self, xi):
        return hat(xi)

    def dexp_matrix(self, xi):
        xi = np.asarray(xi, dtype=float)
        return _rotation_dexp(hat(xi), np.linalg.norm(xi))

    def dexpinv_matrix(self, xi):
        xi = np.asarray(xi, dtype=float)
        return _rotation_dexpinv(hat(xi), np.linalg.norm(xi))

    def tangent_push(self, x, xi):
        return hat(xi) @ x

    def tangent_pull(self, x, v):
        return vee(v @ x.T)

    def covector_pull(self, x, p):
        M = p @ x.T
        return np.array([M[2, 1] - M[1, 2], M[0, 2] - M[2, 0], M[1, 0] - M[0, 1]])

    def covector_push(self, x, mu):
        return 0.5 * hat(mu) @ x


class Semidirect(LieGroup):
    """G x g* with (F1, P1)(F2, P2) = (F1 F2, P1 + F1^-T P2 F1^T).

    Elements, algebra elements and covectors are all stacked as arrays of
    shape (2, 3, 3): index 0 is the group/matrix part, index 1 the g* part.
    The second factor transforms by the coadjoint action
    ``Ad*_{F^-1} P = F^-T P F^T``; its infinitesimal generator is
    ``-coad(xi, .)`` with ``coad(xi, mu) = xi^T mu - mu xi^T``.
    """

    alg_shape = (2, 3, 3)

    def __init__(self, base: LieGroup | None = None):
        self.base = base if base is not None else GLPlus3()
        self.name = f"{self.base.name} x g*"

    def identity(self):
        return np.stack([np.eye(3), np.zeros((3, 3))])

    @staticmethod
    def make(F, P):
        return np.stack([np.asarray(F, dtype=float), np.asarray(P, dtype=float)])

    @staticmethod
    def _rho(F, P):
        Fit = np.linalg.inv(F).T
        return Fit @ P @ F.T

    @staticmethod
    def mat_coad(xi, mu):
        return xi.T @ mu - mu @ xi.T

    def compose(self, g, h):
        self._same(g, h)
        return self.make(g[0] @ h[0], g[1] + self._rho(g[0], h[1]))

    def inverse(self, g):
        Fi = self.base.inverse(g[0])
        return self.make(Fi, -self._rho(Fi, g[1]))

    def _phi_coad(self, xi):
        # (exp(-coad_xi) - 1) / (-coad_xi) on flattened 3x3 covectors
        return phi_series(-_mat_ad(xi).T)

    def exp(self, xi):
        # The P part is int_0^1 e^{-s a^T} m e^{s a^T} ds; the Van Loan block
        # exponential of [[a^T, m], [0, a^T]] has e^{a^T} times that integral
        # as its upper-right block.
        xi = np.asarray(xi, dtype=float)
        self.base.check_algebra(xi[0])
        M = np.zeros((6, 6))
        M[:3, :3] = M[3:, 3:] = xi[0].T
        M[:3, 3:] = xi[1]
        E = expm(M)
        return self.make(E[:3, :3].T, np.linalg.solve(E[:3, :3], E[:3, 3:]))

    def log(self, g):
        g = np.asarray(g, dtype=float)
        L = self.base.log(g[0])
        mu = np.linalg.solve(self._phi_coad(L), g[1].ravel()).reshape(3, 3)
        return self.make(L, mu)

    def validate(self, g, tol=1e-10):
        self.base.validate(g[0], tol)

    def ad_matrix(self, xi):
        xi = np.asarray(xi, dtype=float)
        A = _mat_ad(xi[0])
        C = A.T  # coad(xi0, .)
        M = np.zeros((18, 18))
        M[:9, :9] = A
        # [(a, m), (b, n)] = ([a, b], -coad(a, n) + coad(b, m))
        M[9:, 9:] = -C
        mu = xi[1]
        # coad(b, m) as a linear map of b: b^T m - m b^T
        for k in range(9):
            E = np.zeros(9)
            E[k] = 1.0
            E = E.reshape(3, 3)
            M[9:, k] = self.mat_coad(E, mu).ravel()
        return M

    def tangent_push(self, x, xi):
        F, P = x
        return self.make(xi[0] @ F, xi[1] - xi[0].T @ P + P @ xi[0].T)

    def tangent_pull(self, x, v):
        F, P = x
        a = v[0] @ np.linalg.inv(F)
        return self.make(a, v[1] + a.T @ P - P @ a.T)

    def covector_pull(self, x, p):
        F, P = x
        return self.make(p[0] @ F.T + self.mat_coad(p[1], P), p[1])

    def covector_push(self, x, mu):
        F, P = x
        return self.make((mu[0] - self.mat_coad(mu[1], P)) @ np.linalg.inv(F).T, mu[1])

    def __repr__(self):
        return f"Semidirect({self.base!r})"


GROUPS = {
    "S3": UnitQuaternions,
    "SO3": SO3,
    "GL+3": GLPlus3,
    "SL3": SL3,
    "semidirect": Semidirect,
}
