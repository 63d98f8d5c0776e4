"""One-step methods.

``dg_step``           x1 = exp(h dH(x0, x1) ⌟ omega_bar(x0, x1)) x0
``manifold_dg_step``  x1 = phi_c(phi_c^-1(x0) + h dH(x0, x1) ⌟ omega_bar(x0, x1))
``collocation_step``  energy-preserving Lie group collocation (Gauss nodes -> order 2s)
``heun_step``         explicit order-2 Lie group comparator

The implicit methods are solved by fixed-point iteration on the algebra
increment, started from the explicit Euler predictor and accelerated by
Anderson mixing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from . import manifold
from .discrete_diff import Scheme, ddiff, ddiff_manifold
from .quadrature import gauss_legendre_nodes


class SolverError(RuntimeError):
    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class StepConfig:
    """Step size and nonlinear-solver settings shared by the implicit steps.

    ``anderson`` is the Anderson mixing depth used by the solver (0 gives the
    plain fixed-point iteration).
    """

    h: float
    solver_tol: float = 1e-14
    max_iter: int = 100
    scheme: Scheme = field(default_factory=Scheme)
    stage_quadrature_nodes: int = 10
    anderson: int = 5

    def __post_init__(self):
        if not np.isfinite(self.h):
            raise ValueError("step size must be finite")
        if not self.solver_tol > 0:
            raise ValueError("solver tolerance must be positive")
        if self.max_iter < 1 or self.anderson < 0:
            raise ValueError("max_iter must be >= 1 and anderson >= 0")


class FixedPoint(NamedTuple):
    z: np.ndarray
    iterations: int
    residual: float


def _euclid(v) -> float:
    return float(np.sqrt(np.sum(np.asarray(v) ** 2)))


def fixed_point_solve(
    z0,
    update: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-14,
    max_iter: int = 100,
    norm: Callable[[np.ndarray], float] = _euclid,
    depth: int = 0,
    polish: int = 3,
    stall: int = 8,
) -> FixedPoint:
    """Solve z = update(z) until |update(z) - z| <= tol; returns update(z).

    ``depth > 0`` applies Anderson mixing over that many previous iterates,
    which keeps the iteration usable when update is only weakly contractive
    (stiff rigid bodies). ``depth=0`` is the plain iteration.

    Once the tolerance is met, up to ``polish`` further iterations are taken
    while each still halves the residual. Invariant-preservation errors scale
    with the final residual, so this buys accuracy almost for free.

    A tolerance can lie below the rounding noise of ``update`` itself (large
    increments, e.g. |z| ~ 10 against tol = 1e-14). If the residual has not
    halved for ``stall`` iterations and the best one is within ``ROUNDOFF_ULPS``
    ulps of |z|, the best iterate is returned as converged to working
    precision. Anything else that runs out of iterations raises SolverError.
    """
    z = np.asarray(z0, dtype=float)
    shape = z.shape
    dG: list = []
    dF: list = []
    g_prev = f_prev = None
    res = float("inf")
    best = None  # first iterate meeting tol, then polished
    lowest = None  # lowest residual seen, for the round-off exit
    since_lowest = 0
    for k in range(1, max_iter + 1):
        g = np.asarray(update(z), dtype=float)
        f = g - z
        res = norm(f)
        if best is not None:
            # polishing phase: keep going only while the residual halves
            if not res < 0.5 * best.residual:
                return best
            best = FixedPoint(g, k, res)
            if k - conv_k >= polish:
                return best
        elif res <= tol:
            best, conv_k = FixedPoint(g, k, res), k
            if polish <= 0 or res == 0.0:
                return best
        if not np.isfinite(res):
            break
        if lowest is None or res < 0.5 * lowest.residual:
            lowest, since_lowest = FixedPoint(g, k, res), 0
        else:
            if res < lowest.residual:
                lowest = FixedPoint(g, k, res)
            since_lowest += 1
            if best is None and since_lowest >= stall and _at_roundoff(lowest, norm):
                return lowest
        if depth <= 0:
            z = g
            continue
        gv, fv = g.ravel(), f.ravel()
        if g_prev is not None:
            dG.append(gv - g_prev)
            dF.append(fv - f_prev)
            if len(dF) > depth:
                dG.pop(0)
                dF.pop(0)
        g_prev, f_prev = gv, fv
        if dF:
            Fm = np.array(dF).T
            gamma = np.linalg.lstsq(Fm, fv, rcond=None)[0]
            z = (gv - np.array(dG).T @ gamma).reshape(shape)
        else:
            z = g
    if best is not None:
        return best
    if lowest is not None and _at_roundoff(lowest, norm):
        return lowest
    raise SolverError(
        f"fixed-point iteration did not converge in {max_iter} iterations "
        f"(last increment {res:.3e}); try a smaller step size",
        residual=res,
        iterations=max_iter,
    )


# residuals this many ulps of |z| are indistinguishable from rounding in update
ROUNDOFF_ULPS = 256


def _at_roundoff(sol: FixedPoint, norm) -> bool:
    return sol.residual <= ROUNDOFF_ULPS * np.finfo(float).eps * max(1.0, norm(sol.z))


# ---------------------------------------------------------------------------
# discrete-gradient steps
# ---------------------------------------------------------------------------


def dg_increment(x, z, cfg: StepConfig, problem):
    """h F(x, exp(z) x) for the current guess z of the algebra increment."""
    G = problem.group
    half = G.exp(0.5 * z)
    c = G.compose(half, x)
    x1 = G.compose(half, c)
    dbar = ddiff(cfg.scheme, G, problem.H, x, x1, eta=z, c=c)
    return cfg.h * problem.omega(c).contract(dbar)


def dg_step(x, cfg: StepConfig, problem, return_info: bool = False):
    G = problem.group
    if cfg.h == 0:
        return (x, FixedPoint(G.zero(), 0, 0.0)) if return_info else x
    sol = fixed_point_solve(
        cfg.h * problem.field(x),
        lambda z: dg_increment(x, z, cfg, problem),
        cfg.solver_tol,
        cfg.max_iter,
        G.norm,
        cfg.anderson,
    )
    x1 = G.compose(G.exp(sol.z), x)
    return (x1, sol) if return_info else x1


def manifold_dg_step(p, cfg: StepConfig, problem, center=manifold.center, return_info=False):
    p = np.asarray(p, dtype=float)
    if cfg.h == 0:
        return (p, FixedPoint(p, 0, 0.0)) if return_info else p

    def update(q):
        c = center(p, q)
        dbar = ddiff_manifold(cfg.scheme, problem.H, p, q, c)
        W = manifold.retract_inverse(c, p).vec + cfg.h * problem.omega_bar(p, q).contract(dbar)
        return manifold.retract(c, W)

    guess = manifold.retract(p, cfg.h * problem.field(p))
    sol = fixed_point_solve(guess, update, cfg.solver_tol, cfg.max_iter, depth=cfg.anderson)
    return (sol.z, sol) if return_info else sol.z


def heun_step(x, h, problem):
    G = problem.group
    k1 = problem.field(x)
    k2 = problem.field(G.compose(G.exp(h * k1), x))
    return G.compose(G.exp(0.5 * h * (k1 + k2)), x)


# ---------------------------------------------------------------------------
# collocation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CollocationTableau:
    """Nodes c_j in [0, 1], Lagrange basis l_j and normalisations b_j.

    ``b`` defaults to ``int_0^1 l_j``, which is what makes the stage
    differentials consistent with R^* dH (the quadrature weights of the nodes).
    """

    nodes: tuple
    b: tuple = None

    def __post_init__(self):
        c = np.asarray(self.nodes, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("need at least one collocation node")
        if np.any(c < 0) or np.any(c > 1) or len(set(c.tolist())) != c.size:
            raise ValueError("nodes must be distinct and lie in [0, 1]")
        object.__setattr__(self, "nodes", tuple(c.tolist()))
        if self.b is None:
            object.__setattr__(self, "b", tuple(float(L(1.0)) for L in self.integrated_basis))
        if len(self.b) != c.size or any(bj == 0 for bj in self.b):
            raise ValueError("need one nonzero b_j per node")

    @classmethod
    def gauss(cls, s: int = 2, b=None):
        x, _ = gauss_legendre_nodes(s)
        return cls(tuple(x), b)

    @property
    def s(self) -> int:
        return len(self.nodes)

    @property
    def basis(self):
        P = np.polynomial.Polynomial
        c = self.nodes
        out = []
        for j, cj in enumerate(c):
            others = [ci for i, ci in enumerate(c) if i != j]
            lj = P.fromroots(others) if others else P([1.0])
            out.append(lj / lj(cj))
        return out

    @property
    def integrated_basis(self):
        return [lj.integ(lbnd=0.0) for lj in self.basis]


@lru_cache(maxsize=32)
def _stage_matrices(tableau: CollocationTableau, n_quad: int):
    """Matrices mapping stage slopes K to sigma at the nodes / quadrature points.

    sigma(t h) = h sum_j L_j(t) k_j with L_j the integral of l_j; ``Wq[j]``
    holds the quadrature weights of l_j / b_j.
    """
    ell = tableau.basis
    Lint = tableau.integrated_basis
    b = np.asarray(tableau.b, dtype=float)
    xq, wq = gauss_legendre_nodes(n_quad)
    A = np.array([[Lj(ci) for Lj in Lint] for ci in tableau.nodes])
    Aq = np.array([[Lj(xm) for Lj in Lint] for xm in xq])
    lq = np.array([[lj(xm) for lj in ell] for xm in xq])
    Wq = (wq[:, None] * lq / b[None, :]).T
    final = np.array([Lj(1.0) for Lj in Lint])
    return A, Aq, Wq, final


def collocation_step(x0, tableau: CollocationTableau, cfg: StepConfig, problem, return_info=False):
    G = problem.group
    h = cfg.h
    s = tableau.s
    if h == 0:
        return (x0, None) if return_info else x0
    A, Aq, Wq, final = _stage_matrices(tableau, cfg.stage_quadrature_nodes)
    nq = Aq.shape[0]
    shape = G.alg_shape

    def combo(coeffs, K):
        return h * np.tensordot(coeffs, K, axes=(0, 0))

    def update(K):
        Kf = K.reshape(s, -1)
        sig_q = (h * (Aq @ Kf)).reshape((nq,) + shape)
        sig_c = (h * (A @ Kf)).reshape((s,) + shape)
        # covector dexp*_{sigma(xi h)} R^* dH along the path, at quadrature nodes
        mus = np.empty((nq, Kf.shape[1]))
        for m, sig in enumerate(sig_q):
            X = G.compose(G.exp(sig), x0)
            mus[m] = np.ravel(G.dexp_dual(sig, problem.H.differential(X)))
        avgs = (Wq @ mus).reshape((s,) + shape)
        K_new = np.empty_like(K)
        for j in range(s):
            sig_j = sig_c[j]
            dbar_j = G.dexpinv_dual(sig_j, avgs[j])
            Xj = G.compose(G.exp(sig_j), x0)
            K_new[j] = G.dexpinv(sig_j, problem.omega(Xj).contract(dbar_j))
        return K_new

    f0 = problem.field(x0)
    K0 = np.stack([f0] * s)
    sol = fixed_point_solve(
        K0,
        update,
        cfg.solver_tol / abs(h),
        cfg.max_iter,
        lambda d: float(np.sqrt(np.sum(d * d))),
        cfg.anderson,
    )
    x1 = G.compose(G.exp(combo(final, sol.z)), x0)
    return (x1, sol) if return_info else x1


GAUSS2 = CollocationTableau.gauss(2)
