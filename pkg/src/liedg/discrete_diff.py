"""Trivialised discrete differentials.

On a Lie group a discrete differential ``dH(u, v)`` is a covector in g* with

    H(v) - H(u) = <dH(u, v), log(v u^-1)>,     dH(x, x) = R_x^* dH_x.

The manifold variants return a covector at a centre point ``c`` and use the
retraction ``phi_c`` in place of exp/log. Each function takes an optional
``eta`` when ``log(v u^-1)`` is already known, which saves a logarithm inside
nonlinear solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import manifold
from .quadrature import gauss_legendre_nodes

# Below this squared norm (|eta| ~ 1e-13, i.e. round-off in log(v u^-1)) the
# Gonzalez correction is replaced by its limit 0. Keeping it would divide the
# rounding error of H(v) - H(u) by |eta|^2, while dropping it changes the
# chain-rule residual only by O(|eta|^3).
_ETA_FLOOR = 1e-26


@dataclass(frozen=True)
class FirstIntegral:
    """A scalar invariant H and its right-trivialised differential x -> R_x^* dH_x.

    For manifold problems ``differential`` returns the ambient gradient.
    """

    value: Callable[[np.ndarray], float]
    differential: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> float:
        return self.value(x)


@dataclass(frozen=True)
class Scheme:
    """Which discrete differential to use.

    ``kind`` is ``"gonzalez"``, ``"avf"`` or ``"midpoint"``; the last is the
    Gonzalez formula without its correction term (symmetric, not
    integral-preserving). ``nodes`` is the Gauss-Legendre count for AVF.
    """

    kind: str = "gonzalez"
    nodes: int = 6

    def __post_init__(self):
        if self.kind not in ("gonzalez", "avf", "midpoint"):
            raise ValueError(f"unknown discrete differential {self.kind!r}")


def _eta(group, u, v, eta):
    if eta is None:
        eta = group.log(group.compose(v, group.inverse(u)))
    return eta


def midpoint(group, u, v, eta=None):
    """c = exp(eta/2) u, the symmetric centre of the pair."""
    eta = _eta(group, u, v, eta)
    return group.compose(group.exp(0.5 * eta), u)


def ddiff_avf(group, H: FirstIntegral, u, v, nodes: int = 6, eta=None):
    """Average of R^* dH along l(s) = exp(s log(v u^-1)) u."""
    eta = _eta(group, u, v, eta)
    s, w = gauss_legendre_nodes(nodes)
    out = np.zeros(group.alg_shape)
    for sj, wj in zip(s, w):
        out = out + wj * H.differential(group.compose(group.exp(sj * eta), u))
    return out


def ddiff_gonzalez(group, H: FirstIntegral, u, v, c=None, eta=None):
    """Gonzalez-type discrete differential with the pairing as inner product."""
    eta = _eta(group, u, v, eta)
    if c is None:
        c = group.compose(group.exp(0.5 * eta), u)
    dc = H.differential(c)
    nn = group.pair(eta, eta)
    if nn <= _ETA_FLOOR:
        return dc
    alpha = (H.value(v) - H.value(u) - group.pair(dc, eta)) / nn
    return dc + alpha * eta


def ddiff_midpoint(group, H: FirstIntegral, u, v, c=None, eta=None):
    eta = _eta(group, u, v, eta)
    if c is None:
        c = group.compose(group.exp(0.5 * eta), u)
    return H.differential(c)


def ddiff(scheme: Scheme, group, H: FirstIntegral, u, v, eta=None, c=None):
    """Dispatch on ``scheme.kind``; ``c`` is the midpoint exp(eta/2) u if known."""
    if scheme.kind == "avf":
        return ddiff_avf(group, H, u, v, scheme.nodes, eta=eta)
    if scheme.kind == "gonzalez":
        return ddiff_gonzalez(group, H, u, v, c=c, eta=eta)
    return ddiff_midpoint(group, H, u, v, c=c, eta=eta)


def chain_rule_residual(group, H: FirstIntegral, dbar, u, v) -> float:
    eta = group.log(group.compose(v, group.inverse(u)))
    return abs(H.value(v) - H.value(u) - group.pair(dbar, eta))


# -- sphere ------------------------------------------------------------------


def _center(p, q, c):
    return manifold.center(p, q) if c is None else np.asarray(c, dtype=float)


def ddiff_manifold_gonzalez(H: FirstIntegral, p, q, c=None):
    """dH|_c + (H(q) - H(p) - <dH|_c, eta>) / |eta|^2 eta, eta = phi_c^-1(q) - phi_c^-1(p).

    ``dH|_c`` is represented by the ambient gradient; its normal component
    pairs to zero with tangent vectors at c.
    """
    c = _center(p, q, c)
    dc = H.differential(c)
    eta = manifold.retract_inverse(c, q).vec - manifold.retract_inverse(c, p).vec
    nn = float(eta @ eta)
    if nn <= _ETA_FLOOR:
        return dc
    return dc + (H.value(q) - H.value(p) - float(dc @ eta)) / nn * eta


def ddiff_manifold_midpoint(H: FirstIntegral, p, q, c=None):
    return H.differential(_center(p, q, c))


def ddiff_manifold_avf(H: FirstIntegral, p, q, c=None, nodes: int = 6):
    """int_0^1 phi_c^* dH at phi_c((1-s) v + s w) ds with p = phi_c(v), q = phi_c(w)."""
    c = _center(p, q, c)
    v = manifold.retract_inverse(c, p).vec
    w = manifold.retract_inverse(c, q).vec
    s, wt = gauss_legendre_nodes(nodes)
    out = np.zeros_like(c)
    for sj, wj in zip(s, wt):
        g = (1.0 - sj) * v + sj * w
        T = manifold.retraction_tangent_map(c, g)
        out = out + wj * (T @ H.differential(manifold.retract(c, g)))
    return out


def ddiff_manifold(scheme: Scheme, H: FirstIntegral, p, q, c=None):
    if scheme.kind == "avf":
        return ddiff_manifold_avf(H, p, q, c, scheme.nodes)
    if scheme.kind == "gonzalez":
        return ddiff_manifold_gonzalez(H, p, q, c)
    return ddiff_manifold_midpoint(H, p, q, c)


def manifold_chain_rule_residual(H: FirstIntegral, dbar, p, q, c=None) -> float:
    c = _center(p, q, c)
    eta = manifold.retract_inverse(c, q).vec - manifold.retract_inverse(c, p).vec
    return abs(H.value(q) - H.value(p) - float(dbar @ eta))


# -- quaternion AVF through the Riemannian gradient ----------------------------


def ddiff_avf_riemannian_s3(problem, q, q_next, nodes: int = 6, eta=None):
    """Average of grad H|_{q(s)} . conj(q(s)) along q(s) = exp(s eta) q."""
    G = problem.group
    eta = _eta(G, q, q_next, eta)
    s, w = gauss_legendre_nodes(nodes)
    out = np.zeros(3)
    for sj, wj in zip(s, w):
        out = out + wj * problem.trivialized_gradient(G.compose(G.exp(sj * eta), q))
    return out
