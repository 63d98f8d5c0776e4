from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _gl(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_legendre_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1], exact to degree 2n - 1."""
    if not 1 <= int(n) <= 32:
        raise ValueError(f"node count must be in 1..32, got {n}")
    x, w = _gl(int(n))
    return x.copy(), w.copy()
