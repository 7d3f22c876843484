"""Reference quadrature rules: Gauss-Legendre on [0, 1] and collapsed Gauss on
the unit triangle."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """``order``-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def triangle_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed Gauss rule on the triangle (0,0), (1,0), (0,1).

    Returns barycentric coordinates of shape (m, 3) and weights summing to
    1/2.  With ``order`` points per direction it integrates polynomials of
    degree ``2*order - 2`` exactly.
    """
    t, wt = gauss01(order)
    # (s, r) -> (x, y) = (s (1 - r), r): Jacobian (1 - r)
    r, s = np.meshgrid(t, t, indexing="ij")
    wr, ws = np.meshgrid(wt, wt, indexing="ij")
    x = (s * (1.0 - r)).ravel()
    y = r.ravel()
    w = (wr * ws * (1.0 - r)).ravel()
    bary = np.column_stack([1.0 - x - y, x, y])
    bary.setflags(write=False)
    w.setflags(write=False)
    return bary, w
