"""Integrals of nonlinear functions of piecewise-linear fields.

Each element is cut along the zero set of ``u`` so that ``u`` has one sign
on every piece; Gauss rules on the pieces are then exact for ``|u|^p`` and
``(u+)^p`` whenever p is an integer below the rule's degree.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .quadrature import gauss01, triangle_rule

ORDER = 6


class LocalIntegrator:
    """Sign-split quadrature over the elements selected by ``element_mask``."""

    def __init__(self, mesh, element_mask, order: int = ORDER):
        self.mesh = mesh
        self.n = mesh.n
        self.mask = np.asarray(element_mask, dtype=bool)
        self.elements = mesh.elements[self.mask]
        self.measure = mesh.measure[self.mask]
        self.order = order
        self.num_nodes = mesh.num_nodes

    @property
    def volume(self) -> float:
        return float(self.measure.sum())

    # -- point generation -------------------------------------------------

    def points(self, u=None):
        """Quadrature points as (element nodes, barycentric coords, weights).

        With ``u`` given, elements are split at the zero set of ``u``.
        """
        if self.n == 1:
            return self._points_1d(u)
        return self._points_2d(u)

    def _points_1d(self, u):
        el = self.elements
        tau, wt = gauss01(self.order)
        E = len(el)
        if u is None:
            cut = np.ones(E)
        else:
            ul, ur = u[el[:, 0]], u[el[:, 1]]
            mixed = (ul > 0) != (ur > 0)
            cut = np.ones(E)
            cut[mixed] = ul[mixed] / (ul[mixed] - ur[mixed])
        t0 = np.stack([np.zeros(E), cut], axis=1)            # (E, 2)
        t1 = np.stack([cut, np.ones(E)], axis=1)
        t = t0[:, :, None] + (t1 - t0)[:, :, None] * tau      # (E, 2, g)
        w = self.measure[:, None, None] * (t1 - t0)[:, :, None] * wt
        t = t.reshape(E, -1)
        w = w.reshape(E, -1)
        k = t.shape[1]
        bary = np.stack([1.0 - t, t], axis=2).reshape(-1, 2)
        nodes = np.repeat(el, k, axis=0)
        return nodes, bary, w.ravel()

    def _points_2d(self, u):
        el = self.elements
        E = len(el)
        ref, wref = triangle_rule(self.order)
        eye = np.eye(3)
        a = np.zeros(E, dtype=np.int64)
        t_ab = np.ones(E)
        t_ac = np.ones(E)
        if u is not None:
            vals = u[el]
            pos = vals > 0
            cnt = pos.sum(axis=1)
            mixed = (cnt == 1) | (cnt == 2)
            lone = np.where(cnt == 1, np.argmax(pos, axis=1), np.argmin(pos, axis=1))
            a[mixed] = lone[mixed]
            rows = np.arange(E)
            b = (a + 1) % 3
            c = (a + 2) % 3
            ua, ub, uc = vals[rows, a], vals[rows, b], vals[rows, c]
            t_ab = np.where(mixed, ua / np.where(mixed, ua - ub, 1.0), 1.0)
            t_ac = np.where(mixed, ua / np.where(mixed, ua - uc, 1.0), 1.0)
        b = (a + 1) % 3
        c = (a + 2) % 3
        ea, eb, ec = eye[a], eye[b], eye[c]
        pab = (1.0 - t_ab)[:, None] * ea + t_ab[:, None] * eb
        pac = (1.0 - t_ac)[:, None] * ea + t_ac[:, None] * ec
        # three sub-triangles in barycentric coordinates: (E, 3, 3, 3)
        sub = np.stack([
            np.stack([ea, pab, pac], axis=1),
            np.stack([pab, eb, ec], axis=1),
            np.stack([pab, ec, pac], axis=1),
        ], axis=1)
        e1 = sub[:, :, 1, 1:] - sub[:, :, 0, 1:]
        e2 = sub[:, :, 2, 1:] - sub[:, :, 0, 1:]
        frac = np.abs(e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0])  # (E, 3)
        bary = np.einsum("mv,epvk->epmk", ref, sub)                      # (E, 3, m, 3)
        w = 2.0 * self.measure[:, None, None] * frac[:, :, None] * wref
        k = bary.shape[1] * bary.shape[2]
        nodes = np.repeat(el, k, axis=0)
        return nodes, bary.reshape(-1, 3), w.ravel()

    # -- integrals --------------------------------------------------------

    def values(self, u, split=True):
        nodes, bary, w = self.points(u if split else None)
        return np.einsum("mk,mk->m", bary, u[nodes]), nodes, bary, w

    def integral(self, u, func):
        vals, _, _, w = self.values(u)
        return float(w @ func(vals))

    def integral_and_grad(self, u, func, dfunc):
        """Return ``int func(u)`` and the vector ``int dfunc(u) psi_i``."""
        vals, nodes, bary, w = self.values(u)
        value = float(w @ func(vals))
        s = w * dfunc(vals)
        grad = np.bincount(nodes.ravel(), weights=(s[:, None] * bary).ravel(),
                           minlength=self.num_nodes)
        return value, grad

    def weighted_integral(self, u, v, func):
        """``int func(u) v`` with ``v`` a nodal field."""
        vals, nodes, bary, w = self.values(u)
        vv = np.einsum("mk,mk->m", bary, v[nodes])
        return float(w @ (func(vals) * vv))

    def mass_matrix(self, weight=None):
        """Sparse ``int weight psi_i psi_j`` (weight a nodal field or None)."""
        nodes, bary, w = self.points(None)
        if weight is not None:
            w = w * np.einsum("mk,mk->m", bary, np.asarray(weight, float)[nodes])
        rows = np.repeat(nodes, nodes.shape[1], axis=1).ravel()
        cols = np.tile(nodes, (1, nodes.shape[1])).ravel()
        vals = (w[:, None, None] * bary[:, :, None] * bary[:, None, :]).ravel()
        M = sp.coo_matrix((vals, (rows, cols)),
                          shape=(self.num_nodes, self.num_nodes)).tocsr()
        M.sum_duplicates()
        return M
