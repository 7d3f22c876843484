"""Element-pair quadrature for triangle meshes.

Singular pairs are handled by exact reductions:

* identical triangles: ``T cap (T + z)`` is a scaled copy of ``T``, which
  turns the double integral into a one-dimensional integral over directions;
* triangles sharing a vertex: the product ``T1 x T2`` is a cone with apex at
  the shared vertex pair and the integrand is homogeneous about it, so the
  integral reduces to the far facets;
* triangles sharing an edge: the same reduction applied twice, first about
  one end of the shared edge and then about the other.

All remaining pairs use collapsed Gauss rules with an order chosen from the
relative gap.
"""

from __future__ import annotations

import numpy as np

from ..quadrature import gauss01, triangle_rule

#: (upper bound on gap / max diameter, points per direction; 1 = centroid)
DEFAULT_TIERS = ((0.75, 4), (2.0, 3), (5.0, 2), (np.inf, 1))
ANGLE_ORDER = 12
SEG_ORDER = 6
TRI_ORDER = 5


def _rule(order):
    if order == 1:
        return np.full((1, 3), 1.0 / 3.0), np.array([0.5])
    return triangle_rule(order)


def _emit(X, n1, n2, bx, by, wbase, gamma):
    """Pack point pairs.  ``bx``/``by`` are (P, m, 3) barycentric coordinates
    in the triangles with node triples ``n1``/``n2`` (P, 3)."""
    x = np.einsum("pmk,pkd->pmd", bx, X[n1])
    y = np.einsum("pmk,pkd->pmd", by, X[n2])
    r = np.linalg.norm(x - y, axis=2)
    w = wbase * r ** (-gamma)
    m = bx.shape[1]
    idx = np.concatenate([np.repeat(n1, m, axis=0), np.repeat(n2, m, axis=0)], axis=1)
    coef = np.concatenate([bx.reshape(-1, 3), -by.reshape(-1, 3)], axis=1)
    return idx, coef, w.ravel()


def _area(X, tri):
    P = X[tri]
    e1 = P[:, 1] - P[:, 0]
    e2 = P[:, 2] - P[:, 0]
    return 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def _tensor(a, b):
    """All combinations of two per-pair point sets: (P, ma, 3), (P, mb, 3)
    -> (P, ma*mb, 3) each, plus the weight outer product."""
    P, ma, _ = a.shape
    mb = b.shape[1]
    A = np.repeat(a, mb, axis=1)
    B = np.tile(b, (1, ma, 1))
    return A, B


def identical(X, tri, p, gamma, order=ANGLE_ORDER):
    """``int_T int_T |u(x)-u(y)|^p |x-y|^-gamma`` for linear ``u``.

    With ``a = p + 2 - gamma`` the value is
    ``2 |T| B(a, 3) int_0^pi |grad u . theta|^p kappa(theta)^-a dtheta``
    where ``kappa(theta) = sum_i max(0, grad lambda_i . theta)``.
    """
    a = p + 2.0 - gamma
    beta = 2.0 / (a * (a + 1.0) * (a + 2.0))
    P = X[tri]                                         # (E, 3, 2)
    area = _area(X, tri)
    # gradients of barycentric coordinates: rows of inv([[1, x, y]])
    M = np.concatenate([np.ones((len(tri), 3, 1)), P], axis=2)
    G = np.linalg.inv(M)[:, 1:, :].transpose(0, 2, 1)  # (E, 3, 2)
    edges = P[:, [2, 0, 1]] - P[:, [1, 2, 0]]
    phi = np.sort(np.mod(np.arctan2(edges[..., 1], edges[..., 0]), np.pi), axis=1)
    lo = phi
    hi = np.concatenate([phi[:, 1:], phi[:, :1] + np.pi], axis=1)
    t, wt = gauss01(order)
    th = lo[:, :, None] + (hi - lo)[:, :, None] * t    # (E, 3, g)
    wth = (hi - lo)[:, :, None] * wt
    th = th.reshape(len(tri), -1)
    wth = wth.reshape(len(tri), -1)
    d = np.stack([np.cos(th), np.sin(th)], axis=2)     # (E, m, 2)
    c = np.einsum("emk,eik->emi", d, G)                # grad lambda_i . theta
    kappa = np.maximum(c, 0.0).sum(axis=2)
    w = 2.0 * area[:, None] * beta * wth * kappa ** (-a)
    m = th.shape[1]
    idx = np.concatenate([np.repeat(tri, m, axis=0), np.repeat(tri, m, axis=0)], axis=1)
    coef = np.concatenate([c.reshape(-1, 3), np.zeros((len(tri) * m, 3))], axis=1)
    return idx, coef, w.ravel()


def _seg_points(A, B, order):
    """Gauss points on the segment between barycentric points A, B (P, 3)."""
    t, wt = gauss01(order)
    pts = (1.0 - t)[None, :, None] * A[:, None, :] + t[None, :, None] * B[:, None, :]
    return pts, np.broadcast_to(wt, (len(A), order))


def _tri_points(P, order):
    bary, w = _rule(order)
    return np.broadcast_to(bary, (P,) + bary.shape), np.broadcast_to(w, (P, len(w)))


def _point(P, slot):
    e = np.zeros((P, 1, 3))
    e[:, 0, slot] = 1.0
    return e


def vertex_sharing(X, n1, n2, p, gamma, mult=2.0):
    """Pairs sharing exactly one vertex, stored in slot 0 of both triples."""
    d = p - gamma
    P = len(n1)
    A1, A2 = _area(X, n1), _area(X, n2)
    e = np.eye(3)
    seg, wseg = _seg_points(np.tile(e[1], (P, 1)), np.tile(e[2], (P, 1)), SEG_ORDER)
    tri, wtri = _tri_points(P, TRI_ORDER)
    out = []
    # far edge of T1 against all of T2, then the mirror
    bx, by = _tensor(seg, tri)
    wb = (wseg[:, :, None] * wtri[:, None, :]).reshape(P, -1)
    scale = mult * 2.0 * A1 * 2.0 * A2 / (d + 4.0)
    out.append(_emit(X, n1, n2, bx, by, scale[:, None] * wb, gamma))
    bx, by = _tensor(tri, seg)
    wb = (wtri[:, :, None] * wseg[:, None, :]).reshape(P, -1)
    out.append(_emit(X, n1, n2, bx, by, scale[:, None] * wb, gamma))
    return out


def edge_sharing(X, n1, n2, p, gamma, mult=2.0):
    """Pairs sharing an edge: triples ordered (v, w, a1) and (v, w, a2)."""
    d = p - gamma
    P = len(n1)
    A1, A2 = _area(X, n1), _area(X, n2)
    e = np.eye(3)
    c = mult / ((d + 4.0) * (d + 3.0))
    tri, wtri = _tri_points(P, TRI_ORDER)
    out = []
    # x = a1, y over T2
    bx = np.broadcast_to(_point(P, 2), tri.shape)
    out.append(_emit(X, n1, n2, bx, tri, (c * 4.0 * A1 * A2)[:, None] * wtri, gamma))
    # y = a2, x over T1
    by = np.broadcast_to(_point(P, 2), tri.shape)
    out.append(_emit(X, n1, n2, tri, by, (c * 4.0 * A1 * A2)[:, None] * wtri, gamma))
    # x on [w, a1], y on [v, a2]; and x on [v, a1], y on [w, a2]
    for (x0, x1), (y0, y1) in (((1, 2), (0, 2)), ((0, 2), (1, 2))):
        sx, wx = _seg_points(np.tile(e[x0], (P, 1)), np.tile(e[x1], (P, 1)), SEG_ORDER)
        sy, wy = _seg_points(np.tile(e[y0], (P, 1)), np.tile(e[y1], (P, 1)), SEG_ORDER)
        bx, by = _tensor(sx, sy)
        wb = (wx[:, :, None] * wy[:, None, :]).reshape(P, -1)
        out.append(_emit(X, n1, n2, bx, by, (c * 4.0 * A1 * A2)[:, None] * wb, gamma))
    return out


def separated(X, n1, n2, gamma, order, mult=2.0):
    P = len(n1)
    ta, wa = _tri_points(P, order)
    bx, by = _tensor(ta, ta)
    wb = (wa[:, :, None] * wa[:, None, :]).reshape(P, -1)
    A1, A2 = _area(X, n1), _area(X, n2)
    scale = mult * 4.0 * A1 * A2
    return _emit(X, n1, n2, bx, by, scale[:, None] * wb, gamma)


def _reorder_shared(t1, t2, k):
    """Reorder node triples so the ``k`` shared nodes come first, in the
    same order in both triples."""
    rows = np.arange(len(t1))
    eq = t1[:, :, None] == t2[:, None, :]               # (P, 3, 3)
    if k == 1:
        i = np.argmax(eq.any(axis=2), axis=1)
        j = np.argmax(eq.any(axis=1), axis=1)
        roll = np.arange(3)
        r1 = t1[rows[:, None], (i[:, None] + roll) % 3]
        r2 = t2[rows[:, None], (j[:, None] + roll) % 3]
        return r1, r2
    i = np.argmin(eq.any(axis=2), axis=1)               # unshared in t1
    j = np.argmin(eq.any(axis=1), axis=1)               # unshared in t2
    r1 = t1[rows[:, None], (i[:, None] + np.array([1, 2, 0])) % 3]
    r2 = np.column_stack([r1[:, 0], r1[:, 1], t2[rows, j]])
    return r1, r2


def _geometry(X, tri):
    P = X[tri]
    c = P.mean(axis=1)
    rad = np.linalg.norm(P - c[:, None, :], axis=2).max(axis=1)
    diam = np.max([np.linalg.norm(P[:, i] - P[:, j], axis=1)
                   for i, j in ((0, 1), (1, 2), (0, 2))], axis=0)
    return c, rad, diam


def generate(mesh, p, gamma, part, tiers=DEFAULT_TIERS, chunk=100_000):
    X = mesh.nodes
    el = mesh.elements
    omega = np.flatnonzero(mesh.in_omega)
    ext = np.flatnonzero(~mesh.in_omega)
    cent, rad, diam = _geometry(X, el)

    if part == "inner":
        yield identical(X, el[omega], p, gamma)
        others = omega
    else:
        others = ext

    for i0 in range(0, len(omega), max(1, chunk // max(1, len(others)))):
        rows = omega[i0:i0 + max(1, chunk // max(1, len(others)))]
        I, J = np.meshgrid(rows, others, indexing="ij")
        I, J = I.ravel(), J.ravel()
        if part == "inner":
            keep = I < J
            I, J = I[keep], J[keep]
        if not len(I):
            continue
        t1, t2 = el[I], el[J]
        shared = (t1[:, :, None] == t2[:, None, :]).sum(axis=(1, 2))
        for k, fn in ((1, vertex_sharing), (2, edge_sharing)):
            sel = shared == k
            if sel.any():
                r1, r2 = _reorder_shared(t1[sel], t2[sel], k)
                for piece in fn(X, r1, r2, p, gamma):
                    yield piece
        sep = shared == 0
        I, J = I[sep], J[sep]
        gap = np.linalg.norm(cent[I] - cent[J], axis=1) - rad[I] - rad[J]
        ratio = np.maximum(gap, 0.0) / np.maximum(diam[I], diam[J])
        lower = 0.0
        for bound, order in tiers:
            sel = np.flatnonzero((ratio >= lower) & (ratio < bound))
            lower = bound
            if len(sel):
                yield separated(X, el[I[sel]], el[J[sel]], gamma, order)
