"""Element-pair quadrature for interval meshes.

Every quadrature point is a pair (x, y) together with a weight ``w`` and the
linear combination of nodal values that gives ``u(x) - u(y)``.  The energy is
then ``sum_q w_q |c_q . u[idx_q]|^p``.

Three kinds of element pairs are treated separately:

* identical elements, where ``u(x) - u(y)`` is a multiple of ``x - y`` and the
  double integral has a closed form;
* elements sharing a node, integrated by splitting the rectangle into two
  cones with apex at the shared corner.  The integrand is homogeneous of
  degree ``p - gamma`` about that corner, so each cone reduces to a regular
  line integral along its far side;
* separated elements, integrated with tensor Gauss rules whose order depends
  on the gap relative to the element size.
"""

from __future__ import annotations

import numpy as np

from ..quadrature import gauss01

#: (upper bound on gap / max element length, points per element)
DEFAULT_TIERS = ((1.5, 8), (4.0, 5), (12.0, 3), (np.inf, 2))
FACET_ORDER = 10


def _pack(idx_cols, coef_cols, w):
    idx = np.column_stack(idx_cols).astype(np.int64)
    coef = np.column_stack(coef_cols).astype(float)
    return idx, coef, np.asarray(w, dtype=float)


def identical(left, right, h, p, gamma):
    """Closed form for ``int_e int_e |u(x)-u(y)|^p |x-y|^-gamma``."""
    d = p - gamma
    w = 2.0 * h ** (d + 2.0 - p) / ((d + 1.0) * (d + 2.0))
    zero = np.zeros_like(h)
    return _pack([left, right, left, right],
                 [-np.ones_like(h), np.ones_like(h), zero, zero], w)


def touching(a0, a1, b1, x0, x1, x2, p, gamma, mult=2.0, order=FACET_ORDER):
    """Pairs of elements ``[x0, x1]`` (nodes a0, a1) and ``[x1, x2]``
    (nodes a1, b1) meeting at ``x1``; ``mult`` counts ordered pairs."""
    d = p - gamma
    h1 = x1 - x0
    h2 = x2 - x1
    t, wt = gauss01(order)
    m = len(a0)
    T = np.broadcast_to(t, (m, order))
    W = np.broadcast_to(wt, (m, order))

    def rep(a):
        return np.repeat(a, order)

    # far side x = x0, y running over [x1, x2]
    y = x1[:, None] + h2[:, None] * T
    dist = y - x0[:, None]
    w1 = mult * (h1 / (d + 2.0))[:, None] * h2[:, None] * W * dist ** (-gamma)
    # far side y = x2, x running over [x0, x1]
    x = x0[:, None] + h1[:, None] * T
    dist = x2[:, None] - x
    w2 = mult * (h2 / (d + 2.0))[:, None] * h1[:, None] * W * dist ** (-gamma)

    tf = T.ravel()
    ones = np.ones(m * order)
    zero = np.zeros(m * order)
    # u(x0) - [(1-t) u(x1) + t u(x2)]
    i1, c1, _ = _pack([rep(a0), rep(a1), rep(b1), rep(a1)],
                      [ones, -(1.0 - tf), -tf, zero], w1.ravel())
    # [(1-t) u(x0) + t u(x1)] - u(x2)
    i2, c2, _ = _pack([rep(a0), rep(a1), rep(b1), rep(a1)],
                      [1.0 - tf, tf, -ones, zero], w2.ravel())
    return (np.concatenate([i1, i2]), np.concatenate([c1, c2]),
            np.concatenate([w1.ravel(), w2.ravel()]))


def separated(ea, eb, nodes_x, elements, gamma, order, mult=2.0):
    """Tensor Gauss on disjoint element pairs ``(ea[k], eb[k])``."""
    t, wt = gauss01(order)
    la, ra = elements[ea, 0], elements[ea, 1]
    lb, rb = elements[eb, 0], elements[eb, 1]
    xa, ha = nodes_x[la], nodes_x[ra] - nodes_x[la]
    xb, hb = nodes_x[lb], nodes_x[rb] - nodes_x[lb]
    s, r = np.meshgrid(t, t, indexing="ij")
    ws, wr = np.meshgrid(wt, wt, indexing="ij")
    s, r, w0 = s.ravel(), r.ravel(), (ws * wr).ravel()
    x = xa[:, None] + ha[:, None] * s
    y = xb[:, None] + hb[:, None] * r
    w = mult * (ha * hb)[:, None] * w0 * np.abs(x - y) ** (-gamma)
    k = len(s)

    def rep(a):
        return np.repeat(a, k)

    S = np.tile(s, len(ea))
    R = np.tile(r, len(ea))
    return _pack([rep(la), rep(ra), rep(lb), rep(rb)],
                 [1.0 - S, S, -(1.0 - R), -R], w.ravel())


def element_pairs(mesh):
    """Index arrays describing all element pairs of Q.

    Returns a dict with the Omega x Omega pairs (each unordered pair once,
    ``i < j``) under ``"inner"`` and the Omega x exterior pairs under
    ``"outer"``.
    """
    omega = np.flatnonzero(mesh.in_omega)
    ext = np.flatnonzero(~mesh.in_omega)
    ii, jj = np.triu_indices(len(omega), k=1)
    inner = (omega[ii], omega[jj])
    oi, oj = np.meshgrid(omega, ext, indexing="ij")
    outer = (oi.ravel(), oj.ravel())
    return {"inner": inner, "outer": outer}


def generate(mesh, p, gamma, part, tiers=DEFAULT_TIERS, chunk=200_000):
    """Yield ``(idx, coef, w)`` chunks of quadrature pairs for ``part``
    ("inner" for Omega x Omega, "outer" for Omega x exterior, ordered pairs
    counted twice)."""
    x = mesh.nodes[:, 0]
    el = mesh.elements
    left, right = x[el[:, 0]], x[el[:, 1]]
    h = right - left

    if part == "inner":
        omega = np.flatnonzero(mesh.in_omega)
        yield identical(el[omega, 0], el[omega, 1], h[omega], p, gamma)
    # elements are ordered left to right, so neighbours are consecutive
    ea, eb = element_pairs(mesh)[part]
    a, b = np.minimum(ea, eb), np.maximum(ea, eb)
    nb = (b - a) == 1
    lo, hi = a[nb], b[nb]
    if len(lo):
        yield touching(el[lo, 0], el[lo, 1], el[hi, 1],
                       left[lo], right[lo], right[hi], p, gamma)
    sep = ~nb
    a, b = a[sep], b[sep]
    gap = left[b] - right[a]
    ratio = gap / np.maximum(h[a], h[b])
    lower = 0.0
    for bound, order in tiers:
        sel = np.flatnonzero((ratio >= lower) & (ratio < bound))
        lower = bound
        step = max(1, chunk // (order * order))
        for start in range(0, len(sel), step):
            s = sel[start:start + step]
            yield separated(a[s], b[s], x, el, gamma, order)
