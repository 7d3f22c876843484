"""NumPy implementation of the pair-quadrature kernels.

Used when the compiled extension is unavailable or when
``FRACFUCIK_PURE_PYTHON=1`` is set.  Same signatures as ``_kernels``.
"""

import numpy as np


def pair_diff(idx, coef, u):
    return np.einsum("qk,qk->q", coef, u[idx])


def pair_energy(idx, coef, w, u, p):
    d = np.abs(pair_diff(idx, coef, u))
    if p == 2.0:
        return float(w @ (d * d))
    return float(w @ d ** p)


def pair_energy_grad(idx, coef, w, u, p, out):
    """Add the gradient of ``sum w |d|^p`` to ``out``; return the energy."""
    d = pair_diff(idx, coef, u)
    a = np.abs(d)
    if p == 2.0:
        energy = float(w @ (a * a))
        s = 2.0 * w * d
    else:
        ap2 = a ** (p - 2.0)
        energy = float(w @ (ap2 * a * a))
        s = p * w * ap2 * d
    out += np.bincount(idx.ravel(), weights=(s[:, None] * coef).ravel(),
                       minlength=out.shape[0])
    return energy


def pair_form(idx, coef, w, u, v, p):
    du = pair_diff(idx, coef, u)
    dv = pair_diff(idx, coef, v)
    if p == 2.0:
        return float(w @ (du * dv))
    return float(w @ (np.abs(du) ** (p - 2.0) * du * dv))


def pair_weights(idx, coef, w, u, p):
    """Per-pair weights ``w |d|^(p-2)`` used for Hessians."""
    if p == 2.0:
        return np.array(w, dtype=float)
    d = np.abs(pair_diff(idx, coef, u))
    return w * d ** (p - 2.0)


def pair_gram(idx, coef, w, out):
    """Add ``sum_q w_q c_q c_q^T`` (scattered by ``idx``) to dense ``out``."""
    n = out.shape[0]
    flat = (idx[:, :, None] * n + idx[:, None, :]).ravel()
    vals = (w[:, None, None] * coef[:, :, None] * coef[:, None, :]).ravel()
    out += np.bincount(flat, weights=vals, minlength=n * n).reshape(n, n)
