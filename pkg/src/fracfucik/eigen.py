"""First and second collar-weighted eigenvalues.

For p = 2 the discrete problem is the symmetric pencil

    (c A + M_Omega) u = (lambda / eps) M_eps u

whose right-hand matrix is singular (it only sees collar nodes).  Solving
the flipped problem ``M_eps u = nu eps (c A + M_Omega) u`` gives
``nu = 1 / lambda`` with the spurious infinite eigenvalues mapped to
``nu = 0``, so the wanted values are the largest ``nu``.

For p > 2 the first eigenpair is the minimizer of J_0 on S, found by
preconditioned projected gradient descent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, ConvergenceError
from .functionals import Functionals, functionals
from .local import LocalIntegrator


@dataclass
class EigenResult:
    value: float
    function: np.ndarray
    residual: float
    gap: float | None = None
    iterations: int = 0
    converged: bool = True
    method: str = ""


def _normalize_sign(F, u):
    u = F.project(u)
    mass = F.E.omega.integral(u, lambda z: z)
    return u if mass >= 0 else -u


def _pencil(F, count):
    E = F.E
    if E.A is None:
        raise ConfigError("the dense pencil needs p = 2")
    K = F.c * E.A + E.M_omega.toarray()
    B = F.constraint_mass().toarray() / F.eps
    N = K.shape[0]
    nu, vec = sla.eigh(B, K, subset_by_index=[N - count - 1, N - 1])
    order = np.argsort(nu)[::-1]
    return 1.0 / nu[order], vec[:, order]


def lambda1(E, method=None, collar=None, **opts) -> EigenResult:
    """First eigenpair; ``method`` is "pencil" (p = 2 default) or "descent"."""
    F = functionals(E) if collar is None else Functionals(E, constraint=collar)
    if method is None:
        method = "pencil" if E.p == 2.0 else "descent"
    if method == "pencil":
        lam, vec = _pencil(F, 1)
        u = _normalize_sign(F, vec[:, 0])
        value = F.J(u, 0.0)
        return EigenResult(value=value, function=u,
                           residual=F.fucik_residual(u, value, value),
                           gap=float(lam[1] - lam[0]), method="pencil")
    if method != "descent":
        raise ConfigError(f"unknown eigen method {method!r}")
    u0 = np.ones(E.N)
    res = minimize_on_sphere(F, u0, 0.0, **opts)
    u = _normalize_sign(F, res.u)
    value = F.J(u, 0.0)
    out = EigenResult(value=value, function=u,
                      residual=F.fucik_residual(u, value, value),
                      iterations=res.iterations, converged=res.converged,
                      method="descent")
    if not res.converged:
        raise ConvergenceError(
            f"first eigenvalue descent stopped after {res.iterations} "
            f"iterations (reduced gradient {res.grad_norm:.3e})", result=out)
    return out


def lambda1_subset(E, subset_mask, **opts) -> EigenResult:
    """First eigenvalue with the constraint carried by the collar elements
    selected by ``subset_mask`` (a boolean element mask)."""
    mask = np.asarray(subset_mask, dtype=bool) & E.mesh.in_collar
    if not np.any(mask) or E.mesh.measure[mask].sum() <= 0:
        raise ConfigError("subset of the collar has zero measure")
    if np.any(np.asarray(subset_mask, bool) & ~E.mesh.in_collar):
        raise ConfigError("subset must consist of collar elements")
    return lambda1(E, collar=LocalIntegrator(E.mesh, mask), **opts)


def lambda2_dense(E) -> EigenResult:
    """Second eigenpair of the p = 2 pencil."""
    if E.p != 2.0:
        raise ConfigError("lambda2_dense needs p = 2")
    F = functionals(E)
    lam, vec = _pencil(F, 2)
    u = F.project(vec[:, 1])
    # fix the sign so the collar mass of u+ is at least that of u-
    pos = F.E.collar.integral(u, lambda z: np.maximum(z, 0.0) ** 2)
    neg = F.E.collar.integral(u, lambda z: np.maximum(-z, 0.0) ** 2)
    if neg > pos:
        u = -u
    value = F.J(u, 0.0)
    return EigenResult(value=value, function=u,
                       residual=F.fucik_residual(u, value, value),
                       gap=float(lam[2] - lam[1]), method="pencil")


def weighted_pencil(E, weight) -> float:
    """Smallest eigenvalue of ``(c A + M_Omega) u = mu (1/eps) M_eps[w] u``."""
    F = functionals(E)
    K = F.c * E.A + E.M_omega.toarray()
    B = E.collar.mass_matrix(weight).toarray() / F.eps
    N = K.shape[0]
    nu = sla.eigh(B, K, subset_by_index=[N - 1, N - 1], eigvals_only=True)
    return float(1.0 / nu[-1])


# -- descent on S -----------------------------------------------------------

@dataclass
class DescentResult:
    u: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool


def preconditioner(F, u, reg=1e-12):
    """Cholesky factor of Hess J_0(u) / (p - 1), lightly regularized."""
    H = F.hess_J0(u) / (F.p - 1.0)
    d = np.diag(H)
    H = H + reg * max(float(d.max()), 1e-300) * np.eye(len(d))
    return sla.cho_factor(H, check_finite=False)


def riemannian_direction(F, cho, g, q):
    """P-metric gradient projected onto the tangent space ``q . v = 0``."""
    Pg = sla.cho_solve(cho, g, check_finite=False)
    Pq = sla.cho_solve(cho, q, check_finite=False)
    t = float(q @ Pg) / float(q @ Pq)
    return Pg - t * Pq


def minimize_on_sphere(F, u0, s, max_iter=500, tol=1e-8, armijo=1e-4,
                       refresh=1, u_fixed_precond=None, record=None):
    """Projected, preconditioned gradient descent for J_s on S.

    Stops when the reduced gradient norm drops below ``tol * (1 + |J|)``.
    The preconditioner is rebuilt every ``refresh`` iterations (p = 2 uses
    a constant one).  Accepted iterates are appended to ``record`` if given.
    """
    u = F.project(u0)
    J, g = F.J_and_grad(u, s)
    if record is not None:
        record.append(u)
    cho = None
    it = 0
    gn = np.inf
    for it in range(1, max_iter + 1):
        _, q = F.I_and_grad(u)
        qq = float(q @ q)
        r = g - (float(g @ q) / qq) * q
        gn = float(np.linalg.norm(r))
        if gn < tol * (1.0 + abs(J)):
            return DescentResult(u, J, gn, it - 1, True)
        if cho is None or (F.p != 2.0 and (it - 1) % refresh == 0):
            cho = preconditioner(F, u if u_fixed_precond is None else u_fixed_precond)
        v = riemannian_direction(F, cho, g, q)
        slope = float(g @ v)
        if slope <= 0:
            v = r
            slope = float(g @ v)
        h = 1.0
        accepted = False
        while h > 1e-12:
            cand = F.project(u - h * v)
            Jc, gc = F.J_and_grad(cand, s)
            if Jc <= J - armijo * h * slope:
                accepted = True
                break
            h *= 0.5
        if not accepted:
            # no decrease possible at working precision
            return DescentResult(u, J, gn, it, False)
        u, J, g = cand, Jc, gc
        if record is not None:
            record.append(u)
    _, q = F.I_and_grad(u)
    r = g - (float(g @ q) / float(q @ q)) * q
    gn = float(np.linalg.norm(r))
    return DescentResult(u, J, gn, it, gn < tol * (1.0 + abs(J)))


def descend_path(F, u0, s, **opts):
    """Iterates of the descent from ``u0``: a path inside the sublevel set
    of J_s through ``P(u0)``."""
    iterates = []
    minimize_on_sphere(F, u0, s, record=iterates, **opts)
    return iterates
