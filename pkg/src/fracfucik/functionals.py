"""The functionals J_s and I, the constraint sphere S and stationarity
measures.

With ``c = Lambda (1 - alpha)``::

    J_s(u) = c [u]^p + int_Omega |u|^p - (s / eps) int_{Omega_eps} (u+)^p
    I(u)   = (1 / eps) int_{Omega_eps} |u|^p,        S = {I = 1}

Positive and negative parts are taken pointwise on the piecewise-linear
function, with elements cut at sign changes, so these integrals are exact
for integer p.  Gradients are nodal vectors: entry i is the derivative in
the direction of hat function i.  Dual norms are Euclidean norms of these
vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _abs_p(p):
    return lambda z: np.abs(z) ** p


def _dabs_p(p):
    return lambda z: p * np.abs(z) ** (p - 2.0) * z


def _pos_p(p):
    return lambda z: np.maximum(z, 0.0) ** p


def _dpos_p(p):
    return lambda z: p * np.maximum(z, 0.0) ** (p - 1.0)


def _neg_p(p):
    return lambda z: np.maximum(-z, 0.0) ** p


def _dneg_p(p):
    return lambda z: -p * np.maximum(-z, 0.0) ** (p - 1.0)


@dataclass
class SphereState:
    """A point of S with optional cached level and reduced gradient norm."""

    u: np.ndarray
    level: float | None = None
    grad_norm: float | None = None
    s: float | None = None


class Functionals:
    """J_s, I and their derivatives for an assembled energy."""

    def __init__(self, E, constraint=None):
        self.E = E
        # integrator carrying the constraint; the full collar by default
        self.K = E.collar if constraint is None else constraint
        self.p = E.p
        self.eps = E.mesh.spec.epsilon
        self.c = E.params.scale
        self.N = E.N

    # -- constraint -------------------------------------------------------

    def I(self, u) -> float:
        return self.K.integral(self.E.check(u), _abs_p(self.p)) / self.eps

    def I_and_grad(self, u):
        v, g = self.K.integral_and_grad(self.E.check(u), _abs_p(self.p),
                                        _dabs_p(self.p))
        return v / self.eps, g / self.eps

    def constraint_mass(self):
        if self.K is self.E.collar:
            return self.E.M_collar
        return self.K.mass_matrix()

    def project(self, u) -> np.ndarray:
        u = self.E.check(u)
        i = self.I(u)
        if not i > 1e-300 or not np.isfinite(i):
            raise ValueError("not projectable: the function vanishes on the collar")
        return u / i ** (1.0 / self.p)

    # -- J_s --------------------------------------------------------------

    def parts(self, u):
        """(c [u]^p, int_Omega |u|^p, (1/eps) int_collar (u+)^p)."""
        u = self.E.check(u)
        semi = self.c * self.E.seminorm_p(u)
        local = self.E.omega.integral(u, _abs_p(self.p))
        pos = self.E.collar.integral(u, _pos_p(self.p)) / self.eps
        return semi, local, pos

    def J(self, u, s: float) -> float:
        semi, local, pos = self.parts(u)
        return semi + local - s * pos

    def J_and_grad(self, u, s: float):
        u = self.E.check(u)
        p = self.p
        e, ge = self.E.energy_and_grad(u)
        lv, lg = self.E.omega.integral_and_grad(u, _abs_p(p), _dabs_p(p))
        value = self.c * e + lv
        grad = self.c * ge + lg
        if s != 0.0:
            pv, pg = self.E.collar.integral_and_grad(u, _pos_p(p), _dpos_p(p))
            value -= s * pv / self.eps
            grad -= (s / self.eps) * pg
        return value, grad

    def grad_J(self, u, s: float) -> np.ndarray:
        return self.J_and_grad(u, s)[1]

    def hess_J0(self, u=None) -> np.ndarray:
        """Dense Hessian of J_0 (constant for p = 2)."""
        p = self.p
        H = self.c * self.E.hessian(u)
        if p == 2.0:
            H = H + 2.0 * self.E.M_omega.toarray()
        else:
            H = H + p * (p - 1.0) * weighted_mass(self.E.omega, u, p - 2.0)
        return H

    # -- stationarity -----------------------------------------------------

    def reduced_gradient(self, u, s: float):
        """Return (J'_s - t I', t) with t minimizing the Euclidean norm."""
        _, g = self.J_and_grad(u, s)
        _, q = self.I_and_grad(u)
        qq = float(q @ q)
        t = float(g @ q) / qq if qq > 0 else 0.0
        return g - t * q, t

    def reduced_grad_norm(self, u, s: float) -> float:
        r, _ = self.reduced_gradient(u, s)
        return float(np.linalg.norm(r))

    def residual_vector(self, u, a: float, b: float) -> np.ndarray:
        """Weak residual of the Fucik problem tested with each hat function."""
        u = self.E.check(u)
        p = self.p
        _, ge = self.E.energy_and_grad(u)
        _, lg = self.E.omega.integral_and_grad(u, _abs_p(p), _dabs_p(p))
        r = (self.c * ge + lg) / p
        if a != 0.0:
            _, pg = self.E.collar.integral_and_grad(u, _pos_p(p), _dpos_p(p))
            r -= (a / self.eps) * pg / p
        if b != 0.0:
            _, ng = self.E.collar.integral_and_grad(u, _neg_p(p), _dneg_p(p))
            # d/du (u-)^p = -p (u-)^(p-1), so this adds +b (u-)^(p-1)
            r -= (b / self.eps) * ng / p
        return r

    def fucik_residual(self, u, a: float, b: float) -> float:
        return float(np.linalg.norm(self.residual_vector(u, a, b)))

    def state(self, u, s: float) -> SphereState:
        return SphereState(u=u, level=self.J(u, s),
                           grad_norm=self.reduced_grad_norm(u, s), s=s)


def weighted_mass(integrator, u, power):
    """Dense ``int |u|^power psi_i psi_j`` over the integrator's elements."""
    N = integrator.num_nodes
    vals, nodes, bary, w = integrator.values(u)
    ww = w * np.abs(vals) ** power
    k = nodes.shape[1]
    flat = (nodes[:, :, None] * N + nodes[:, None, :]).ravel()
    contrib = (ww[:, None, None] * bary[:, :, None] * bary[:, None, :]).ravel()
    H = np.bincount(flat, weights=contrib, minlength=N * N).reshape(N, N)
    return 0.5 * (H + H.T)


def functionals(E) -> Functionals:
    """Cached Functionals for ``E``."""
    f = getattr(E, "_functionals", None)
    if f is None:
        f = Functionals(E)
        E._functionals = f
    return f


# module-level API

def J_s(u, s, E):
    return functionals(E).J(np.asarray(u, float), s)


def grad_J_s(u, s, E):
    return functionals(E).grad_J(np.asarray(u, float), s)


def constraint(u, E):
    return functionals(E).I(np.asarray(u, float))


def project_to_S(u, E) -> SphereState:
    return SphereState(u=functionals(E).project(np.asarray(u, float)))


def reduced_grad_norm(u, s, E):
    if isinstance(u, SphereState):
        u = u.u
    return functionals(E).reduced_grad_norm(np.asarray(u, float), s)


def fucik_residual(u, a, b, E):
    return functionals(E).fucik_residual(np.asarray(u, float), a, b)


def positive_part(u):
    """Nodal positive part (for building trial functions)."""
    return np.maximum(np.asarray(u, float), 0.0)


def negative_part(u):
    return np.maximum(-np.asarray(u, float), 0.0)
