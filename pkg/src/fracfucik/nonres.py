"""Weighted problems and non-resonance between (lambda_1, lambda_1) and the
first curve, for p = 2.

The energy of the semilinear problem is::

    Psi(u) = c/2 [u]^2 + 1/2 int_Omega u^2 - (1/eps) int_{Omega_eps} F(x, u)

with ``F(x, s) = int_0^s f(x, t) dt``.  Critical points of Psi are weak
solutions of the semilinear problem.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate as sint
import scipy.optimize as sopt

from .eigen import lambda1 as compute_lambda1, weighted_pencil
from .errors import ConfigError
from .functionals import functionals
from .mountainpass import Metric, climbing_string, default_witness

log = logging.getLogger(__name__)


def _need_p2(E):
    if E.p != 2.0:
        raise ConfigError("the weighted and semilinear problems are implemented for p = 2")


# -- nonlinearities -------------------------------------------------------------

@dataclass
class Nonlinearity:
    """``f(s)`` and its primitive ``F(s)``, both vectorized, plus the declared
    asymptotic bounds of f(s)/s and 2F(s)/s^2 as s -> +inf / -inf."""

    name: str
    f: object
    F: object
    df: object = None
    params: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)

    def check_bounds(self, lambda1: float, a: float, b: float) -> list:
        """Conditions on the declared bounds that fail for the curve point
        (a, b); an empty list means the hypotheses hold."""
        bd = self.bounds
        out = []
        for sign, top in (("+", a), ("-", b)):
            lo, hi = bd.get("delta" + sign), bd.get("Delta" + sign)
            if lo is None or hi is None:
                out.append(f"missing bounds for s -> {sign}inf")
                continue
            if not lambda1 <= lo <= hi <= top:
                out.append(f"lambda1 <= delta{sign} <= Delta{sign} <= {top:g} fails")
            if not lo > lambda1:
                out.append(f"delta{sign} > lambda1 fails")
        if not (bd.get("Delta+", np.inf) < a or bd.get("Delta-", np.inf) < b):
            out.append("neither Delta+ < a nor Delta- < b")
        return out


def _slopes(k_plus, k_minus):
    return {"gamma+": k_plus, "Gamma+": k_plus, "delta+": k_plus, "Delta+": k_plus,
            "gamma-": k_minus, "Gamma-": k_minus, "delta-": k_minus, "Delta-": k_minus}


def linear(k: float = 0.0, forcing: float = 0.0) -> Nonlinearity:
    """``f(s) = k s + h``."""
    return Nonlinearity(
        "linear",
        f=lambda s: k * s + forcing,
        F=lambda s: 0.5 * k * s * s + forcing * s,
        df=lambda s: np.full_like(s, k),
        params={"k": k, "forcing": forcing}, bounds=_slopes(k, k))


def linear_arctan(k: float, amplitude: float = 0.1, forcing: float = 0.0) -> Nonlinearity:
    """``f(s) = k s + A arctan(s) + h``."""
    A = amplitude
    return Nonlinearity(
        "linear_arctan",
        f=lambda s: k * s + A * np.arctan(s) + forcing,
        F=lambda s: (0.5 * k * s * s + A * (s * np.arctan(s) - 0.5 * np.log1p(s * s))
                     + forcing * s),
        df=lambda s: k + A / (1.0 + s * s),
        params={"k": k, "amplitude": A, "forcing": forcing}, bounds=_slopes(k, k))


def piecewise_linear(a: float, b: float, forcing: float = 0.0) -> Nonlinearity:
    """``f(s) = a s+ - b s- + h``: slopes a as s -> +inf and b as s -> -inf."""
    return Nonlinearity(
        "piecewise_linear",
        f=lambda s: a * np.maximum(s, 0.0) - b * np.maximum(-s, 0.0) + forcing,
        F=lambda s: (0.5 * a * np.maximum(s, 0.0) ** 2
                     + 0.5 * b * np.maximum(-s, 0.0) ** 2 + forcing * s),
        df=lambda s: np.where(s > 0, a, b),
        params={"a": a, "b": b, "forcing": forcing}, bounds=_slopes(a, b))


def from_callable(f, name: str = "custom", bounds=None, tol: float = 1e-10) -> Nonlinearity:
    """Wrap a vectorized ``f``; the primitive uses adaptive quadrature."""

    def F(s):
        s = np.asarray(s, float)
        val, _ = sint.quad_vec(lambda t: f(t * s) * s, 0.0, 1.0, epsabs=tol, epsrel=tol)
        return val

    return Nonlinearity(name, f=f, F=F, bounds=dict(bounds or {}))


CATALOG = {"linear": linear, "linear_arctan": linear_arctan,
           "piecewise_linear": piecewise_linear}


def nonlinearity(name: str, **params) -> Nonlinearity:
    try:
        return CATALOG[name](**params)
    except KeyError:
        raise ConfigError(f"unknown nonlinearity {name!r}; choose from "
                          f"{sorted(CATALOG)}") from None
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name!r}: {exc}") from None


# -- weighted eigenvalue and the energy Psi -----------------------------------------

def _nodal(weight, E):
    if callable(weight):
        return E.mesh.interpolate(weight)
    w = np.asarray(weight, dtype=float)
    return np.full(E.N, float(w)) if w.ndim == 0 else E.check(w)


def weighted_lambda1(m, E) -> float:
    """``inf (c [u]^2 + |u|^2_Omega) / ((1/eps) int_{Omega_eps} m u^2)``."""
    _need_p2(E)
    w = _nodal(m, E)
    if np.any(w[E.mesh.collar_nodes] <= 0):
        raise ConfigError("weight must be positive on the collar")
    return weighted_pencil(E, w)


def _stiffness(E):
    K = getattr(E, "_psi_stiffness", None)
    if K is None:
        K = E.params.scale * E.A + E.M_omega.toarray()
        E._psi_stiffness = K
    return K


def psi(u, f: Nonlinearity, E) -> float:
    _need_p2(E)
    u = E.check(u)
    K = _stiffness(E)
    eps = E.mesh.spec.epsilon
    return 0.5 * float(u @ K @ u) - E.collar.integral(u, f.F) / eps


def grad_psi(u, f: Nonlinearity, E) -> np.ndarray:
    return psi_and_grad(u, f, E)[1]


def psi_and_grad(u, f: Nonlinearity, E):
    _need_p2(E)
    u = E.check(u)
    K = _stiffness(E)
    eps = E.mesh.spec.epsilon
    Ku = K @ u
    Fv, fg = E.collar.integral_and_grad(u, f.F, f.f)
    return 0.5 * float(u @ Ku) - Fv / eps, Ku - fg / eps


class _FlatProblem:
    """Psi on the whole space, preconditioned by the quadratic part."""

    variable_metric = False
    step = 1.0

    def __init__(self, f, E):
        self.f, self.E = f, E

    def metric(self, u):
        return Metric(_stiffness(self.E))

    def value(self, u):
        return psi(u, self.f, self.E)

    def value_and_grad(self, u):
        return psi_and_grad(u, self.f, self.E)

    def normal(self, u):
        return None

    def project(self, u):
        return u

    def reduced_grad(self, u):
        return grad_psi(u, self.f, self.E)


@dataclass
class NonresResult:
    u: np.ndarray
    residual: float
    psi: float
    trivial: bool
    converged: bool
    R: float | None
    iterations: int = 0
    method: str = ""
    notes: list = field(default_factory=list)


def _initial_path(phi, w, R, m, rho):
    t = np.linspace(-1.0, 1.0, m)
    U = t[:, None] * R * phi + (1.0 - np.abs(t))[:, None] * rho * R * w
    U[0], U[-1] = -R * phi, R * phi
    return U


def solve_nonresonant(f: Nonlinearity, E, phi1=None, m: int = 41, R0: float = 1.0,
              max_doublings: int = 20, grad_tol: float = 1e-7, rho: float = 0.25,
              witness=None, max_iter: int = 2000,
              trivial_tol: float = 1e-6) -> NonresResult:
    """Critical point of Psi by the mountain pass between -R phi_1 and R phi_1.

    R is doubled until both endpoint levels are below the maximum over the
    interior of the initial path.  If no such R is found within
    ``max_doublings`` the geometry is absent and Psi is minimized instead.
    """
    _need_p2(E)
    if phi1 is None:
        phi1 = compute_lambda1(E)
    phi = phi1.function
    F = functionals(E)
    w = default_witness(E) if witness is None else np.asarray(witness, float)
    w = F.project(w)
    prob = _FlatProblem(f, E)
    R = R0
    U = None
    for _ in range(max_doublings + 1):
        U0 = _initial_path(phi, w, R, m, rho)
        lv = np.array([prob.value(u) for u in U0])
        if max(lv[0], lv[-1]) < lv[1:-1].max():
            U = U0
            break
        R *= 2.0
    notes = []
    if U is not None:
        U, levels, hist, it, conv = climbing_string(
            prob, U, rel_tol=1e-9, grad_tol=grad_tol, max_iter=max_iter)
        k = int(np.argmax(levels))
        u = U[k]
        method = "mountain pass"
    else:
        notes.append("no mountain-pass geometry found; minimizing Psi")
        res = sopt.minimize(lambda v: psi_and_grad(v, f, E), np.zeros(E.N), jac=True,
                            method="L-BFGS-B", options={"gtol": 1e-12, "ftol": 1e-15,
                                                        "maxiter": 10_000})
        u = res.x
        it = int(res.nit)
        method = "minimization"
        R = None
    r = float(np.linalg.norm(grad_psi(u, f, E)))
    # a critical point this close to 0 is the trivial one when 0 is critical
    trivial = float(np.sqrt(F.I(u))) < trivial_tol
    if trivial:
        r0 = float(np.linalg.norm(grad_psi(np.zeros_like(u), f, E)))
        if r0 <= r:
            u, r = np.zeros_like(u), r0
            notes.append("trivial solution")
        else:
            trivial = False
    return NonresResult(u=u, residual=r, psi=psi(u, f, E), trivial=trivial,
                        converged=r < 10 * grad_tol, R=R, iterations=it,
                        method=method, notes=notes)


# -- uniqueness of the trivial solution (heuristic) -----------------------------------

@dataclass
class WeightPair:
    m: object
    b: object

    def nodal(self, E):
        return _nodal(self.m, E), _nodal(self.b, E)

    def check(self, E, lambda1, a, b, tol=1e-12):
        """Failed hypotheses (an empty list when all hold)."""
        mw, bw = (v[E.mesh.collar_nodes] for v in self.nodal(E))
        out = []
        if np.any(mw < lambda1 - tol) or np.any(mw > a + tol):
            out.append("lambda1 <= m <= a fails")
        if np.any(bw < lambda1 - tol) or np.any(bw > b + tol):
            out.append("lambda1 <= b(x) <= b fails")
        if not np.any(mw > lambda1 + tol) or not np.any(bw > lambda1 + tol):
            out.append("m > lambda1 and b(x) > lambda1 on positive measure fails")
        if not (np.all(mw < a - tol) or np.all(bw < b - tol)):
            out.append("neither m < a nor b(x) < b everywhere")
        return out


def weighted_residual(u, mw, bw, E):
    """Nodal residual of ``c(-Delta)^alpha u + u = (1/eps)(m u+ - b u-)``."""
    K = _stiffness(E)
    eps = E.mesh.spec.epsilon
    vals, nodes, bary, w = E.collar.values(u)
    mv = np.einsum("mk,mk->m", bary, mw[nodes])
    bv = np.einsum("mk,mk->m", bary, bw[nodes])
    rhs = w * (mv * np.maximum(vals, 0.0) - bv * np.maximum(-vals, 0.0))
    g = np.bincount(nodes.ravel(), weights=(rhs[:, None] * bary).ravel(), minlength=E.N)
    return K @ u - g / eps


def _residual_jacobian(u, mw, bw, E):
    K = _stiffness(E)
    eps = E.mesh.spec.epsilon
    vals, nodes, bary, w = E.collar.values(u)
    mv = np.einsum("mk,mk->m", bary, mw[nodes])
    bv = np.einsum("mk,mk->m", bary, bw[nodes])
    ww = w * np.where(vals > 0, mv, np.where(vals < 0, bv, 0.0))
    N = E.N
    flat = (nodes[:, :, None] * N + nodes[:, None, :]).ravel()
    contrib = (ww[:, None, None] * bary[:, :, None] * bary[:, None, :]).ravel()
    M = np.bincount(flat, weights=contrib, minlength=N * N).reshape(N, N)
    return K - M / eps


@dataclass
class TrivialReport:
    floor: float
    residuals: list
    best_u: np.ndarray
    hypotheses_failed: list
    evidence: str
    threshold: float


def only_trivial_check(weights: WeightPair, a: float, b: float, E, starts: int = 20,
                       seed: int = 0, extra_starts=(), threshold: float = 1e-4,
                       lambda1=None) -> TrivialReport:
    """Smallest weighted residual over S from many starts.

    Heuristic evidence only: a floor above ``threshold`` is consistent
    with the trivial solution being the only one, it does not prove it.
    """
    _need_p2(E)
    if starts < 1:
        raise ConfigError("need at least one start")
    F = functionals(E)
    mw, bw = weights.nodal(E)
    lam = compute_lambda1(E).value if lambda1 is None else lambda1
    failed = weights.check(E, lam, a, b)

    def objective(v):
        i = F.I(v)
        if not i > 1e-300:
            return 1e300, np.zeros_like(v)
        _, q = F.I_and_grad(v)
        r = weighted_residual(v, mw, bw, E)
        Jr = _residual_jacobian(v, mw, bw, E)
        rr = float(r @ r)
        return rr / i, 2.0 * (Jr.T @ r) / i - rr * q / i ** 2

    rng = np.random.default_rng(seed)
    inits = [rng.standard_normal(E.N) for _ in range(starts)] + [np.asarray(x) for x in extra_starts]
    residuals = []
    best, best_u = np.inf, None
    for v0 in inits:
        v0 = F.project(v0)
        res = sopt.minimize(objective, v0, jac=True, method="L-BFGS-B",
                            options={"maxiter": 2000, "gtol": 1e-14, "ftol": 1e-16})
        u = F.project(res.x)
        r = float(np.linalg.norm(weighted_residual(u, mw, bw, E)))
        residuals.append(r)
        if r < best:
            best, best_u = r, u
    if best > threshold:
        evidence = ("residual floor bounded away from zero: consistent with "
                    "only the trivial solution (not a proof)")
    else:
        evidence = "a nontrivial approximate solution was found"
    return TrivialReport(floor=best, residuals=residuals, best_u=best_u,
                         hypotheses_failed=failed, evidence=evidence,
                         threshold=threshold)
