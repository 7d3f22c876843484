"""Mountain-pass level c(s) between -phi_1 and +phi_1 on the sphere S.

The infimum over paths of the path maximum is computed with a climbing
string: the interior samples of a path follow the preconditioned projected
gradient flow of J_s and are redistributed by arc length after every sweep.
Once the string has settled, the highest sample stops descending along the
path tangent and climbs instead, which drives it to the saddle point itself
rather than to the nearest path sample.  The reported level is the path
maximum and the stationarity of the climbing sample is certified by its
reduced gradient norm.

The preconditioner is the Hessian of J_0 at phi_1 divided by (p - 1); for
p = 2 a unit step of the flow coincides with one inverse iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .eigen import EigenResult, descend_path
from .errors import ConfigError, ConvergenceError
from .functionals import SphereState, functionals

MIN_SAMPLES = 17


@dataclass
class PathOnS:
    """Ordered samples of a path on S from -phi_1 (first) to +phi_1 (last)."""

    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.array(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[0] < MIN_SAMPLES:
            raise ConfigError(f"a path needs at least {MIN_SAMPLES} samples")

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    def levels(self, E, s) -> np.ndarray:
        F = functionals(E)
        return np.array([F.J(u, s) for u in self.samples])

    def constraint_values(self, E) -> np.ndarray:
        F = functionals(E)
        return np.array([F.I(u) for u in self.samples])

    def snapshot(self, E, s, header_lines=()) -> str:
        """One line per sample: ``index,level,u_0 u_1 ...``."""
        lines = [f"# {h}" for h in header_lines]
        lines.append("index,level,nodal_values")
        for k, (u, lev) in enumerate(zip(self.samples, self.levels(E, s))):
            vals = " ".join(f"{v:.12e}" for v in u)
            lines.append(f"{k},{lev:.12e},{vals}")
        return "\n".join(lines) + "\n"


@dataclass
class MinimaxResult:
    c_value: float
    argmax_state: SphereState
    path: PathOnS
    reduced_grad_at_max: float
    iterations: int
    converged: bool
    s: float = 0.0
    argmax_index: int = 0
    history: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        h = np.asarray(self.history)
        return bool(np.all(np.diff(h) <= 1e-12 * (1.0 + np.abs(h[1:]))))


def _phi(phi1):
    return phi1.function if isinstance(phi1, EigenResult) else np.asarray(phi1, float)


def initial_path(phi1, witness, m: int = 41, E=None) -> PathOnS:
    """Samples ``project(t phi_1 + (1 - |t|) witness)`` for uniform t in [-1, 1]."""
    if m < MIN_SAMPLES:
        raise ConfigError(f"a path needs at least {MIN_SAMPLES} samples")
    phi = _phi(phi1)
    w = np.asarray(witness, dtype=float)
    if E is None:
        raise ConfigError("initial_path needs the energy to project onto S")
    F = functionals(E)
    # reject witnesses parallel to phi_1
    cos = abs(phi @ w) / (np.linalg.norm(phi) * np.linalg.norm(w) + 1e-300)
    if cos > 1.0 - 1e-10:
        raise ValueError("witness is a multiple of phi_1; choose a different witness")
    t = np.linspace(-1.0, 1.0, m)
    U = np.empty((m, len(phi)))
    for i, ti in enumerate(t):
        if i == 0:
            U[i] = -phi
        elif i == m - 1:
            U[i] = phi
        else:
            try:
                U[i] = F.project(ti * phi + (1.0 - abs(ti)) * w)
            except ValueError as exc:
                raise ValueError(
                    f"path sample t={ti:.3f} is not projectable; "
                    "try a different witness") from exc
    return PathOnS(U)


def _arclength_resample(U, lo, hi):
    """Redistribute samples lo..hi (inclusive, ends fixed) uniformly in
    Euclidean arc length along the polyline."""
    seg = np.linalg.norm(np.diff(U[lo:hi + 1], axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] <= 0:
        return U
    target = np.linspace(0.0, cum[-1], hi - lo + 1)
    out = U.copy()
    j = 0
    for k in range(1, hi - lo):
        while j < len(seg) - 1 and cum[j + 1] < target[k]:
            j += 1
        frac = (target[k] - cum[j]) / seg[j] if seg[j] > 0 else 0.0
        out[lo + k] = (1.0 - frac) * U[lo + j] + frac * U[lo + j + 1]
    return out


class Metric:
    """A fixed SPD preconditioner ``P`` with its Cholesky factor."""

    def __init__(self, P, reg=1e-12):
        d = np.diag(P)
        self.P = P + reg * max(float(d.max()), 1e-300) * np.eye(len(d))
        self.cho = sla.cho_factor(self.P, check_finite=False)

    def solve(self, x):
        return sla.cho_solve(self.cho, x, check_finite=False)


class SphereProblem:
    """J_s restricted to S, preconditioned by Hess J_0 / (p - 1)."""

    def __init__(self, F, s):
        self.F, self.s = F, s
        self.step = 1.0 / (F.p - 1.0)
        self.variable_metric = F.p != 2.0

    def metric(self, u):
        return Metric(self.F.hess_J0(u) / (self.F.p - 1.0))

    def value(self, u):
        return self.F.J(u, self.s)

    def value_and_grad(self, u):
        return self.F.J_and_grad(u, self.s)

    def normal(self, u):
        return self.F.I_and_grad(u)[1]

    def project(self, u):
        return self.F.project(u)

    def reduced_grad(self, u):
        return self.F.reduced_gradient(u, self.s)[0]


def _tangent_dir(metric, g, q):
    """P-gradient projected onto ``q . v = 0`` (no projection if q is None)."""
    Pg = metric.solve(g)
    if q is None:
        return Pg, None
    Pq = metric.solve(q)
    return Pg - (float(q @ Pg) / float(q @ Pq)) * Pq, Pq


def _climb(prob, metric, u, tau, cap=0.1):
    """One climbing update: a descent step across ``tau`` followed by a
    Newton step maximizing the level along ``tau``."""
    _, g = prob.value_and_grad(u)
    v, _ = _tangent_dir(metric, g, prob.normal(u))
    Ptau = metric.P @ tau
    tn = float(tau @ Ptau)
    v = v - (float(Ptau @ v) / tn) * tau
    u = prob.project(u - prob.step * v)
    # slope and curvature of the Lagrangian along tau
    tau = tau / np.sqrt(tn)
    _, g0 = prob.value_and_grad(u)
    q0 = prob.normal(u)
    t0 = 0.0 if q0 is None else float(g0 @ q0) / float(q0 @ q0)
    un = max(np.sqrt(float(u @ (metric.P @ u))), 1.0)
    delta = 1e-4 * un
    w = u + delta * tau
    _, g1 = prob.value_and_grad(w)
    q1 = prob.normal(w)
    r0 = g0 if q0 is None else g0 - t0 * q0
    r1 = g1 if q1 is None else g1 - t0 * q1
    slope = float(r0 @ tau)
    curv = float((r1 - r0) @ tau) / delta
    a = -slope / curv if curv < 0 else np.sign(slope) * cap * un
    a = float(np.clip(a, -cap * un, cap * un))
    return prob.project(u + a * tau)


def climbing_string(prob, U, rel_tol=1e-6, grad_tol=1e-6, max_iter=3000,
                    settle_tol=1e-4, settle_iter=60, refresh=10, armijo=1e-4,
                    metric=None):
    """Deform the sample array ``U`` (endpoints fixed) toward a minimax path
    of ``prob``.  Returns (U, levels, history, iterations, converged)."""
    U = U.copy()
    m = U.shape[0]
    step = prob.step
    shared = metric is not None or not prob.variable_metric
    if metric is None and shared:
        metric = prob.metric(U[-1])
    metrics = [metric] * m
    levels = np.array([prob.value(u) for u in U])
    history = [float(levels.max())]
    steps = np.full(m, step)
    climb = None
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if not shared and (it - 1) % refresh == 0:
            metrics = [None] + [prob.metric(U[i]) for i in range(1, m - 1)] + [None]
        for i in range(1, m - 1):
            metric = metrics[i]
            if i == climb:
                tau = U[i + 1] - U[i - 1]
                q = prob.normal(U[i])
                if q is not None:
                    Pq = metric.solve(q)
                    tau = tau - (float(q @ tau) / float(q @ Pq)) * Pq
                U[i] = _climb(prob, metric, U[i], tau)
                continue
            J, g = prob.value_and_grad(U[i])
            v, _ = _tangent_dir(metric, g, prob.normal(U[i]))
            slope = float(g @ v)
            if slope <= 0:
                continue
            h = steps[i]
            while h > 1e-10:
                cand = prob.project(U[i] - h * v)
                if prob.value(cand) <= J - armijo * h * slope:
                    U[i] = cand
                    break
                h *= 0.5
            steps[i] = min(step, 2.0 * h)
        if climb is None:
            U = _arclength_resample(U, 0, m - 1)
        else:
            U = _arclength_resample(U, 0, climb)
            U = _arclength_resample(U, climb, m - 1)
        for i in range(1, m - 1):
            U[i] = prob.project(U[i])
        levels = np.array([prob.value(u) for u in U])
        cmax = float(levels.max())
        change = abs(cmax - history[-1]) / max(1.0, abs(cmax))
        history.append(cmax)

        if climb is None:
            if (change < settle_tol and it > 5) or it >= settle_iter:
                climb = int(np.argmax(levels[1:-1])) + 1
            continue
        k = int(np.argmax(levels))
        gk = float(np.linalg.norm(prob.reduced_grad(U[k])))
        if change < rel_tol and gk < grad_tol * (1.0 + abs(cmax)):
            converged = True
            break
    return U, levels, history, it, converged


def deform(path: PathOnS, s: float, E, rel_tol: float = 1e-6,
           grad_tol: float = 1e-6, max_iter: int = 3000, settle_tol: float = 1e-4,
           settle_iter: int = 60, metric=None, refresh: int = 10,
           armijo: float = 1e-4, raise_on_fail: bool = True) -> MinimaxResult:
    """Deform ``path`` toward the minimax path of J_s; returns c(s).

    Descending samples take backtracking (Armijo) steps from 1 / (p - 1) so
    the level of every sample decreases.  The climbing sample descends
    across the path tangent and maximizes along it.  For p = 2 all samples
    share the metric built at phi_1; otherwise each sample uses the Hessian
    at its own position, rebuilt every ``refresh`` sweeps.  Stops when the
    path maximum changes by less than ``rel_tol`` (relative) between sweeps
    and the reduced gradient at the maximum is below
    ``grad_tol * (1 + |c|)``.
    """
    F = functionals(E)
    prob = SphereProblem(F, s)
    U, levels, history, it, converged = climbing_string(
        prob, path.samples, rel_tol=rel_tol, grad_tol=grad_tol,
        max_iter=max_iter, settle_tol=settle_tol, settle_iter=settle_iter,
        refresh=refresh, armijo=armijo, metric=metric)
    k = int(np.argmax(levels))
    gmax = F.reduced_grad_norm(U[k], s)
    state = SphereState(u=U[k].copy(), level=float(levels[k]), grad_norm=gmax, s=s)
    result = MinimaxResult(c_value=float(levels[k]), argmax_state=state,
                           path=PathOnS(U), reduced_grad_at_max=gmax,
                           iterations=it, s=s, argmax_index=k, history=history,
                           converged=converged and gmax < grad_tol * (1.0 + abs(levels[k])))
    if not result.converged and raise_on_fail:
        raise ConvergenceError(
            f"mountain pass at s={s} did not converge in {it} sweeps "
            f"(reduced gradient {gmax:.3e})", result=result)
    return result


def default_witness(E) -> np.ndarray:
    """A sign-changing witness: the first coordinate relative to the centre
    of Omega, held constant outside Omega."""
    spec = E.mesh.spec
    x = E.mesh.nodes[:, 0]
    lo, hi = spec.lower[0], spec.upper[0]
    return np.clip(x, lo, hi) - 0.5 * (lo + hi)


def is_sign_changing(u, E, tol=0.0) -> bool:
    """Both signs present among collar nodal values."""
    vals = np.asarray(u)[E.mesh.collar_nodes]
    return bool(vals.max() > tol and vals.min() < -tol)


# -- canonical paths ------------------------------------------------------

def canonical_paths(u, E, s: float = 0.0):
    """The three families u1, u2, u3 through a sign-changing ``u``.

    Returns callables of t in [0, 1]::

        u1(t) = P(u+ - (1-t) u-)
        u2(t) = P(((1-t)(u+)^p + t (u-)^p)^(1/p))
        u3(t) = P((1-t) u+ - u-)

    where P is the projection to S and the parts are nodal.
    """
    if isinstance(u, SphereState):
        u = u.u
    u = np.asarray(u, float)
    F = functionals(E)
    if not is_sign_changing(u, E):
        raise ValueError("canonical paths need a sign-changing function")
    p = F.p
    up = np.maximum(u, 0.0)
    um = np.maximum(-u, 0.0)

    def u1(t):
        return F.project(up - (1.0 - t) * um)

    def u2(t):
        return F.project(((1.0 - t) * up ** p + t * um ** p) ** (1.0 / p))

    def u3(t):
        return F.project((1.0 - t) * up - um)

    return u1, u2, u3


@dataclass
class PathLevelReport:
    mu: float
    s: float
    maxima: dict
    argmax_t: dict
    u2_bound_max_excess: float
    violations: list
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_path_levels(u, s: float, E, samples: int = 101, tol: float = 1e-6,
                       mu: float | None = None) -> PathLevelReport:
    """Evaluate J_s along u1, u2, u3 and compare with the level mu = J_s(u)."""
    if isinstance(u, SphereState):
        u = u.u
    F = functionals(E)
    if mu is None:
        mu = F.J(u, s)
    paths = dict(zip(("u1", "u2", "u3"), canonical_paths(u, E, s)))
    ts = np.linspace(0.0, 1.0, samples)
    maxima, where, violations = {}, {}, []
    p = F.p
    um = np.maximum(-np.asarray(u), 0.0)
    up = np.maximum(np.asarray(u), 0.0)
    collar = E.collar
    neg = collar.integral(um, lambda z: np.abs(z) ** p)
    pos = collar.integral(up, lambda z: np.abs(z) ** p)
    excess = -np.inf
    for name, path in paths.items():
        lv = np.array([F.J(path(t), s) for t in ts])
        k = int(np.argmax(lv))
        maxima[name] = float(lv[k])
        where[name] = float(ts[k])
        bad = np.flatnonzero(lv > mu + tol)
        for j in bad:
            violations.append((name, float(ts[j]), float(lv[j] - mu)))
        if name == "u2":
            denom = ((1.0 - ts) * pos + ts * neg) / F.eps
            bound = mu - s * ts * neg / np.maximum(denom * F.eps, 1e-300)
            excess = float(np.max(lv - bound))
    return PathLevelReport(mu=float(mu), s=s, maxima=maxima, argmax_t=where,
                           u2_bound_max_excess=excess, violations=violations,
                           tol=tol)


def sublevel_path(u, s: float, E, **opts):
    """Gradient-flow path from P(u-) inside the sublevel set of J_s.

    Returns the list of iterates (a path ending near +phi_1 or -phi_1) and
    the largest value of ``J_s(-w) - J_s(w) - s`` along it, which must be
    non-positive.
    """
    if isinstance(u, SphereState):
        u = u.u
    F = functionals(E)
    start = F.project(np.maximum(-np.asarray(u, float), 0.0))
    iterates = descend_path(F, start, s, **opts)
    gaps = [F.J(-w, s) - F.J(w, s) - s for w in iterates]
    return iterates, float(max(gaps))
