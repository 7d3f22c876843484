"""Randomized checks of the pointwise and discrete inequalities behind the
variational arguments.

Each check draws ``draws`` random instances from a seeded generator and
returns an :class:`InequalityReport` counting violations beyond ``slack``
(relative to the size of the compared quantities).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class InequalityReport:
    name: str
    draws: int
    violations: int
    max_excess: float
    worst: dict | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _report(name, lhs, rhs, slack, info=None):
    scale = 1.0 + np.abs(lhs) + np.abs(rhs)
    excess = (lhs - rhs) / scale
    bad = excess > slack
    k = int(np.argmax(excess))
    worst = None
    if info is not None:
        worst = {key: np.asarray(val)[k].tolist() for key, val in info.items()}
    return InequalityReport(name, len(lhs), int(bad.sum()), float(excess[k]), worst)


def check_power_monotonicity(draws=10_000, seed=0, slack=1e-12, p_range=(2.0, 6.0)):
    """``|a - b|^p <= 2^p (|a|^(p-2) a - |b|^(p-2) b)(a - b)`` for p >= 2."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(draws) * np.exp(rng.uniform(-3, 3, draws))
    b = rng.standard_normal(draws) * np.exp(rng.uniform(-3, 3, draws))
    p = rng.uniform(*p_range, draws)
    lhs = np.abs(a - b) ** p
    rhs = 2.0 ** p * (np.abs(a) ** (p - 2) * a - np.abs(b) ** (p - 2) * b) * (a - b)
    return _report("power monotonicity", lhs, rhs, slack, {"a": a, "b": b, "p": p})


def g_function(t, U, V, p):
    """``g(t) = |U - t V|^p + |U - V|^(p-2) (U - V) V |t|^p``."""
    d = U - V
    return np.abs(U - t * V) ** p + np.abs(d) ** (p - 2) * d * V * np.abs(t) ** p


def check_g_maximum(draws=10_000, seed=0, slack=1e-12, t_range=(-2.0, 2.0),
                    p_range=(2.0, 6.0)):
    """``g(t) <= g(1)`` whenever ``U V <= 0``."""
    rng = np.random.default_rng(seed)
    U = np.abs(rng.standard_normal(draws)) * np.exp(rng.uniform(-2, 2, draws))
    V = -np.abs(rng.standard_normal(draws)) * np.exp(rng.uniform(-2, 2, draws))
    flip = rng.random(draws) < 0.5
    U[flip], V[flip] = -U[flip], -V[flip]
    zero = rng.random(draws) < 0.05
    V[zero] = 0.0
    t = rng.uniform(*t_range, draws)
    p = rng.uniform(*p_range, draws)
    return _report("g(t) <= g(1)", g_function(t, U, V, p), g_function(1.0, U, V, p),
                   slack, {"U": U, "V": V, "t": t, "p": p})


def _random_nodal(rng, E, draws, sign_changing=True):
    N = E.N
    scale = np.exp(rng.uniform(-1, 1, (draws, 1)))
    if sign_changing:
        return scale * rng.standard_normal((draws, N))
    return scale * rng.random((draws, N))


def check_sign_decomposition(E, draws=10_000, seed=0, slack=1e-12):
    """``[u]^p >= [u+]^p + [u-]^p`` with nodal positive and negative parts."""
    rng = np.random.default_rng(seed)
    U = _random_nodal(rng, E, draws)
    lhs = np.empty(draws)
    rhs = np.empty(draws)
    for k, u in enumerate(U):
        rhs[k] = E.seminorm_p(u)
        lhs[k] = E.seminorm_p(np.maximum(u, 0)) + E.seminorm_p(np.maximum(-u, 0))
    return _report("sign decomposition", lhs, rhs, slack)


def sigma(u, v, t, p):
    """``((1 - t) v^p + t u^p)^(1/p)`` for nonnegative nodal u, v."""
    return ((1.0 - t) * v ** p + t * u ** p) ** (1.0 / p)


def check_discrete_convexity(E, draws=10_000, seed=0, slack=1e-12,
                             ts=(0.0, 0.25, 0.5, 0.75, 1.0), powered=False):
    """``[sigma_t] <= (1 - t)[v] + t[u]`` for nonnegative nodal u, v.

    With ``powered=True`` the p-th powers are compared instead:
    ``[sigma_t]^p <= (1 - t)[v]^p + t[u]^p``.
    """
    rng = np.random.default_rng(seed)
    p = E.p
    ts = np.asarray(ts, float)
    per = int(np.ceil(draws / len(ts)))
    U = _random_nodal(rng, E, per, sign_changing=False)
    V = _random_nodal(rng, E, per, sign_changing=False)
    lhs, rhs, tt = [], [], []
    for u, v in zip(U, V):
        su, sv = E.seminorm_p(u), E.seminorm_p(v)
        for t in ts:
            st = E.seminorm_p(sigma(u, v, t, p))
            if powered:
                lhs.append(st)
                rhs.append((1.0 - t) * sv + t * su)
            else:
                lhs.append(st ** (1.0 / p))
                rhs.append((1.0 - t) * sv ** (1.0 / p) + t * su ** (1.0 / p))
            tt.append(t)
    lhs, rhs = np.array(lhs[:draws]), np.array(rhs[:draws])
    name = "discrete convexity" + (" (p-th powers)" if powered else "")
    return _report(name, lhs, rhs, slack, {"t": np.array(tt[:draws])})
