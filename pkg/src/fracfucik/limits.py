"""The alpha -> 1, eps = 1 - alpha bridge to the local Steklov problem.

On Omega = (-1, 1) with p = 2 the Steklov problem ``-u'' + u = 0`` with
``u' nu = lambda u`` on the boundary has the even branch ``cosh`` with
``lambda = tanh 1`` and the odd branch ``sinh`` with ``lambda = coth 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .domain import DomainSpec, build_mesh
from .eigen import lambda1, lambda2_dense
from .errors import ConfigError
from .functionals import functionals
from .kernel.energy import assemble, bbm_sequence, gradient_energy, lambda_np
from .local import LocalIntegrator

BBM_COLUMNS = ("alpha", "scaled_energy", "closed_form", "rel_err_closed_form",
               "local_target", "rel_err_target")

TABLE_COLUMNS = ("alpha", "epsilon", "lambda1", "lambda1_target", "rel_err",
                 "lambda2", "lambda2_target", "rel_err")


def _mesh(spec, resolution):
    # the limit alpha -> 1 leaves n > p alpha by design; the warning is noise here
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="n <= p")
        return build_mesh(spec, resolution)


def steklov_exact_1d(p: float = 2.0, omega=(-1.0, 1.0)):
    """(tanh 1, coth 1), the first two Steklov eigenvalues on (-1, 1)."""
    if p != 2.0 or tuple(float(v) for v in omega) != (-1.0, 1.0):
        raise ConfigError("the Steklov oracle covers p = 2 on (-1, 1) only")
    return math.tanh(1.0), 1.0 / math.tanh(1.0)


def default_resolution(alpha: float) -> int:
    """Grid scaled as 1 / (1 - alpha): 201, 401 and 2001 nodes across
    Omega at alpha = 0.9, 0.95 and 0.99."""
    return int(round(20.0 / (1.0 - alpha))) + 1


def steklov_quotient(mesh, u, p: float = 2.0) -> float:
    """``(int |u'|^p + int |u|^p) / sum_boundary |u|^p`` for nodal u in 1D."""
    if mesh.n != 1:
        raise ConfigError("steklov_quotient is one-dimensional")
    u = mesh.check(u)
    inside = LocalIntegrator(mesh, mesh.in_omega).integral(u, lambda z: np.abs(z) ** p)
    x = mesh.nodes[:, 0]
    lo, hi = mesh.spec.lower[0], mesh.spec.upper[0]
    ends = [int(np.argmin(np.abs(x - lo))), int(np.argmin(np.abs(x - hi)))]
    bnd = float(np.sum(np.abs(u[ends]) ** p))
    return (gradient_energy(mesh, u, p) + inside) / bnd


def decay_extension(mesh, u):
    """Keep values on closed Omega; outside, the value at the nearest point
    of Omega times a factor decaying linearly to zero at the box boundary."""
    spec = mesh.spec
    lo, hi = spec.lower, spec.upper
    blo, bhi = spec.box()
    X = mesh.nodes
    Y = np.clip(X, lo, hi)
    gap = np.where(X < lo, (X - lo) / (blo - lo), np.where(X > hi, (X - hi) / (bhi - hi), 0.0))
    factor = np.clip(1.0 - np.abs(gap).max(axis=1), 0.0, 1.0)
    vals = np.asarray(u(*Y.T), dtype=float) * np.ones(len(X))
    return vals * factor


def extension_ratio(u, alpha: float, p: float = 2.0, omega=(-1.0, 1.0),
                   resolution: int | None = None, truncation_radius=None) -> float:
    """``[c [Eu]^p + |Eu|^p_Omega] / [(1/eps) |Eu|^p_(Omega_eps)]`` with
    ``eps = 1 - alpha`` and ``E`` the decay extension of the callable u."""
    eps = 1.0 - alpha
    spec = DomainSpec(n=1, omega=omega, epsilon=eps, alpha=alpha, p=p,
                      truncation_radius=truncation_radius)
    mesh = _mesh(spec, resolution or default_resolution(alpha))
    if not np.any(mesh.in_collar):
        raise ConfigError("collar coarser than mesh")
    E = assemble(mesh)
    F = functionals(E)
    v = decay_extension(mesh, u)
    return F.J(v, 0.0) / F.I(v)


def bbm_linear_closed_form(alpha: float, p: float = 2.0) -> float:
    """``Lambda (1 - alpha) int int_(Omega x Omega) |x - y|^(p - 1 - p alpha)``
    for u = x on (-1, 1): ``(1 - alpha) Lambda 2 2^(beta+2) / ((beta+1)(beta+2))``
    with ``beta = p - 1 - p alpha``."""
    beta = p - 1.0 - p * alpha
    return ((1.0 - alpha) * lambda_np(1, p) * 2.0 * 2.0 ** (beta + 2.0)
            / ((beta + 1.0) * (beta + 2.0)))


def bbm_table(alpha_list, resolution: int = 400, p: float = 2.0, omega=(-1.0, 1.0)):
    """Rows ``(alpha, value, closed_form, err, target, err)`` for u = x."""
    spec = DomainSpec(n=1, omega=omega, epsilon=0.25, alpha=0.25, p=p)
    mesh = build_mesh(spec, resolution)
    u = mesh.nodes[:, 0].copy()
    values, target = bbm_sequence(mesh, u, p, alpha_list)
    rows = []
    for a, v in zip(alpha_list, values):
        cf = bbm_linear_closed_form(a, p) if tuple(omega) == (-1.0, 1.0) else float("nan")
        rows.append((float(a), float(v), cf, abs(v - cf) / cf, target,
                     abs(v - target) / target))
    return rows


def bbm_csv(rows, header_lines=()) -> str:
    lines = [f"# {h}" for h in header_lines]
    lines.append(",".join(BBM_COLUMNS))
    for a, v, cf, e1, t, e2 in rows:
        lines.append(f"{a:.6f},{v:.12e},{cf:.12e},{e1:.6e},{t:.12e},{e2:.6e}")
    return "\n".join(lines) + "\n"


@dataclass
class LimitRow:
    alpha: float
    epsilon: float
    lambda1: float
    lambda1_target: float
    lambda1_err: float
    lambda2: float
    lambda2_target: float
    lambda2_err: float
    resolution: int

    def as_tuple(self):
        return (self.alpha, self.epsilon, self.lambda1, self.lambda1_target,
                self.lambda1_err, self.lambda2, self.lambda2_target, self.lambda2_err)


def limit_row(alpha: float, resolution: int | None = None, truncation_radius=None,
              omega=(-1.0, 1.0)) -> LimitRow:
    t1, t2 = steklov_exact_1d(2.0, omega)
    eps = 1.0 - alpha
    res = resolution or default_resolution(alpha)
    spec = DomainSpec(n=1, omega=omega, epsilon=eps, alpha=alpha, p=2.0,
                      truncation_radius=truncation_radius)
    E = assemble(_mesh(spec, res))
    l1 = lambda1(E).value
    l2 = lambda2_dense(E).value
    return LimitRow(alpha, eps, l1, t1, abs(l1 - t1) / t1, l2, t2, abs(l2 - t2) / t2, res)


def eigen_limit_study(alpha_list, resolution=None, truncation_radius=None):
    """One row per alpha with eps = 1 - alpha; ``resolution`` may be a
    callable of alpha, an int, or None for :func:`default_resolution`."""
    rows = []
    for a in alpha_list:
        res = resolution(a) if callable(resolution) else resolution
        rows.append(limit_row(a, res, truncation_radius))
    return rows


def table_csv(rows, header_lines=()) -> str:
    lines = [f"# {h}" for h in header_lines]
    lines.append(",".join(TABLE_COLUMNS))
    for r in rows:
        a, e, l1, t1, e1, l2, t2, e2 = r.as_tuple()
        lines.append(f"{a:.6f},{e:.6f},{l1:.12e},{t1:.12e},{e1:.6e},"
                     f"{l2:.12e},{t2:.12e},{e2:.6e}")
    return "\n".join(lines) + "\n"


__all__ = ["bbm_linear_closed_form", "bbm_table", "bbm_csv", "steklov_exact_1d", "extension_ratio", "eigen_limit_study",
           "steklov_quotient", "decay_extension", "table_csv", "LimitRow"]
