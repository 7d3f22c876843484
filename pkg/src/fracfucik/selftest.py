"""Aggregate sanity checks: constants, gradients, endpoint identities and
the inequality battery."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import inequalities as ineq
from .domain import build_mesh
from .eigen import lambda1 as compute_lambda1
from .functionals import functionals
from .kernel.energy import assemble, lambda_np
from .nonres import linear_arctan, psi_and_grad
from .spectrum import trivial_lines_check


@dataclass
class Check:
    name: str
    ok: bool
    detail: str
    gate: bool = True   # informational checks do not count as failures


def fd_gradient_error(value_and_grad, u, v, h=1e-5):
    """Relative error between ``grad . v`` and the central difference of
    the value along v."""
    _, g = value_and_grad(u)
    exact = float(g @ v)
    fd = (value_and_grad(u + h * v)[0] - value_and_grad(u - h * v)[0]) / (2.0 * h)
    return abs(fd - exact) / max(abs(exact), abs(fd), 1e-300)


def random_pairs(F, count, rng):
    """Random (u, v) with u on S and v of unit Euclidean norm."""
    out = []
    for _ in range(count):
        u = F.project(rng.standard_normal(F.E.N))
        v = rng.standard_normal(F.E.N)
        out.append((u, v / np.linalg.norm(v)))
    return out


def gradient_checks(E, pairs=20, seed=0, s_values=(0.0, 0.5, 2.0)):
    """Worst relative FD error of grad J_s (and of grad Psi when p = 2)."""
    rng = np.random.default_rng(seed)
    F = functionals(E)
    worst_j = 0.0
    for k, (u, v) in enumerate(random_pairs(F, pairs, rng)):
        s = s_values[k % len(s_values)]
        worst_j = max(worst_j, fd_gradient_error(lambda w: F.J_and_grad(w, s), u, v))
    worst_psi = None
    if E.p == 2.0:
        f = linear_arctan(1.0, 0.1)
        worst_psi = 0.0
        for u, v in random_pairs(F, pairs, rng):
            worst_psi = max(worst_psi, fd_gradient_error(
                lambda w: psi_and_grad(w, f, E), u, v))
    return worst_j, worst_psi


def run(cfg) -> list:
    """All checks for the domain described by ``cfg``."""
    checks = []
    c1, c2 = lambda_np(1, 2.0), lambda_np(2, 2.0)
    err = max(abs(c1 - 1.0), abs(c2 - 2.0 / math.pi))
    checks.append(Check("lambda_np(1,2) = 1 and lambda_np(2,2) = 2/pi", err < 1e-12,
                        f"max error {err:.3e}"))

    E = assemble(build_mesh(cfg.domain(), cfg.resolution))
    F = functionals(E)
    gj, gp = gradient_checks(E, seed=cfg.seed)
    checks.append(Check("grad J_s matches central differences", gj < 1e-5,
                        f"worst relative error {gj:.3e}"))
    if gp is not None:
        checks.append(Check("grad Psi matches central differences", gp < 1e-5,
                            f"worst relative error {gp:.3e}"))

    phi = compute_lambda1(E)
    lam = phi.value
    worst = 0.0
    for s in (0.0, 0.5, 1.0):
        worst = max(worst, abs(F.J(phi.function, s) - (lam - s)),
                    abs(F.J(-phi.function, s) - lam))
    checks.append(Check("J_s(phi1) = lambda1 - s and J_s(-phi1) = lambda1",
                        worst < 1e-8, f"max error {worst:.3e}"))
    tl = trivial_lines_check(E, phi)
    rmax = max(r for _, r in tl.vertical + tl.horizontal)
    checks.append(Check("trivial lines solve the Fucik problem", tl.ok,
                        f"max residual {rmax:.3e}"))

    d, seed = cfg.draws, cfg.seed
    for rep in (ineq.check_power_monotonicity(d, seed), ineq.check_g_maximum(d, seed),
                ineq.check_sign_decomposition(E, d, seed),
                ineq.check_discrete_convexity(E, d, seed, powered=True)):
        checks.append(Check(rep.name, rep.ok, _ineq_detail(rep)))
    rep = ineq.check_discrete_convexity(E, d, seed)
    checks.append(Check(rep.name + ", unpowered", rep.ok,
                        _ineq_detail(rep) + "; known to fail for u = 2v", gate=False))
    return checks


def _ineq_detail(rep):
    return f"{rep.violations} of {rep.draws} draws violate, max excess {rep.max_excess:.3e}"


def report(checks, header_lines=()) -> str:
    lines = [f"# {h}" for h in header_lines]
    for c in checks:
        tag = ("PASS" if c.ok else "FAIL") if c.gate else ("info" if c.ok else "INFO-FAIL")
        lines.append(f"{tag}  {c.name}: {c.detail}")
    failures = sum(1 for c in checks if c.gate and not c.ok)
    lines.append(f"failures = {failures}")
    return "\n".join(lines) + "\n"
