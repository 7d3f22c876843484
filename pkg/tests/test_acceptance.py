"""Acceptance criteria, one test per criterion at the stated tolerances."""

import hashlib
import math
import os

import numpy as np
import pytest

from fracfucik import inequalities as ineq
from fracfucik.cli import main
from fracfucik.eigen import lambda1, lambda1_subset, lambda2_dense
from fracfucik.functionals import functionals
from fracfucik.kernel.energy import lambda_np
from fracfucik.limits import bbm_linear_closed_form, bbm_table, eigen_limit_study
from fracfucik.mountainpass import default_witness, deform, initial_path, verify_path_levels
from fracfucik.nonres import linear_arctan, psi_and_grad, solve_nonresonant, weighted_lambda1
from fracfucik.selftest import fd_gradient_error, random_pairs
from fracfucik.spectrum import check_properties, sweep

from conftest import ACCEPTANCE, make_energy

S_GRID = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 4.0, 8.0]
CONFIGS = {2.0: dict(p=2.0, alpha=0.4), 3.0: dict(p=3.0, alpha=0.3)}


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    assert ok, detail


@pytest.fixture(scope="module")
def energies():
    return {p: make_energy(resolution=65, **kw) for p, kw in CONFIGS.items()}


@pytest.fixture(scope="module")
def eigs(energies):
    return {p: lambda1(E) for p, E in energies.items()}


@pytest.fixture(scope="module")
def curves(energies, eigs):
    return {p: sweep(S_GRID, energies[p], phi1=eigs[p]) for p in energies}


def test_criterion_01_constants():
    e1 = abs(lambda_np(1, 2.0) - 1.0)
    e2 = abs(lambda_np(2, 2.0) - 2.0 / math.pi)
    record(1, e1 < 1e-12 and e2 < 1e-12, f"errors {e1:.2e}, {e2:.2e}")


def test_criterion_02_gradient_checks(energies):
    rng = np.random.default_rng(0)
    worst = {}
    f = linear_arctan(1.0, 0.1)
    for p, E in energies.items():
        F = functionals(E)
        errs = [fd_gradient_error(lambda w: F.J_and_grad(w, s), u, v)
                for (u, v), s in zip(random_pairs(F, 20, rng), np.linspace(0, 2, 20))]
        worst[f"J_s p={p:g}"] = max(errs)
    E = energies[2.0]
    F = functionals(E)
    worst["psi p=2"] = max(fd_gradient_error(lambda w: psi_and_grad(w, f, E), u, v)
                           for u, v in random_pairs(F, 20, rng))
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    record(2, max(worst.values()) < 1e-5, "max relative FD error " + detail)


def test_criterion_03_bbm():
    rows = bbm_table([0.9, 0.95, 0.999], resolution=400)
    near = abs(rows[2][1] - 2.0) / 2.0
    cf = [r[3] for r in rows[:2]]
    ok = near < 0.02 and all(e < 0.005 for e in cf)
    record(3, ok, f"alpha 0.999: {rows[2][1]:.6f} ({near:.2%} from 2); closed-form "
                  f"errors {cf[0]:.2e}, {cf[1]:.2e}")


def test_criterion_04_steklov_limit():
    rows = eigen_limit_study([0.9, 0.95, 0.99])
    r = rows[1]
    assert r.resolution >= 400
    e1 = [q.lambda1_err for q in rows]
    e2 = [q.lambda2_err for q in rows]
    trend = e1[0] > e1[1] > e1[2] and e2[0] > e2[1] > e2[2]
    ok = r.lambda1_err < 0.05 and r.lambda2_err < 0.05 and trend
    record(4, ok, f"alpha 0.95: lambda1 {r.lambda1:.6f} ({r.lambda1_err:.2%}), "
                  f"lambda2 {r.lambda2:.6f} ({r.lambda2_err:.2%}); errors decreasing {trend}")


def test_criterion_05_minimax_consistency():
    E = make_energy(resolution=400, **CONFIGS[2.0])
    phi = lambda1(E)
    l2 = lambda2_dense(E).value
    w = default_witness(E)
    c41 = deform(initial_path(phi, w, 41, E), 0.0, E).c_value
    c81 = deform(initial_path(phi, w, 81, E), 0.0, E).c_value
    rel = abs(c41 - l2) / l2
    dm = abs(c81 - c41) / abs(c41)
    record(5, rel < 0.01 and dm < 1e-4,
           f"c(0) {c41:.10f} vs lambda2 {l2:.10f} ({rel:.1e}); m 41 -> 81 changes {dm:.1e}")


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_criterion_06_curve_properties(curves, p):
    curve = curves[p]
    conv = len(curve.converged())
    rep = check_properties(curve)
    ok = conv == len(S_GRID) and rep.ok
    failed = [k for k, v in rep.checks.items() if not v]
    prev = ACCEPTANCE.get(6, (True, ""))
    line = f"p={p:g}: {conv}/{len(S_GRID)} converged, failed checks {failed or 'none'}"
    ACCEPTANCE[6] = (prev[0] and ok, (prev[1] + "; " if prev[1] else "") + line)
    assert ok, line


def test_criterion_07_endpoint_identities(energies, eigs):
    worst = 0.0
    for p, E in energies.items():
        F = functionals(E)
        phi, lam = eigs[p].function, eigs[p].value
        for s in (0.0, 0.5, 1.0):
            worst = max(worst, abs(F.J(phi, s) - (lam - s)), abs(F.J(-phi, s) - lam))
    record(7, worst < 1e-8, f"max error {worst:.2e}")


def test_criterion_08_canonical_path_levels(energies, eigs):
    worst, ok = -np.inf, True
    for p, E in energies.items():
        path = initial_path(eigs[p], default_witness(E), 41, E)
        for s in (0.0, 0.5):
            res = deform(path, s, E)
            rep = verify_path_levels(res.argmax_state, s, E, samples=101, tol=1e-6,
                                     mu=res.c_value)
            ok &= rep.ok
            worst = max(worst, max(rep.maxima.values()) - rep.mu)
    record(8, ok, f"max over paths of (max J - mu) {worst:.2e}")


def test_criterion_09_inequality_battery(energies):
    reps = [("", ineq.check_g_maximum(10_000)), ("", ineq.check_power_monotonicity(10_000))]
    for p, E in energies.items():
        reps.append((f" p={p:g}", ineq.check_sign_decomposition(E, 10_000)))
        reps.append((f" p={p:g}", ineq.check_discrete_convexity(E, 10_000)))
    detail = "; ".join(f"{r.name}{tag}: {r.violations}/{r.draws} violations"
                       for tag, r in reps)
    record(9, all(r.ok for _, r in reps), detail)


def test_criterion_10_domain_monotonicity(energies, eigs):
    gaps = {}
    for p, E in energies.items():
        mesh = E.mesh
        centers = mesh.nodes[mesh.elements].mean(axis=1)[:, 0]
        half = mesh.in_collar & (centers < mesh.spec.center[0])
        gaps[p] = lambda1_subset(E, half).value - eigs[p].value
    record(10, all(g > 1e-6 for g in gaps.values()),
           ", ".join(f"p={p:g} gap {g:.4e}" for p, g in gaps.items()))


def test_criterion_11_nonresonance_demo(energies, eigs):
    E, phi = energies[2.0], eigs[2.0]
    res = solve_nonresonant(linear_arctan(phi.value, 0.1), E, phi1=phi)
    wl = weighted_lambda1(phi.value, E)
    ok = res.converged and res.residual < 1e-6 and abs(wl - 1.0) < 1e-8
    record(11, ok, f"{res.method}: residual {res.residual:.2e} (trivial {res.trivial}); "
                   f"weighted_lambda1(lambda1) - 1 = {wl - 1:.1e}")


def _digests(folder):
    out = {}
    for name in sorted(os.listdir(folder)):
        with open(os.path.join(folder, name), "rb") as fh:
            out[name] = hashlib.sha256(fh.read()).hexdigest()
    return out


def test_criterion_12_reproducibility(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 3\nalpha_list = 0.9, 0.95\n")
    same = {}
    for cmd in ("lambda1", "curve", "bbm", "steklov", "nonres", "selftest"):
        runs = []
        for k in (1, 2):
            out = tmp_path / f"{cmd}{k}"
            assert main([cmd, "--config", str(cfg), "-o", str(out)]) == 0
            runs.append(_digests(out))
        same[cmd] = bool(runs[0]) and runs[0] == runs[1]
    record(12, all(same.values()), ", ".join(f"{k} {'identical' if v else 'DIFFERENT'}"
                                             for k, v in same.items()))
