import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracfucik.errors import ConfigError
from fracfucik.functionals import functionals
from fracfucik.nonres import (WeightPair, from_callable, grad_psi, linear, linear_arctan,
                              nonlinearity, only_trivial_check, piecewise_linear, psi,
                              psi_and_grad, solve_nonresonant, weighted_lambda1,
                              weighted_residual)
from fracfucik.selftest import fd_gradient_error


def test_weighted_lambda1_normalization(E2, phi2):
    lam = phi2.value
    assert weighted_lambda1(lam, E2) == pytest.approx(1.0, abs=1e-8)
    assert weighted_lambda1(2 * lam, E2) == pytest.approx(0.5, rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 31), bump=st.floats(0.01, 2.0))
def test_weighted_lambda1_non_increasing_in_weight(E2, seed, bump):
    rng = np.random.default_rng(seed)
    m = 0.5 + rng.random(E2.N)
    extra = np.zeros(E2.N)
    nodes = np.flatnonzero(E2.mesh.collar_nodes)
    extra[rng.choice(nodes, size=max(1, len(nodes) // 3), replace=False)] = bump
    assert weighted_lambda1(m + extra, E2) < weighted_lambda1(m, E2)


def test_weighted_lambda1_rejects_nonpositive_weight(E2):
    with pytest.raises(ConfigError):
        weighted_lambda1(0.0, E2)


def test_p2_only(E3):
    with pytest.raises(ConfigError):
        weighted_lambda1(1.0, E3)


@pytest.mark.parametrize("f", [linear(0.7, 0.1), linear_arctan(0.9, 0.1, 0.05),
                               piecewise_linear(1.5, 0.5, 0.2)])
def test_grad_psi_matches_central_difference(E2, rng, f):
    F = functionals(E2)
    for _ in range(5):
        u = F.project(rng.standard_normal(E2.N))
        v = rng.standard_normal(E2.N)
        assert fd_gradient_error(lambda w: psi_and_grad(w, f, E2), u, v / np.linalg.norm(v)) < 1e-5


def test_catalog_primitives_match_quadrature():
    s = np.linspace(-4, 4, 17)
    for f in (linear(0.7, 0.1), linear_arctan(0.9, 0.3, 0.05), piecewise_linear(1.5, 0.5, 0.2)):
        g = from_callable(f.f)
        assert np.allclose(g.F(s), f.F(s), rtol=1e-9, atol=1e-10)


def test_catalog_lookup_errors():
    assert nonlinearity("linear", k=1.0).name == "linear"
    with pytest.raises(ConfigError):
        nonlinearity("cubic")
    with pytest.raises(ConfigError):
        nonlinearity("linear", slope=1.0)


def test_resonant_arctan_demo_reaches_a_critical_point(E2, phi2):
    f = linear_arctan(phi2.value, 0.1)
    res = solve_nonresonant(f, E2, phi1=phi2)
    assert res.converged
    assert res.residual < 1e-6
    assert np.linalg.norm(grad_psi(res.u, f, E2)) == pytest.approx(res.residual)


def test_forced_nonresonant_problem_has_nontrivial_solution(E2, phi2):
    lam = phi2.value
    f = piecewise_linear(lam + 0.5, lam + 0.5, 0.3)
    res = solve_nonresonant(f, E2, phi1=phi2)
    assert res.converged and not res.trivial
    assert res.residual < 1e-6
    assert psi(res.u, f, E2) == pytest.approx(res.psi)


def test_phi1_is_critical_for_the_resonant_linear_problem(E2, phi2):
    f = linear(phi2.value)
    assert psi(phi2.function, f, E2) == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.norm(grad_psi(phi2.function, f, E2)) < 1e-10


def test_weighted_residual_vanishes_for_eigenpair(E2, phi2):
    lam = phi2.value
    mw = np.full(E2.N, lam)
    assert np.linalg.norm(weighted_residual(phi2.function, mw, mw, E2)) < 1e-10


def test_weight_hypothesis_check(E2, phi2):
    lam = phi2.value
    a, b = lam + 1.0, lam + 0.5
    good = WeightPair((lam + a) / 2, (lam + b) / 2)
    assert good.check(E2, lam, a, b) == []
    assert WeightPair(lam, lam).check(E2, lam, a, b)
    assert WeightPair(a, b).check(E2, lam, a, b)


def test_only_trivial_check_reports_floor(E2, phi2):
    lam = phi2.value
    a, b = 3.0, 2.5
    rep = only_trivial_check(WeightPair((lam + a) / 2, (lam + b) / 2), a, b, E2,
                             starts=3, lambda1=lam)
    assert len(rep.residuals) == 3
    assert rep.floor == min(rep.residuals)
    assert rep.hypotheses_failed == []
    assert "not a proof" in rep.evidence or "found" in rep.evidence


def test_only_trivial_check_finds_phi1_for_constant_lambda1_weights(E2, phi2):
    lam = phi2.value
    rep = only_trivial_check(WeightPair(lam, lam), 3.0, 2.5, E2, starts=2,
                             extra_starts=[phi2.function], lambda1=lam)
    assert rep.floor < 1e-6
    assert rep.hypotheses_failed


def test_only_trivial_check_needs_a_start(E2):
    with pytest.raises(ConfigError):
        only_trivial_check(WeightPair(1.0, 1.0), 3.0, 2.5, E2, starts=0)
