import numpy as np
import pytest

from fracfucik import inequalities as ineq


def test_power_monotonicity():
    rep = ineq.check_power_monotonicity(draws=10_000)
    assert rep.ok and rep.draws == 10_000


def test_g_maximum_at_one():
    assert ineq.check_g_maximum(draws=10_000).ok


def test_g_function_at_one_and_zero():
    U, V, p = 2.0, -1.0, 3.0
    assert ineq.g_function(0.0, U, V, p) == pytest.approx(abs(U) ** p)
    assert ineq.g_function(1.0, U, V, p) == pytest.approx(abs(U - V) ** p + abs(U - V) ** (p - 2) * (U - V) * V)


@pytest.mark.parametrize("name", ["E2", "E3"])
def test_sign_decomposition(request, name):
    E = request.getfixturevalue(name)
    assert ineq.check_sign_decomposition(E, draws=2000).ok


@pytest.mark.parametrize("name", ["E2", "E3"])
def test_discrete_convexity_of_pth_powers(request, name):
    E = request.getfixturevalue(name)
    assert ineq.check_discrete_convexity(E, draws=2000, powered=True).ok


def test_unpowered_convexity_counterexample(E2):
    # u = 2v: sigma_t = (1 + 3t)^(1/2) v, so at t = 1/2 the left side is
    # sqrt(2.5) [v] while the right side is 1.5 [v]
    v = np.abs(np.random.default_rng(0).standard_normal(E2.N)) + 0.1
    u = 2.0 * v
    sv = E2.seminorm_p(v) ** 0.5
    lhs = E2.seminorm_p(ineq.sigma(u, v, 0.5, 2.0)) ** 0.5
    assert lhs == pytest.approx(np.sqrt(2.5) * sv, rel=1e-12)
    assert lhs > 1.5 * sv


def test_report_fields():
    rep = ineq.check_g_maximum(draws=100, seed=3)
    assert rep.name == "g(t) <= g(1)"
    assert set(rep.worst) == {"U", "V", "t", "p"}
