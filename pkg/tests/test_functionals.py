import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracfucik.functionals import (functionals, negative_part, positive_part,
                                   project_to_S, reduced_grad_norm)
from fracfucik.selftest import fd_gradient_error


@pytest.fixture(params=["E2", "E3"])
def E(request):
    return request.getfixturevalue(request.param)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 31), s=st.floats(0.0, 8.0))
def test_grad_J_matches_central_difference(E2, E3, seed, s):
    rng = np.random.default_rng(seed)
    for E in (E2, E3):
        F = functionals(E)
        u = F.project(rng.standard_normal(E.N))
        v = rng.standard_normal(E.N)
        v /= np.linalg.norm(v)
        assert fd_gradient_error(lambda w: F.J_and_grad(w, s), u, v) < 1e-5


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 31), t=st.floats(0.01, 100.0))
def test_projection_lands_on_S_and_is_scale_free(E3, seed, t):
    F = functionals(E3)
    u = np.random.default_rng(seed).standard_normal(E3.N)
    w = F.project(u)
    assert F.I(w) == pytest.approx(1.0, rel=1e-12)
    assert np.allclose(F.project(t * u), w, rtol=1e-10, atol=1e-13)


def test_project_rejects_function_vanishing_on_collar(E2):
    F = functionals(E2)
    u = np.zeros(E2.N)
    with pytest.raises(ValueError, match="not projectable"):
        F.project(u)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 31), s=st.floats(0.0, 5.0))
def test_J_s_splits_into_J_0_and_positive_mass(E3, seed, s):
    F = functionals(E3)
    u = F.project(np.random.default_rng(seed).standard_normal(E3.N))
    semi, local, pos = F.parts(u)
    assert F.J(u, s) == pytest.approx(F.J(u, 0.0) - s * pos, rel=1e-12, abs=1e-12)
    # I(u) = I(u+) + I(u-) pointwise
    neg = F.J(-u, 0.0) - F.J(-u, 1.0)
    assert pos + neg == pytest.approx(1.0, rel=1e-12)


def test_endpoint_identities(E, request):
    phi = request.getfixturevalue("phi2" if E.p == 2.0 else "phi3")
    F = functionals(E)
    for s in (0.0, 0.5, 1.0):
        assert F.J(phi.function, s) == pytest.approx(phi.value - s, abs=1e-8)
        assert F.J(-phi.function, s) == pytest.approx(phi.value, abs=1e-8)


def test_reduced_gradient_vanishes_at_phi1(E2, phi2):
    F = functionals(E2)
    r, t = F.reduced_gradient(phi2.function, 0.0)
    assert np.linalg.norm(r) < 1e-10
    assert t == pytest.approx(phi2.value, rel=1e-10)
    assert reduced_grad_norm(phi2.function, 0.0, E2) < 1e-10


def test_fucik_residual_on_trivial_lines(E2, phi2):
    F = functionals(E2)
    u, lam = phi2.function, phi2.value
    assert F.fucik_residual(u, lam, 0.3) < 1e-10
    assert F.fucik_residual(-u, lam + 2.0, lam) < 1e-10
    assert F.fucik_residual(u, lam + 1.0, lam) > 1e-3


def test_hessian_p2_is_constant(E2, rng):
    F = functionals(E2)
    H = F.hess_J0()
    u = rng.standard_normal(E2.N)
    v = rng.standard_normal(E2.N)
    assert v @ F.grad_J(u, 0.0) == pytest.approx(v @ H @ u, rel=1e-10)


def test_parts_helpers():
    u = np.array([-2.0, 0.0, 3.0])
    assert np.array_equal(positive_part(u), [0.0, 0.0, 3.0])
    assert np.array_equal(negative_part(u), [2.0, 0.0, 0.0])


def test_project_to_S_state(E2, rng):
    st_ = project_to_S(rng.standard_normal(E2.N), E2)
    F = functionals(E2)
    assert F.I(st_.u) == pytest.approx(1.0)
    assert st_.level is None
