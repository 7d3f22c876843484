import numpy as np
import pytest

from fracfucik.eigen import lambda2_dense
from fracfucik.errors import ConfigError, ConvergenceError
from fracfucik.functionals import functionals
from fracfucik.mountainpass import (MIN_SAMPLES, PathOnS, canonical_paths, default_witness,
                                    deform, initial_path, is_sign_changing,
                                    sublevel_path, verify_path_levels)


@pytest.fixture(scope="module")
def path2(E2, phi2):
    return initial_path(phi2, default_witness(E2), 41, E2)


@pytest.fixture(scope="module")
def mp2(E2, path2):
    return {s: deform(path2, s, E2) for s in (0.0, 0.5)}


def test_initial_path_on_S_with_fixed_ends(E2, phi2, path2):
    assert np.allclose(path2.constraint_values(E2), 1.0, rtol=1e-12)
    assert np.array_equal(path2.samples[0], -phi2.function)
    assert np.array_equal(path2.samples[-1], phi2.function)


def test_initial_path_errors(E2, phi2):
    with pytest.raises(ValueError, match="multiple of phi_1"):
        initial_path(phi2, 3.0 * phi2.function, 41, E2)
    with pytest.raises(ConfigError):
        initial_path(phi2, default_witness(E2), 41, None)
    with pytest.raises(ConfigError):
        initial_path(phi2, default_witness(E2), MIN_SAMPLES - 1, E2)
    with pytest.raises(ConfigError):
        PathOnS(np.zeros((3, E2.N)))


def test_c0_equals_lambda2_for_p2(E2, mp2):
    l2 = lambda2_dense(E2).value
    assert mp2[0.0].converged
    assert mp2[0.0].c_value == pytest.approx(l2, rel=1e-8)


def test_critical_point_solves_fucik_problem(E2, phi2, mp2):
    F = functionals(E2)
    for s, res in mp2.items():
        u = res.argmax_state.u
        c = res.c_value
        assert c > phi2.value
        assert is_sign_changing(u, E2)
        assert res.reduced_grad_at_max < 1e-6 * (1 + abs(c))
        assert F.fucik_residual(u, s + c, c) < 1e-5


def test_canonical_path_levels_stay_below_mu(E2, mp2):
    for s, res in mp2.items():
        rep = verify_path_levels(res.argmax_state, s, E2)
        assert rep.ok, rep.violations
        assert rep.u2_bound_max_excess <= 1e-6


def test_canonical_paths_need_sign_change(E2, phi2):
    with pytest.raises(ValueError):
        canonical_paths(phi2.function, E2)


def test_canonical_path_endpoints(E2, mp2):
    u = mp2[0.0].argmax_state.u
    F = functionals(E2)
    u1, u2, u3 = canonical_paths(u, E2)
    assert np.allclose(u1(0.0), F.project(u))
    assert np.allclose(u3(1.0), F.project(-np.maximum(-u, 0)))
    assert np.allclose(u2(0.0), F.project(np.maximum(u, 0)))


def test_sublevel_path_gap_nonpositive(E2, mp2):
    iterates, gap = sublevel_path(mp2[0.5].argmax_state, 0.5, E2, max_iter=50)
    assert len(iterates) > 1
    assert gap <= 1e-10


def test_non_convergence_raises_with_result(E2, path2):
    with pytest.raises(ConvergenceError) as info:
        deform(path2, 0.3, E2, max_iter=2)
    assert info.value.result is not None
    assert not info.value.result.converged
    res = deform(path2, 0.3, E2, max_iter=2, raise_on_fail=False)
    assert not res.converged


def test_snapshot_export(E2, mp2):
    text = mp2[0.0].path.snapshot(E2, 0.0, header_lines=["test"])
    lines = text.splitlines()
    assert lines[0] == "# test"
    assert lines[1] == "index,level,nodal_values"
    rows = lines[2:]
    assert len(rows) == mp2[0.0].path.m
    k, level, vals = rows[5].split(",")
    assert int(k) == 5
    assert len(vals.split()) == E2.N
    assert float(level) == pytest.approx(mp2[0.0].path.levels(E2, 0.0)[5], rel=1e-11)


def test_p3_mountain_pass(E3, phi3):
    path = initial_path(phi3, default_witness(E3), 41, E3)
    res = deform(path, 0.0, E3)
    assert res.converged
    assert res.c_value > phi3.value + 1e-3
    assert is_sign_changing(res.argmax_state.u, E3)
    assert verify_path_levels(res.argmax_state, 0.0, E3).ok
