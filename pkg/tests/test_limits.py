import math

import numpy as np
import pytest

from fracfucik.domain import DomainSpec, build_mesh
from fracfucik.errors import ConfigError
from fracfucik.limits import (TABLE_COLUMNS, bbm_csv, bbm_linear_closed_form, bbm_table,
                              default_resolution, eigen_limit_study, extension_ratio,
                              steklov_exact_1d, steklov_quotient, table_csv)


def test_steklov_oracle():
    t1, t2 = steklov_exact_1d()
    assert t1 == pytest.approx(0.761594155955765)
    assert t2 == pytest.approx(1.313035285499331)
    with pytest.raises(ConfigError):
        steklov_exact_1d(p=3.0)
    with pytest.raises(ConfigError):
        steklov_exact_1d(omega=(0.0, 1.0))


def test_steklov_quotient_of_the_eigenfunctions():
    spec = DomainSpec(n=1, omega=(-1.0, 1.0), epsilon=0.25, alpha=0.3)
    mesh = build_mesh(spec, 801)
    x = mesh.nodes[:, 0]
    assert steklov_quotient(mesh, np.cosh(x)) == pytest.approx(math.tanh(1.0), rel=1e-5)
    assert steklov_quotient(mesh, np.sinh(x)) == pytest.approx(1.0 / math.tanh(1.0), rel=1e-5)


def test_default_resolution():
    assert default_resolution(0.9) == 201
    assert default_resolution(0.95) == 401
    assert default_resolution(0.99) == 2001


def test_extension_ratio_approaches_steklov_quotient():
    r90 = extension_ratio(np.cosh, 0.9)
    r95 = extension_ratio(np.cosh, 0.95)
    target = math.tanh(1.0)
    assert abs(r95 - target) < abs(r90 - target)
    assert r95 == pytest.approx(target, rel=0.05)


def test_extension_ratio_is_scale_invariant():
    a = extension_ratio(np.cosh, 0.9)
    b = extension_ratio(lambda x: 3.0 * np.cosh(x), 0.9)
    assert a == pytest.approx(b, rel=1e-12)


def test_extension_ratio_collar_coarser_than_mesh():
    with pytest.raises(ConfigError):
        extension_ratio(np.cosh, 0.95, resolution=11)


def test_limit_table_format():
    rows = eigen_limit_study([0.9], resolution=101)
    text = table_csv(rows, ["h"])
    lines = text.splitlines()
    assert lines[0] == "# h"
    assert lines[1] == ",".join(TABLE_COLUMNS)
    assert len(lines) == 3
    r = rows[0]
    assert r.lambda1 < r.lambda2
    assert r.lambda1_err == pytest.approx(abs(r.lambda1 - r.lambda1_target) / r.lambda1_target)


def test_bbm_closed_form_limit():
    # the closed form tends to int |u'|^2 = 2 as alpha -> 1
    assert bbm_linear_closed_form(0.9999) == pytest.approx(2.0, rel=1e-3)
    rows = bbm_table([0.9, 0.99], resolution=101)
    assert rows[1][5] < rows[0][5]
    assert "alpha,scaled_energy" in bbm_csv(rows)
