import pytest
from hypothesis import given, settings, strategies as st

from fracfucik.errors import ConfigError
from fracfucik.records import (DEFAULT_S_GRID, RunConfig, format_record, load_config,
                               parse_config, read_record)


def test_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.s_grid == DEFAULT_S_GRID
    assert cfg.threads == 1


def test_parse_with_comments_and_overrides():
    text = "# run\nalpha = 0.3   # exponent\np = 3\ns_grid = 0, 0.5, 1\nplot = no\n"
    cfg = parse_config(text, {"alpha": "0.35", "seed": None})
    assert cfg.alpha == 0.35
    assert cfg.p == 3.0
    assert cfg.s_grid == (0.0, 0.5, 1.0)
    assert cfg.plot is False
    assert cfg.seed == 0


def test_nonlinearity_params():
    cfg = parse_config("nonlinearity = piecewise_linear\n"
                       "nonlinearity_params = a:1.5, b:1.2, forcing:0.3\n")
    assert cfg.nonlinearity_params == {"a": 1.5, "b": 1.2, "forcing": 0.3}


@pytest.mark.parametrize("text", ["bogus = 1", "alpha 0.3", "resolution = many",
                                  "threads = 0", "plot = maybe",
                                  "nonlinearity_params = a=1"])
def test_bad_config(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_hash_ignores_output_and_order():
    a = parse_config("alpha = 0.3\np = 3\noutput = x")
    b = parse_config("p = 3.0\nalpha = 0.30\noutput = elsewhere")
    c = parse_config("p = 3.0\nalpha = 0.31")
    assert a.sha256() == b.sha256() != c.sha256()
    assert a.header("lambda1")[1] == f"config sha256 {a.sha256()}"


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.01, 0.99), res=st.integers(8, 1000),
       grid=st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=6))
def test_canonical_text_round_trips(alpha, res, grid):
    cfg = RunConfig(alpha=alpha, resolution=res, s_grid=tuple(grid))
    again = parse_config(cfg.canonical())
    assert again == cfg
    assert again.sha256() == cfg.sha256()


def test_record_round_trip():
    text = format_record(["h1"], [("value", 1.5), ("ok", True), ("name", "x")],
                         {"u": [1.0, 2.0]})
    rec = read_record(text)
    assert text.startswith("# h1\n")
    assert float(rec["value"]) == 1.5
    assert rec["ok"] == "true"
    assert [float(t) for t in rec["u"].split()] == [1.0, 2.0]


def test_domain_from_config():
    spec = parse_config("n = 1\nomega_min = 0\nomega_max = 2\nepsilon = 0.2").domain()
    assert spec.omega == (0.0, 2.0)
    assert spec.epsilon == 0.2
