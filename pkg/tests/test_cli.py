import hashlib
import os

import pytest

from fracfucik import __version__
from fracfucik.cli import main
from fracfucik.records import parse_config, read_record


def digest(folder):
    out = {}
    for name in sorted(os.listdir(folder)):
        with open(os.path.join(folder, name), "rb") as fh:
            out[name] = hashlib.sha256(fh.read()).hexdigest()
    return out


def run(tmp_path, *args):
    cfg = tmp_path / "run.cfg"
    if not cfg.exists():
        cfg.write_text("resolution = 33\nseed = 7\ndraws = 500\n")
    return main([*args, "--config", str(cfg)])


def test_lambda1_record(tmp_path):
    out = tmp_path / "a"
    assert run(tmp_path, "lambda1", "-o", str(out)) == 0
    text = (out / "lambda1.txt").read_text()
    lines = text.splitlines()
    cfg = parse_config((tmp_path / "run.cfg").read_text())
    assert lines[0] == f"# fracfucik {__version__} lambda1"
    assert lines[1] == f"# config sha256 {cfg.sha256()}"
    rec = read_record(text)
    assert float(rec["lambda1"]) > 0
    assert float(rec["residual"]) < 1e-8
    assert (out / "lambda1.svg").read_text().startswith("<?xml")


def test_config_error_exit_code(tmp_path, capsys):
    code = run(tmp_path, "lambda1", "-o", str(tmp_path / "b"), "--epsilon", "0.01",
               "--resolution", "20")
    assert code == 1
    assert "too coarse" in capsys.readouterr().err
    assert run(tmp_path, "lambda1", "--set", "nonsense=1") == 1
    assert run(tmp_path, "lambda1", "--set", "novalue") == 1


def test_non_convergence_exit_code(tmp_path):
    code = run(tmp_path, "curve", "-o", str(tmp_path / "c"), "--set", "max_iter=2",
               "--set", "s_grid=0,1,2")
    assert code == 2
    assert "not converged" in (tmp_path / "c" / "properties.txt").read_text()


@pytest.mark.parametrize("command,extra", [
    ("lambda1", []), ("selftest", []), ("bbm", ["--set", "alpha_list=0.9",
                                                "--set", "bbm_resolution=101"]),
    ("steklov", ["--set", "alpha_list=0.9", "--set", "steklov_resolution=101"]),
    ("nonres", []),
    ("curve", ["--set", "s_grid=0,0.5,1,4"]),
])
def test_reruns_are_byte_identical(tmp_path, command, extra):
    a, b = tmp_path / "r1", tmp_path / "r2"
    assert run(tmp_path, command, "-o", str(a), *extra) == 0
    assert run(tmp_path, command, "-o", str(b), *extra) == 0
    da, db = digest(a), digest(b)
    assert da and da == db
    for name in da:
        first = (a / name).read_text().splitlines()
        head = [ln for ln in first[:4] if "config sha256" in ln]
        assert head, f"{name} lacks the config header"


def test_curve_outputs(tmp_path):
    out = tmp_path / "d"
    assert run(tmp_path, "curve", "-o", str(out), "--set", "s_grid=0,0.5,1,4") == 0
    csv = (out / "curve.csv").read_text().splitlines()
    assert "s,c_s,a,b,converged" in csv
    report = (out / "properties.txt").read_text()
    for name in ("above_lambda1", "decreasing", "s_plus_c_increasing", "lipschitz", "tail"):
        assert f"PASS  {name}" in report
    svg = (out / "curve.svg").read_text()
    for tag in ('id="diagonal"', 'id="curve"', 'id="mirror"', 'id="trivial-vertical"'):
        assert tag in svg


def test_selftest_passes(tmp_path):
    assert run(tmp_path, "selftest", "-o", str(tmp_path / "e")) == 0
    assert "failures = 0" in (tmp_path / "e" / "selftest.txt").read_text()


def test_steklov_rejects_p3(tmp_path):
    assert run(tmp_path, "steklov", "--p", "3") == 1
