import math
import shutil
import subprocess

import numpy as np
import pytest

from heatlab import cli
from heatlab.fixtures import bumped_steady
from heatlab.io import (SvgCanvas, config_from_kv, config_to_kv, ellipse_points, fmt, read_csv,
                        read_field_csv, read_kv, read_profile_csv, write_csv, write_field_csv,
                        write_kv, write_profile_csv)
from heatlab.pde_solver import SolverConfig, steady_state
from heatlab.profiles import MeridianField


# formats

def test_fmt_examples():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(True) == "true" and fmt(3) == "3"
    assert fmt((1.0, 0.5)) == "1,0.5"
    assert fmt("abc") == "abc"


def test_csv_roundtrip_is_exact(tmp_path):
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=50), rng.uniform(-1e-300, 1e300, 50)
    p = write_csv(tmp_path / "t.csv", ["a", "b"], [a, b])
    header, data = read_csv(p)
    assert header == ["a", "b"]
    np.testing.assert_array_equal(data[:, 0], a)
    np.testing.assert_array_equal(data[:, 1], b)
    raw = p.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", ["a", "b"], [a, b[:3]])


def test_kv_and_config_roundtrip(tmp_path):
    cfg = SolverConfig(scheme="backward", dt=1e-3, nr=65, ntheta=9, t_final=0.5,
                       snapshots=(0.1, 0.25))
    p = write_kv(tmp_path / "cfg.txt", config_to_kv(cfg))
    back = config_from_kv(read_kv(p))
    assert config_to_kv(back) == config_to_kv(cfg)
    with pytest.raises(ValueError):
        config_from_kv({"nr": "65", "colour": "red"})


def test_read_kv_rejects_garbage(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("# comment\n\na=1\nnot a pair\n")
    with pytest.raises(ValueError):
        read_kv(p)


def test_profile_csv_roundtrip(tmp_path):
    u = steady_state(2)
    p = write_profile_csv(tmp_path / "p.csv", u, num=33)
    back = read_profile_csv(p, 2)
    np.testing.assert_array_equal(back.values, u(back.r))
    assert back.domain.r_in == 1.0 and back.domain.r_out == 2.0


def test_field_csv_roundtrip(tmp_path):
    f = MeridianField.from_radial(steady_state(3), 17, 9)
    back = read_field_csv(write_field_csv(tmp_path / "f.csv", f), 3)
    np.testing.assert_array_equal(back.values, f.values)
    np.testing.assert_allclose(back.r, f.r, rtol=1e-15)
    np.testing.assert_allclose(back.theta, f.theta, atol=1e-15)


def test_svg_content(tmp_path):
    svg = SvgCanvas((-2, 2), (-2, 2))
    x, y = ellipse_points(0.8, 1.5)
    assert np.hypot(0.8 * x, y).max() == pytest.approx(1.5)
    svg.polyline(x, y, dash="4,3")
    svg.marker(0.0, 1.5, "X")
    svg.axes()
    text = svg.to_string()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert "<polyline" in text and ">X<" in text and "stroke-dasharray" in text
    assert svg.save(tmp_path / "a.svg").read_text() == text


# CLI

def manifest(d):
    return read_kv(d / "manifest.txt")


def test_cli_build_V_passes_and_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["build", "V", "--out", str(a)]) == 0
    assert cli.main(["build", "V", "--out", str(b)]) == 0
    assert (a / "profile.csv").read_bytes() == (b / "profile.csv").read_bytes()
    m = manifest(a)
    assert m["verdict"] == "pass" and m["command"] == "build V"
    assert read_kv(a / "report.txt")["pass"] == "true"
    assert len(list(a.glob("manifest*"))) == 1


def test_cli_usage_errors_write_nothing(tmp_path):
    out = tmp_path / "x"
    assert cli.main(["build", "V", "--rho", "0.9", "--out", str(out)]) == 2
    assert not out.exists()
    assert cli.main(["verify", "thm2", "--out", str(out)]) == 2
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["evolve", "--out", str(out)]) == 2
    assert cli.main(["evolve", "--input", str(tmp_path / "missing.csv"), "--out", str(out)]) == 2
    assert not out.exists()


def test_cli_evolve_built_profile(tmp_path):
    b, e = tmp_path / "b", tmp_path / "e"
    assert cli.main(["build", "V", "--out", str(b)]) == 0
    code = cli.main(["evolve", "--input", str(b / "profile.csv"), "--t_final", "0.2",
                     "--snapshots", "0.05,0.1", "--out", str(e)])
    assert code == 0
    header, idx = read_csv(e / "snapshots" / "index.csv")
    assert header == ["snapshot_id", "t"]
    np.testing.assert_allclose(idx[:, 1], [0.0, 0.05, 0.1, 0.2])
    assert read_kv(e / "monitor.txt")["violations"] == "0"
    assert manifest(e)["input.0"].endswith("profile.csv")


def test_cli_evolve_warns_on_large_step(tmp_path):
    e = tmp_path / "e"
    cli.main(["evolve", "--fixture", "steady", "--dt", "0.1", "--startup_steps", "0",
              "--t_final", "0.5", "--nr", "65", "--out", str(e)])
    assert any(k.startswith("warning.") for k in manifest(e))


def test_cli_decay_lemma_inapplicable(tmp_path):
    src = write_profile_csv(tmp_path / "bump.csv", bumped_steady(2), num=129)
    out = tmp_path / "v"
    assert cli.main(["verify", "decay-lemma", "--input", str(src), "--out", str(out)]) == 3
    m = manifest(out)
    assert m["verdict"] == "inapplicable" and "Delta f" in m["detail.reason"]


def test_cli_decay_lemma_on_steady_profile(tmp_path):
    src = write_profile_csv(tmp_path / "steady.csv", steady_state(2), num=129)
    out = tmp_path / "v"
    assert cli.main(["verify", "decay-lemma", "--input", str(src), "--out", str(out)]) == 0
    lines = (out / "decay_lattice.csv").read_text().splitlines()
    assert lines[0] == "fixture,t,r0,r1,sigma,f_r0,f_r1,slack,pass"
    assert len(lines) == 1 + 45 * 20


def test_cli_converge_steady(tmp_path):
    out = tmp_path / "c"
    assert cli.main(["converge", "--fixture", "steady", "--grids", "33,65", "--out", str(out)]) == 0
    header, data = read_csv(out / "convergence.csv")
    assert header == ["N", "error", "order"] and data.shape == (2, 3)
    assert math.isnan(data[0, 2])


def test_cli_evolve_fails_monitors(tmp_path):
    src = write_profile_csv(tmp_path / "bump.csv", bumped_steady(2), num=129)
    out = tmp_path / "e"
    code = cli.main(["evolve", "--input", str(src), "--t_final", "0.05", "--out", str(out)])
    assert code == 1
    assert manifest(out)["verdict"] == "fail"
    assert int(read_kv(out / "monitor.txt")["violations"]) > 0


def test_cli_rejects_bad_grids(tmp_path):
    assert cli.main(["converge", "--grids", "a,b", "--out", str(tmp_path / "c")]) == 2


@pytest.mark.skipif(shutil.which("heatlab") is None, reason="console script not installed")
def test_console_script_exit_codes(tmp_path):
    assert subprocess.run(["heatlab", "verify", "sec4"], capture_output=True).returncode == 2
    done = subprocess.run(["heatlab", "build", "V", "--out", str(tmp_path / "b")], capture_output=True)
    assert done.returncode == 0 and b"pass" in done.stdout
