import csv
import io
import json
import math
import subprocess
import sys

import pytest

from leviflat.cli import main, parse_complex, parse_range
from leviflat.geometry import read_pgm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_helpers():
    assert parse_complex("0.5i") == 0.5j
    assert parse_complex("i") == 1j
    assert parse_complex("-2") == -2
    assert parse_complex("1+2i") == 1 + 2j
    assert parse_range("-5..5") == (-5.0, 5.0)


def test_components_assert_paper(capsys):
    code, out, _ = run(capsys, "components", "--n", "3", "--eps", "0.05", "--res", "1600", "--assert-paper")
    assert code == 0
    (r,) = rows(out)
    assert r["components"] == "3" and r["grid_t"] == "1600"
    assert out.splitlines()[0] == "n,eps,delta,grid_t,grid_theta,components"


def test_components_assert_paper_failure(capsys):
    # eps far above the threshold: the lobes merge through t < delta
    code, out, err = run(capsys, "components", "--n", "3", "--eps", "10", "--res", "400", "--assert-paper")
    assert code == 2 and rows(out)[0]["components"] == "1"
    assert "assertion" in err


def test_components_tiny_eps(capsys):
    code, out, _ = run(capsys, "components", "--n", "1", "--eps", "1e-300")
    assert code == 0
    # the region is not empty: near theta = pi/2 it holds for t below about 0.038
    assert rows(out)[0]["components"] == "1"


def test_components_sweep(capsys):
    code, out, _ = run(capsys, "components", "--n", "2", "--eps", "0.05", "--sweep-eps", "0.02,0.05,0.1")
    assert code == 0
    got = rows(out)
    assert [r["eps"] for r in got] == ["0.02", "0.050000000000000003", "0.10000000000000001"]
    assert all(r["components"] == "2" for r in got)


def test_components_pgm(tmp_path, capsys):
    prefix = str(tmp_path / "run_")
    code, _, _ = run(capsys, "components", "--n", "2", "--res", "200", "--pgm", "--out", prefix)
    assert code == 0
    comments, pix = read_pgm(tmp_path / "run_mask_n2_eps0.050000000000000003.pgm")
    assert pix.shape == (200, 200) and comments[0].startswith("n=2 eps=0.05")
    assert (tmp_path / "run_components.csv").read_bytes().endswith(b",2\n")


def test_region_mask(tmp_path, capsys):
    prefix = str(tmp_path / "r_")
    assert run(capsys, "region-mask", "--n", "3", "--res", "300", "--labels", "--svg", "--out", prefix)[0] == 0
    _, pix = read_pgm(tmp_path / "r_region_n3_eps0.050000000000000003.pgm")
    assert len(set(pix.ravel().tolist()) - {0}) == 3
    svg = (tmp_path / "r_region_n3_eps0.050000000000000003.svg").read_text()
    assert svg.count("<line") == 9 and "beta_2" in svg
    assert run(capsys, "region-mask", "--n", "3")[0] == 64


def test_plemelj_presets(capsys):
    code, out, err = run(capsys, "plemelj", "--preset", "circle-poly", "--nodes", "4096")
    assert code == 0
    res = [float(r["residual"]) for r in rows(out)]
    assert len(res) == 32 and max(res) <= 1e-8
    assert "max_residual=" in err
    code, out, _ = run(capsys, "plemelj", "--preset", "zero")
    assert code == 0 and all(float(r["residual"]) == 0 for r in rows(out))
    code, out, _ = run(capsys, "plemelj", "--preset", "arc-bump", "--nodes", "8192", "--tol", "1e-6")
    assert code == 0
    assert all(abs(float(r["param"])) <= 0.4 for r in rows(out))


def test_plemelj_tol_and_convergence_table(tmp_path, capsys):
    prefix = str(tmp_path / "p_")
    code, out, _ = run(capsys, "plemelj", "--preset", "circle-exp", "--nodes", "128", "--tol", "1e-12", "--out", prefix)
    assert code == 2
    conv = rows((tmp_path / "p_plemelj_circle-exp_convergence.csv").read_text())
    assert [r["nodes"] for r in conv] == ["64", "128"]
    assert float(conv[1]["max_residual"]) * 10 <= float(conv[0]["max_residual"])


def test_series_radius(capsys):
    code, out, err = run(capsys, "series", "--family", "a", "--at", "0.5i", "--N", "12")
    assert code == 0
    last = [l for l in err.splitlines() if "N=12 " in l][0]
    assert float(last.split("radius_estimate=")[1]) <= 2 ** -11
    assert len(rows(out)) == 12


def test_series_bounds(capsys):
    code, out, err = run(capsys, "series", "--family", "b", "--real-axis", "-5..5", "--check-bounds")
    assert code == 0 and "bound_violations=0" in err
    assert len(rows(out)) == 12 * 1001


def test_series_strong_bound_and_growth(capsys):
    code, _, err = run(capsys, "series", "--family", "b", "--imag-axis", "0.1..0.9", "--samples", "9",
                       "--N", "6", "--W", "0.5i,0.25i")
    assert code == 0
    assert "strong_lower_bound held=54 checked=54" in err
    code, _, err = run(capsys, "series", "--family", "a", "--N", "8", "--W", "0.5i,0.25i,0.3")
    assert "trend=diverging" in err
    assert float(err.split("C_estimate=")[1].split()[0]) == pytest.approx(256.0, rel=1e-12)


def test_series_singular_point(capsys):
    code, _, err = run(capsys, "series", "--family", "a", "--at", "i")
    assert code == 65 and "domain error" in err


def test_morera(capsys):
    code, out, _ = run(capsys, "morera", "--function", "conj", "--radius", "1")
    assert code == 0
    assert float(rows(out)[0]["loop_integral"]) == pytest.approx(2 * math.pi, rel=1e-12)
    code, out, _ = run(capsys, "morera", "--function", "pole2", "--radius", "2")
    assert code == 65


@pytest.mark.parametrize("argv", [
    ["components", "--bogus"],
    ["components", "--n", "0"],
    ["components", "--eps", "-1"],
    ["plemelj", "--nodes", "4"],
    ["nosuch"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 64 and "usage" in err


def test_json_config_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": [2, 3], "eps": 0.05, "res": 300}))
    code, out, _ = run(capsys, "components", "--config", str(cfg))
    assert code == 0 and [r["n"] for r in rows(out)] == ["2", "3"]
    assert rows(out)[0]["grid_t"] == "300"
    code, out, _ = run(capsys, "components", "--config", str(cfg), "--n", "4", "--res", "320")
    assert [(r["n"], r["grid_t"], r["components"]) for r in rows(out)] == [("4", "320", "4")]
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run(capsys, "components", "--config", str(cfg))[0] == 64
    assert run(capsys, "components", "--config", str(tmp_path / "missing.json"))[0] == 64


def test_deterministic_bytes(tmp_path, capsys):
    outs = []
    for k in range(2):
        prefix = str(tmp_path / f"d{k}_")
        assert run(capsys, "components", "--n", "4", "--eps", "0.05", "--res", "400", "--pgm", "--out", prefix)[0] == 0
        outs.append([(tmp_path / f"d{k}_{name}").read_bytes()
                     for name in ("components.csv", "mask_n4_eps0.050000000000000003.pgm")])
    assert outs[0] == outs[1]
    assert b"\r" not in outs[0][0]


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "leviflat", "morera", "--function", "square"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("function,radius,nodes,loop_integral\n")
