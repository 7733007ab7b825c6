import json

import numpy as np
import pytest

from ptspec import cli, report
from ptspec.potentials import Model, PotentialSpec
from ptspec.trace import Method, SweepConfig, locate_eps, sweep

from test_shooting import SQUARE_WELL_20

RECT_SWEEP = ["sweep", "--potential", "rect", "--v1", "40", "--method", "analytic",
              "--v2-max", "8", "--steps", "200", "--reproducible"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_square_well(capsys):
    code, out, _ = run(["spectrum", "--potential", "rect", "--v1", "20", "--v2", "0", "--a", "2",
                        "--method", "analytic"], capsys)
    assert code == 0
    payload = json.loads(out)
    np.testing.assert_allclose(payload["eigenvalues"], SQUARE_WELL_20, atol=1e-8)
    assert payload["method"] == "analytic"
    assert payload["manifest"]["spec"]["model"] == "rect"


def test_spectrum_empty_is_ok(capsys):
    code, out, _ = run(["spectrum", "--potential", "gaussian", "--v1", "50", "--v2", "70",
                        "--method", "shooting"], capsys)
    assert code == 0
    assert json.loads(out)["eigenvalues"] == []


def test_method_mismatch_exit_code(capsys):
    code, _, err = run(["spectrum", "--potential", "rect", "--v1", "20", "--v2", "3",
                        "--method", "wc-pencil"], capsys)
    assert code == 2
    assert "wc-pencil" in err


@pytest.mark.parametrize("argv", [
    ["spectrum", "--potential", "parabola", "--v1", "1", "--v2", "0"],
    ["spectrum", "--potential", "rect", "--v1", "-3", "--v2", "0"],
    ["sweep", "--potential", "rect", "--v1", "20", "--v2-max", "1"],
    [],
])
def test_usage_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 2


def test_nonconvergence_exit_code(monkeypatch, capsys):
    from ptspec import hobasis
    from ptspec._common import NonConvergenceError

    def broken(*a, **k):
        raise NonConvergenceError("forced")

    monkeypatch.setattr(hobasis, "_solve_wc", broken)
    code, _, err = run(["spectrum", "--potential", "wigner-coulomb", "--v1", "20", "--v2", "3",
                        "--method", "wc-pencil"], capsys)
    assert code == 3 and "forced" in err


def test_sweep_outputs(tmp_path, capsys):
    paths = [tmp_path / n for n in ("c.csv", "e.json", "p.svg")]
    argv = RECT_SWEEP + ["--out-csv", str(paths[0]), "--out-json", str(paths[1]), "--out-svg", str(paths[2])]
    code, _, _ = run(argv, capsys)
    assert code == 0
    lines = paths[0].read_text().splitlines()
    assert lines[0] == "v2,branch_label,energy"
    rows = [tuple(float(x) for x in ln.split(",")) for ln in lines[1:]]
    assert rows == sorted(rows, key=lambda r: (r[0], r[1]))
    payload = json.loads(paths[1].read_text())
    v2c = [ep["v2c"] for ep in payload["eps"]]
    np.testing.assert_allclose(v2c, [0.9608, 2.7528, 4.8813, 7.2328], atol=2e-3)
    assert payload["crossings"] == []
    assert "timestamp" not in payload["manifest"]
    svg = paths[2].read_text()
    assert 'width="900" height="700"' in svg
    assert svg.count("<polyline") == 9 and svg.count("<circle") == 4
    assert (tmp_path / "c.csv.manifest.json").exists()


def test_sweep_is_byte_reproducible(tmp_path, capsys):
    outs = []
    for _ in range(2):
        argv = RECT_SWEEP + ["--out-csv", str(tmp_path / "c.csv"), "--out-json", str(tmp_path / "e.json"),
                             "--out-svg", str(tmp_path / "p.svg")]
        assert run(argv, capsys)[0] == 0
        outs.append([(tmp_path / n).read_bytes() for n in ("c.csv", "e.json", "p.svg")])
    assert outs[0] == outs[1]


def test_timestamp_only_in_svg_without_reproducible(tmp_path, capsys):
    argv = [a for a in RECT_SWEEP if a != "--reproducible"] + [
        "--out-csv", str(tmp_path / "c.csv"), "--out-json", str(tmp_path / "e.json"),
        "--out-svg", str(tmp_path / "p.svg")]
    assert run(argv, capsys)[0] == 0
    assert '"timestamp": null' not in (tmp_path / "p.svg").read_text()
    assert '"timestamp"' not in (tmp_path / "e.json").read_text()


def test_zero_length_range(tmp_path, capsys):
    argv = ["sweep", "--potential", "rect", "--v1", "40", "--method", "analytic", "--v2-min", "0",
            "--v2-max", "0", "--out-csv", str(tmp_path / "c.csv"), "--out-json", str(tmp_path / "e.json")]
    assert run(argv, capsys)[0] == 0
    v2 = {ln.split(",")[0] for ln in (tmp_path / "c.csv").read_text().splitlines()[1:]}
    assert v2 == {"0"}


def test_unwritable_output(tmp_path, capsys):
    argv = RECT_SWEEP + ["--out-csv", str(tmp_path / "missing" / "c.csv"), "--out-json", str(tmp_path / "e.json")]
    code, _, err = run(argv, capsys)
    assert code != 0 and "cannot write" in err


def test_eps_and_crossings_commands(capsys):
    base = ["--potential", "rect", "--v1", "40", "--method", "analytic", "--v2-max", "8", "--steps", "200"]
    code, out, _ = run(["eps", *base], capsys)
    assert code == 0 and len(json.loads(out)["eps"]) == 4
    code, out, _ = run(["crossings", *base], capsys)
    assert code == 0 and json.loads(out)["crossings"] == []


def test_rect_shooting_and_analytic_agree(capsys):
    base = ["--potential", "rect", "--v1", "40", "--v2-max", "8", "--steps", "100"]
    eps = {}
    for method in ("analytic", "shooting"):
        code, out, _ = run(["eps", *base, "--method", method], capsys)
        assert code == 0
        eps[method] = [e["v2c"] for e in json.loads(out)["eps"] if e["kind"] == "coalescence"]
    np.testing.assert_allclose(eps["shooting"], eps["analytic"], atol=2e-3)


def test_twelve_significant_digits():
    assert report.fmt(1 / 3) == "0.333333333333"
    assert report.rounded({"a": [np.float64(2 / 3)], "b": np.nan}) == {"a": [0.666666666667], "b": None}


def test_svg_handles_empty_curves():
    spec = PotentialSpec(Model.GAUSSIAN, 50.0)
    cfg = SweepConfig(70.0, 71.0, 2, Method.HO_BASIS)
    curves = sweep(spec, cfg)
    svg = report.curves_svg(curves, locate_eps(spec, curves, cfg), report.RunManifest.create("t", {}))
    assert svg.startswith("<svg") and "<polyline" not in svg
