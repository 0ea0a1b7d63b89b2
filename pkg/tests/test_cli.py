import csv

import numpy as np
import pytest

from fracorlicz import cli
from fracorlicz.geometry import GridFunction, Lattice


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_emit_curves_roundtrip(tmp_path):
    series = [[0.1, 1 / 3, 2], [1e-300, -np.pi, 7]]
    p = cli.emit_curves(series, tmp_path / "c.csv", ["a", "b", "c"])
    raw = p.read_bytes()
    assert raw.count(b"\r\n") == 3
    rows = _rows(p)
    assert rows[0] == ["a", "b", "c"]
    back = np.array([[float(x) for x in r] for r in rows[1:]])
    assert np.array_equal(back, np.array(series, float))


def test_emit_curves_rejects_ragged(tmp_path):
    with pytest.raises(ValueError):
        cli.emit_curves([[1, 2], [3]], tmp_path / "c.csv", ["a", "b"])
    with pytest.raises(ValueError):
        cli.emit_curves([], tmp_path / "c.csv", ["a"])


def test_young_inspect(tmp_path, capsys):
    code = cli.main(["young", "inspect", "--young", "double_phase", "--q", "2", "--p", "3", "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    rows = _rows(tmp_path / "report.csv")
    rec = dict(zip(rows[0], rows[1]))
    assert float(rec["p_minus"]) == pytest.approx(2, abs=1e-2)
    assert float(rec["p_plus"]) == pytest.approx(3, abs=1e-2)
    assert (tmp_path / "report.txt").read_text().startswith("# fracorlicz")


def test_missing_domain_exit_code(tmp_path, capsys):
    code = cli.main(["counterexample", "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "usage" in err and "domain" in err


def test_bad_flag_exit_code(capsys):
    assert cli.main(["counterexample", "--nope"]) == cli.EXIT_CONFIG


def test_bad_young_exit_code(tmp_path):
    assert cli.main(["young", "inspect", "--young", "exp", "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_counterexample_cli(tmp_path):
    args = ["counterexample", "--domain", "box(0,1)+box(2,4)", "--s", "0.5", "--eps", "1/2",
            "--resolution", "256", "--out", str(tmp_path)]
    assert cli.main(args) == cli.EXIT_OK
    rows = _rows(tmp_path / "report.csv")
    assert rows[1][rows[0].index("verdict")] == "PASS"
    assert len(_rows(tmp_path / "curves.csv")) == 2


def test_counterexample_deterministic(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        args = ["counterexample", "--domain", "box(0,1)+box(2,4)", "--eps", "1/2",
                "--resolution", "128", "--threads", str(k + 1), "--out", str(d)]
        cli.main(args)
        outs.append((d / "report.csv").read_bytes())
    assert outs[0] == outs[1]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# two intervals\npiece = box(0,1)\npiece = box(2,4)\ns = 0.9\neps = 1/2\nresolution = 128\n")
    out = tmp_path / "o"
    code = cli.main(["counterexample", "--config", str(cfg), "--s", "0.5", "--out", str(out)])
    assert code == cli.EXIT_OK
    txt = (out / "report.txt").read_text()
    assert "# domain = box(0,1)+box(2,4)" in txt and "# s = 0.5" in txt


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert cli.main(["classify", "--config", str(cfg), "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_classify(tmp_path):
    assert cli.main(["classify", "--s", "0.75", "--out", str(tmp_path)]) == cli.EXIT_OK
    rows = _rows(tmp_path / "report.csv")
    assert rows[1][rows[0].index("holds")] == "true"
    curve = _rows(tmp_path / "curves.csv")
    assert curve[0] == ["lambda", "beta"] and len(curve) > 10


def test_kernel_check(tmp_path):
    assert cli.main(["kernel", "check", "--kernel", "unit_M", "--p-minus", "2", "--dim", "1",
                     "--out", str(tmp_path)]) == cli.EXIT_OK
    rows = _rows(tmp_path / "report.csv")
    rec = dict(zip(rows[0], rows[1]))
    assert rec["m3"] == "false"


def test_rearrange_and_seminorm(tmp_path):
    lat = Lattice.covering([0.0], [1.0], 1 / 32)
    u = GridFunction.sample(lambda X: np.clip(X[..., 0] * (1 - X[..., 0]), 0, None), lat)
    src = tmp_path / "u.csv"
    u.to_csv(src)
    assert cli.main(["rearrange", "--input", str(src), "--out", str(tmp_path / "r")]) == cli.EXIT_OK
    v = GridFunction.from_csv(tmp_path / "r" / "rearranged.csv")
    assert np.array_equal(np.sort(v.values[v.values > 0]), np.sort(u.values[u.values > 0]))
    code = cli.main(["seminorm", "--input", str(src), "--domain", "box(0,1)", "--s", "0.25",
                     "--region", "fullspace", "--out", str(tmp_path / "s")])
    assert code == cli.EXIT_OK
    rows = _rows(tmp_path / "s" / "report.csv")
    assert float(rows[1][0]) > 0


def test_missing_input(tmp_path):
    assert cli.main(["rearrange", "--input", str(tmp_path / "none.csv"), "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_compare_case_fails_is_inconclusive(tmp_path):
    code = cli.main(["compare", "--domain", "box(0,1)", "--s", "0.5", "--out", str(tmp_path)])
    assert code == cli.EXIT_INCONCLUSIVE


def test_compare_default_corpus(tmp_path):
    code = cli.main(["compare", "--domain", "box(0,1)", "--s", "0.75", "--resolution", "64", "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    rows = _rows(tmp_path / "report.csv")
    assert len(rows) == 11
    assert all(np.isfinite(float(r[rows[0].index("rho")])) for r in rows[1:])
