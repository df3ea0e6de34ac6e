import json
import math

import numpy as np
import pytest

from piecewise_pareto import distributions as D
from piecewise_pareto.cli import EXIT_DATA, EXIT_NOFIT, EXIT_OK, EXIT_USAGE, main
from piecewise_pareto.distributions import Family, FamilyParams
from piecewise_pareto.errors import InvalidParams, NonPositiveValue
from piecewise_pareto.report import (dumps, fit_report, format_float, log_histogram, tabulate)
from piecewise_pareto.sample_stats import build_sample, split_at

from conftest import synth


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "x.txt"
    assert main(["sample", "--family", "pow", "--alpha", "2.5", "--beta", "0.5", "--xmin", "3",
                 "--count", "800", "--seed", "1", "--output", str(path)]) == EXIT_OK
    return path


def test_sample_output_is_byte_identical(tmp_path):
    paths = [tmp_path / f"{k}.txt" for k in "ab"]
    for p in paths:
        main(["sample", "--family", "alg", "--alpha", "2", "--beta", "1", "--xmin", "10",
              "--count", "500", "--seed", "9", "--output", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert len(paths[0].read_text().splitlines()) == 500


def test_seventeen_digit_roundtrip():
    rng = np.random.default_rng(0)
    for x in rng.lognormal(0, 20, 200):
        assert float(format_float(x)) == x
    assert json.loads(dumps({"v": math.nan}))["v"] is None


def test_fit_report_json(data_file, tmp_path):
    out = tmp_path / "r.json"
    assert main(["fit", "--input", str(data_file), "--output", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["n"] == 800
    assert [r["family"] for r in doc["results"]] == [f.value for f in Family]
    assert doc["best_family"] == doc["ranking"][0]
    aics = {r["family"]: r["aic"] for r in doc["results"] if "aic" in r}
    assert [aics[f] for f in doc["ranking"]] == sorted(aics[f] for f in doc["ranking"])


def test_report_loglik_reproducible(data_file):
    sample = build_sample(np.loadtxt(data_file))
    rep = fit_report(sample, ["pow", "forced-exp"])
    for e in rep.entries:
        p = e.result.params
        assert e.result.loglik == D.log_likelihood(p, split_at(sample, p.x_min))


def test_pinned_xmin_and_beta_are_marked(data_file, tmp_path):
    out = tmp_path / "r.json"
    assert main(["fit", "--input", str(data_file), "--family", "pow", "--xmin", "3",
                 "--beta", "0.5", "--output", str(out)]) == EXIT_OK
    r = json.loads(out.read_text())["results"][0]
    assert r["pinned_xmin"] and r["pinned_beta"]
    assert r["xmin"] == 3.0 and r["beta"] == 0.5


def test_invalid_beta_exit_code_names_bound(data_file, capsys):
    code = main(["fit", "--input", str(data_file), "--family", "pow", "--beta", "-2"])
    assert code == EXIT_USAGE
    assert "-1" in capsys.readouterr().err


def test_bad_data_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("1.0\n-2.0\n")
    assert main(["fit", "--input", str(path)]) == EXIT_DATA
    path.write_text("1.0\nabc\n")
    assert main(["fit", "--input", str(path)]) == EXIT_DATA
    assert main(["fit", "--input", str(tmp_path / "missing.txt")]) == EXIT_DATA


def test_no_valid_fit_exit_code(data_file):
    big = float(np.loadtxt(data_file).max()) * 10
    assert main(["fit", "--input", str(data_file), "--family", "uni", "--xmin", str(big)]) == EXIT_NOFIT


def test_santafe_cli(tmp_path):
    deg = tmp_path / "k.txt"
    deg.write_text("5\n5\n5\n")
    out = tmp_path / "s.json"
    assert main(["santafe", "--input", str(deg), "--N", "1000", "--output", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["rho_hat"] == 0 and doc["loglik"] is None
    deg.write_text("0\n5\n")
    assert main(["santafe", "--input", str(deg), "--N", "1000"]) == EXIT_DATA


def test_tabulate_spacing_and_pdf_at_xmin():
    p = FamilyParams("exp", 2.0, 1.0, 4.0)
    x, dens, cum = tabulate(p, 100.0, 50, "linear")
    assert x[0] == 0 and np.allclose(np.diff(x), x[1])
    assert np.all(np.diff(cum) >= 0)
    x, dens, cum = tabulate(p, 100.0, 50, "log")
    assert x[0] == pytest.approx(4e-3) and np.allclose(np.diff(np.log(x)), np.log(x[1] / x[0]))
    assert float(D.pdf(p, 4.0)) == pytest.approx(D.normalization(p), rel=1e-14)
    _, dens, _ = tabulate(FamilyParams("pow", 2.0, -0.5, 1.0), 5.0, 10, "linear")
    assert dens[0] == math.inf
    with pytest.raises(InvalidParams):
        tabulate(p, 100.0, 1)


def test_tabulate_cli_header(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["tabulate", "--family", "uni", "--alpha", "2", "--xmin", "1", "--xmax", "10",
                 "--points", "5", "--output", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "x,pdf,cdf" and len(lines) == 6


def test_histogram():
    c, d, w = log_histogram([3.0, 3.0, 3.0], 10)
    assert len(c) == 1 and d[0] * w[0] == pytest.approx(1.0)
    xs = synth("uni", 2.0, None, 5000, 3, x_min=1.0).values
    c, d, w = log_histogram(xs, 5)
    assert np.sum(d * w) == pytest.approx(1.0, rel=1e-12)
    c, _, _ = log_histogram(np.geomspace(1, 9.99, 100), 10)
    assert len(c) <= 11
    with pytest.raises(NonPositiveValue):
        log_histogram([1.0, 0.0], 10)
    with pytest.raises(InvalidParams):
        log_histogram([1.0], 0)


def test_uni_data_prefers_uni_or_pow():
    wins = 0
    for seed in range(20):
        s = synth("uni", 2.0, None, 2000, 500 + seed)
        best = fit_report(s, ["uni", "pow", "exp", "forced-pow", "forced-exp"]).best_family
        wins += best in (Family.UNI, Family.POW)
    assert wins >= 16, wins
