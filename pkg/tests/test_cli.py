import json

import numpy as np
import pytest

from qpencil import io
from qpencil.cli import compare_fft_rows, main
from qpencil.signal import SignalModel, sample


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def three_pole(tmp_path):
    m = SignalModel([-0.1 + 0.5j, -0.05 - 1.2j, -0.2 + 2j], [1, 0.7j, 1.5], 1.0, 32)
    io.write_signal(tmp_path / "s.csv", sample(m))
    io.write_model(tmp_path / "m.json", m)
    return tmp_path


def test_generate_constant(capsys):
    code, out, _ = run(capsys, "generate", "--poles", "0", "--coeffs", "1", "--n", "4")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "index,t,re,im" and len(rows) == 5
    assert all(r.split(",")[2:] == ["1.0", "0.0"] for r in rows[1:])


def test_generate_model_roundtrip(tmp_path, capsys):
    m = SignalModel([-0.3 + 1j, -0.1 - 0.4j], [2, 1j], 0.5, 64)
    io.write_model(tmp_path / "in.json", m)
    code, _, _ = run(capsys, "generate", "--model", tmp_path / "in.json",
                     "--model-out", tmp_path / "out.json", "-o", tmp_path / "s.csv")
    assert code == 0
    assert io.read_model(tmp_path / "out.json") == m
    code, out, _ = run(capsys, "estimate", tmp_path / "s.csv", "--truth", tmp_path / "in.json")
    assert json.loads(out)["truth_check"]["pole_error"] < 1e-8


def test_generate_invalid_model(capsys):
    code, _, err = run(capsys, "generate", "--poles=0.1", "--coeffs", "1", "--n", "4")
    assert code == 2
    assert err.startswith("error: contract:") and "growing" in err
    assert err.count("\n") == 1


def test_estimate_ones(tmp_path, capsys):
    io.write_signal(tmp_path / "ones.csv", sample(SignalModel([0], [1], 1, 8)))
    code, out, _ = run(capsys, "estimate", tmp_path / "ones.csv")
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["poles"][0]["re"]) < 1e-12 and abs(rep["poles"][0]["im"]) < 1e-12
    assert rep["coeffs"][0]["re"] == pytest.approx(1)
    assert rep["config"]["command"] == "estimate"


def test_estimate_truth_and_rank_error(three_pole, capsys):
    code, out, _ = run(capsys, "estimate", three_pole / "s.csv", "--truth", three_pole / "m.json")
    assert code == 0 and json.loads(out)["truth_check"]["pole_error"] < 1e-6
    code, _, err = run(capsys, "estimate", three_pole / "s.csv", "--rank", "p=17")
    assert code == 2 and "rank_deficient" in err


def test_qestimate_matches_estimate(tmp_path, capsys):
    io.write_signal(tmp_path / "s.csv", sample(SignalModel([-0.2 + 0.9j], [1.3], 1, 16)))
    _, a, _ = run(capsys, "estimate", tmp_path / "s.csv")
    code, b, _ = run(capsys, "qestimate", tmp_path / "s.csv")
    assert code == 0
    pa, pb = json.loads(a)["poles"][0], json.loads(b)["poles"][0]
    assert abs(pa["re"] - pb["re"]) < 1e-8 and abs(pa["im"] - pb["im"]) < 1e-8
    rep = json.loads(b)
    assert rep["mode"] == "exact" and "gauge_factor" in rep


def test_qestimate_shots_byte_identical(three_pole, capsys):
    args = ["qestimate", three_pole / "s.csv", "--mode", "shots", "--shots", "20000",
            "--seed", "3", "-o", three_pole / "q.json"]
    assert run(capsys, *args)[0] == 0
    first = (three_pole / "q.json").read_bytes()
    assert run(capsys, *args)[0] == 0
    assert (three_pole / "q.json").read_bytes() == first


def test_qestimate_cap(tmp_path, capsys):
    io.write_signal(tmp_path / "big.csv", sample(SignalModel([0], [1], 1, 80)))
    code, _, err = run(capsys, "qestimate", tmp_path / "big.csv")
    assert code == 2 and "capped at 64" in err


def test_qestimate_numerical_exit(tmp_path, capsys):
    io.write_signal(tmp_path / "s.csv", sample(SignalModel([0.7j], [1], 1, 16)))
    code, _, err = run(capsys, "qestimate", tmp_path / "s.csv")
    assert code == 3 and err.startswith("error: ambiguous")


def test_compare_fft_well_separated(three_pole, capsys):
    code, out, _ = run(capsys, "compare-fft", three_pole / "s.csv", "--truth", three_pole / "m.json")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "method,index,frequency,damping,magnitude,resolved"
    assert all(line.endswith("true") for line in lines[1:])


def test_compare_fft_sub_resolution():
    n = 64
    gap = 0.25 * 2 * np.pi / n
    m = SignalModel([-0.2 + 1j, -0.2 + 1j + 1j * gap], [1, 1], 1, n)
    rows = compare_fft_rows(sample(m), truth=m)
    verdict = {method: ok for method, *_, ok in rows}
    assert verdict == {"mpm": True, "dft": False}


def test_compare_fft_empty(tmp_path, capsys):
    (tmp_path / "e.csv").write_text("index,t,re,im\n")
    code, _, _ = run(capsys, "compare-fft", tmp_path / "e.csv")
    assert code == 2


def test_diagnose(three_pole, capsys):
    code, out, _ = run(capsys, "diagnose", three_pole / "s.csv", "--perturbation", "0")
    d = json.loads(out)
    assert code == 0
    assert d["bauer_fike"]["bound"] == 0.0
    assert d["qpca"]["max_abs_error"] < 1e-10
    assert d["berry"]["f1"]["conditions"]["lambda_le_lambda_one"]


def test_config_file_and_unknown_keys(three_pole, capsys):
    cfg = three_pole / "c.json"
    cfg.write_text(json.dumps({"input": str(three_pole / "s.csv"), "rank": "p=3"}))
    code, out, _ = run(capsys, "estimate", "--config", cfg)
    assert code == 0 and json.loads(out)["effective_rank"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(capsys, "estimate", "--config", cfg)
    assert code == 2 and "bogus" in err


def test_missing_input(capsys, tmp_path):
    code, _, err = run(capsys, "estimate", tmp_path / "nope.csv")
    assert code == 2 and "does not exist" in err
