import csv
import json
import os

import pytest
import yaml

from kernelcurves.cli import main


def base_config(tmp_path, **overrides):
    cfg = {
        "seed": 0,
        "output_dir": str(tmp_path / "runs"),
        "data": {"synthetic": {"d": 6, "decay_exponent": 3.0}},
        "kernel": {"family": "gaussian", "parameters": {"sigma": 4.0}},
        "hea": {"P": 60, "L": 4},
        "target": {"kind": "hermite", "mode": {"0": 1}, "P": 20, "N": 300},
        "eigenframework": {"ridge": 1e-3, "n_grid": [8, 16, 32]},
        "empirical": {"trials": 2, "test_size": 50},
        "check": {"N": 200, "top_modes": 20},
        "failure_modes": {"widths": [4.0, 1.0], "N": 300, "top_bins": 2},
    }
    for key, val in overrides.items():
        if isinstance(val, dict):
            cfg.setdefault(key, {}).update(val)
        else:
            cfg[key] = val
    return cfg


def write_config(tmp_path, cfg, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    return code, out[-1] if out else ""


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_predict_curve_outputs(tmp_path, capsys):
    cfg_path = write_config(tmp_path, base_config(tmp_path))
    code, out_dir = run(capsys, "predict-curve", "--config", cfg_path)
    assert code == 0
    rows = read_rows(os.path.join(out_dir, "learning_curve.csv"))
    assert rows[0] == ["n", "kappa", "e0", "bias", "test_risk", "train_risk"]
    assert len(rows) == 4
    risks = [float(r[4]) for r in rows[1:]]
    assert risks == sorted(risks, reverse=True)
    dec = json.loads(open(os.path.join(out_dir, "decomposition.json")).read())
    assert dec["method"] == "gram_schmidt"
    summary = json.loads(open(os.path.join(out_dir, "summary.json")).read())
    assert summary["kernel"]["family"] == "gaussian"


def test_reruns_are_byte_identical(tmp_path, capsys):
    cfg_path = write_config(tmp_path, base_config(tmp_path))
    _, out_dir = run(capsys, "predict-curve", "--config", cfg_path)
    first = open(os.path.join(out_dir, "learning_curve.csv"), "rb").read()
    code, out_dir2 = run(capsys, "predict-curve", "--config", cfg_path)
    assert code == 0 and out_dir2 == out_dir
    assert open(os.path.join(out_dir, "learning_curve.csv"), "rb").read() == first


def test_seed_override_changes_run_dir(tmp_path, capsys):
    cfg_path = write_config(tmp_path, base_config(tmp_path))
    _, dir_a = run(capsys, "predict-curve", "--config", cfg_path)
    code, dir_b = run(capsys, "predict-curve", "--config", cfg_path, "--seed", "1")
    assert code == 0
    assert dir_a != dir_b


def test_empirical_curve(tmp_path, capsys):
    cfg_path = write_config(tmp_path, base_config(tmp_path))
    code, out_dir = run(capsys, "empirical-curve", "--config", cfg_path)
    assert code == 0
    rows = read_rows(os.path.join(out_dir, "empirical_curve.csv"))
    assert rows[0] == ["n", "mse_mean", "mse_stderr", "trials"]
    assert [r[0] for r in rows[1:]] == ["8", "16", "32"]


def test_check_hea(tmp_path, capsys):
    cfg_path = write_config(tmp_path, base_config(tmp_path))
    code, out_dir = run(capsys, "check-hea", "--config", cfg_path)
    assert code == 0
    overlap = json.loads(open(os.path.join(out_dir, "overlap.json")).read())
    assert len(overlap["dims_th"]) == len(overlap["dims_emp"])
    rows = read_rows(os.path.join(out_dir, "scatter.csv"))
    assert rows[0] == ["rank", "lambda_emp", "lambda_th", "degree"]


def test_check_hea_guard(tmp_path, capsys):
    cfg = base_config(tmp_path, check={"N": 100_000, "top_modes": 20})
    code, _ = run(capsys, "check-hea", "--config", write_config(tmp_path, cfg))
    assert code == 2


def test_decompose_target(tmp_path, capsys):
    cfg_path = write_config(tmp_path, base_config(tmp_path))
    code, out_dir = run(capsys, "decompose-target", "--config", cfg_path)
    assert code == 0
    dec = json.loads(open(os.path.join(out_dir, "decomposition.json")).read())
    # the hermite target is mode h_{e1} exactly: its coefficient dominates
    coeffs = {json.dumps(m["alpha"], sort_keys=True): m["v_hat"] for m in dec["modes"]}
    assert abs(coeffs[json.dumps({"0": 1})]) > 0.9


def test_gen_data_then_file_roundtrip(tmp_path, capsys):
    cfg = base_config(tmp_path)
    cfg["data"]["synthetic"]["n_samples"] = 300
    cfg_path = write_config(tmp_path, cfg)
    code, out_dir = run(capsys, "gen-data", "--config", cfg_path)
    assert code == 0
    file_cfg = base_config(
        tmp_path,
        data={"path": os.path.join(out_dir, "data.csv")},
        target={
            "kind": "labels",
            "labels_path": os.path.join(out_dir, "labels.csv"),
            "P": 20,
            "N": 250,
        },
    )
    del file_cfg["data"]["synthetic"]
    code, _ = run(capsys, "predict-curve", "--config",
                  write_config(tmp_path, file_cfg, "file.yaml"))
    assert code == 0


def test_failure_modes(tmp_path, capsys):
    cfg = base_config(tmp_path, data={"synthetic": {"d": 8}})
    code, out_dir = run(capsys, "failure-modes", "--config",
                        write_config(tmp_path, cfg))
    assert code == 0
    rows = read_rows(os.path.join(out_dir, "sweep.csv"))
    assert rows[0] == ["sigma", "d_eff", "top_bin_overlap"]
    assert float(rows[1][2]) > float(rows[2][2])


def test_missing_config_exits_2(tmp_path, capsys):
    code, _ = run(capsys, "predict-curve", "--config", str(tmp_path / "none.yaml"))
    assert code == 2


def test_bad_kernel_exits_2(tmp_path, capsys):
    cfg = base_config(tmp_path, kernel={"family": "sinc"})
    code, _ = run(capsys, "predict-curve", "--config", write_config(tmp_path, cfg))
    assert code == 2


def test_decreasing_grid_exits_2(tmp_path, capsys):
    cfg = base_config(tmp_path, eigenframework={"n_grid": [32, 8]})
    code, _ = run(capsys, "predict-curve", "--config", write_config(tmp_path, cfg))
    assert code == 2


def test_numerical_failure_exits_3(tmp_path, capsys):
    # ridgeless regression on a numerically rank-1 kernel matrix: the
    # factorization fails and the CLI reports a numerical error
    cfg = base_config(
        tmp_path,
        kernel={"family": "gaussian", "parameters": {"sigma": 1e8}},
        eigenframework={"ridge": 0.0, "n_grid": [8]},
        empirical={"trials": 1, "test_size": 20},
    )
    code, _ = run(capsys, "empirical-curve", "--config", write_config(tmp_path, cfg))
    assert code == 3
