"""Config-driven orchestration of the full workflow.

A run config is a YAML key tree (see README for the schema). Every command
is a pure function of (config, input files); outputs land in a directory
named by a hash of the config so reruns are reproducible and never clobber
other runs.
"""

import hashlib
import json
import os

import numpy as np
import yaml

from . import data as data_mod
from . import decomp as decomp_mod
from . import eigenframework as ef
from . import io as io_mod
from . import kernels as kernels_mod
from . import krr as krr_mod
from . import spectral as spectral_mod
from .eigensystem import build_eigensystem
from .hermite import MultiIndex
from .eigensystem import evaluate_modes


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "seed": 0,
    "output_dir": "runs",
    "preprocess": {"center": False, "zca_strength": None, "normalize_samples": False},
    "hea": {"P": 2000, "L": 10},
    "target": {"kind": "hermite", "method": "gram_schmidt", "P": 500, "N": 20000},
    "eigenframework": {"ridge": 1e-3, "n_grid": [32, 64, 128, 256, 512, 1024, 2048]},
    "empirical": {"trials": 20, "test_size": 5000},
    "check": {"N": 4000, "top_modes": 100, "bins_per_decade": 2, "top_bins": 4},
    "failure_modes": {"sweep": "gaussian_width", "widths": [6.0, 2.0, 1.0, 0.5],
                      "deff_targets": [30.0, 5.0], "N": 2000, "top_bins": 4},
}

DIAG_GUARD = 16384


def _merge(defaults, override):
    out = dict(defaults)
    for key, val in (override or {}).items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path):
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a key tree")
    cfg = _merge(DEFAULTS, raw)
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    if "data" not in cfg:
        raise ConfigError("config needs a 'data' section")
    data_cfg = cfg["data"]
    if "synthetic" not in data_cfg and "path" not in data_cfg:
        raise ConfigError("data section needs 'synthetic' or 'path'")
    if "path" in data_cfg and not os.path.exists(data_cfg["path"]):
        raise ConfigError(f"data path does not exist: {data_cfg['path']}")
    labels = cfg.get("target", {}).get("labels_path")
    if labels is not None and not os.path.exists(labels):
        raise ConfigError(f"labels path does not exist: {labels}")
    if "kernel" not in cfg:
        raise ConfigError("config needs a 'kernel' section")
    try:
        kernel_from_config(cfg)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad kernel config: {exc}") from exc
    grid = cfg["eigenframework"]["n_grid"]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("n_grid must be strictly increasing")
    if "seed" not in cfg or cfg["seed"] is None:
        raise ConfigError("config needs a seed")


def config_hash(cfg):
    canon = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def run_dir(cfg, command):
    path = os.path.join(cfg["output_dir"], f"{command}-{config_hash(cfg)}")
    os.makedirs(path, exist_ok=True)
    return path


def kernel_from_config(cfg):
    return kernels_mod.KernelSpec.from_dict(cfg["kernel"])


def powerlaw_eigenvalues(d, exponent, offset=6, normalize_trace=True):
    g = (np.arange(1, d + 1, dtype=np.float64) + offset) ** (-float(exponent))
    if normalize_trace:
        g = g / g.sum()
    return g


def exponent_for_deff(d, target, offset=6, normalize_trace=True):
    """Covariance decay exponent giving the requested effective dimension."""
    if not 1.0 < target <= d:
        raise ConfigError(f"target d_eff must lie in (1, {d}]")

    def deff(expo):
        g = powerlaw_eigenvalues(d, expo, offset, normalize_trace)
        return g.sum() ** 2 / np.sum(g**2)

    lo, hi = 0.0, 1.0
    while deff(hi) > target and hi < 64:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if deff(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def spectrum_from_config(cfg):
    syn = cfg["data"].get("synthetic")
    if syn is None:
        return None
    d = int(syn["d"])
    g = powerlaw_eigenvalues(
        d,
        syn.get("decay_exponent", 3.0),
        syn.get("decay_offset", 6),
        syn.get("normalize_trace", True),
    )
    g = g * float(syn.get("trace", 1.0))
    return data_mod.CovarianceSpectrum.from_eigenvalues(g)


def _subseed(cfg, stream):
    return [int(cfg["seed"]), stream]


def make_data(cfg, n_samples, stream):
    """Data matrix + covariance spectrum for a pipeline stage.

    Synthetic data is drawn from the configured powerlaw Gaussian; file data
    is loaded, preprocessed, and its covariance estimated. For synthetic data
    the exact generating spectrum is used downstream.
    """
    pre = data_mod.PreprocessConfig(
        zca_strength=cfg["preprocess"].get("zca_strength"),
        normalize_samples=cfg["preprocess"].get("normalize_samples", False),
        center=cfg["preprocess"].get("center", False),
    )
    syn = cfg["data"].get("synthetic")
    if syn is not None:
        spectrum = spectrum_from_config(cfg)
        X = data_mod.sample_gaussian(spectrum, n_samples, _subseed(cfg, stream))
        X = data_mod.preprocess(X, pre)
        if pre.zca_strength is not None or pre.normalize_samples or pre.center:
            spectrum = data_mod.estimate_covariance(X)
        return X, spectrum
    X = io_mod.load_matrix(cfg["data"]["path"], cfg["data"].get("format"))
    X = data_mod.preprocess(X, pre)
    if n_samples > X.shape[0]:
        raise ConfigError(
            f"need {n_samples} samples but the data file has {X.shape[0]}"
        )
    rng = np.random.default_rng(_subseed(cfg, stream))
    X = X[rng.permutation(X.shape[0])[:n_samples]]
    return X, data_mod.estimate_covariance(X, center=pre.center)


def make_target(cfg, X, spectrum, stream):
    """Label vector for the configured target on the given samples."""
    tgt = cfg["target"]
    kind = tgt.get("kind", "hermite")
    if kind == "labels":
        y = io_mod.load_matrix(tgt["labels_path"], tgt.get("format")).ravel()
        if y.shape[0] < X.shape[0]:
            raise ConfigError("labels file shorter than the data sample count")
        return y[: X.shape[0]]
    if kind == "hermite":
        alpha = MultiIndex.from_dict(tgt.get("mode", {"0": 1}))
        return evaluate_modes([alpha], spectrum, X)[:, 0]
    if kind == "powerlaw":
        coeffs = level_coefficients_from_config(cfg, spectrum)
        hea = build_eigensystem(
            spectrum, coeffs, int(cfg["hea"]["P"]), int(cfg["hea"]["L"])
        )
        y, _, _ = data_mod.powerlaw_target(
            hea, X, float(tgt["beta"]), _subseed(cfg, stream + 1000)
        )
        return y
    raise ConfigError(f"unknown target kind {kind!r}")


def level_coefficients_from_config(cfg, spectrum):
    spec = kernel_from_config(cfg)
    return kernels_mod.level_coefficients(spec, spectrum.radius, int(cfg["hea"]["L"]))


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def cmd_predict_curve(cfg):
    out = run_dir(cfg, "predict-curve")
    spec = kernel_from_config(cfg)
    n_dec = int(cfg["target"]["N"])
    X, spectrum = make_data(cfg, n_dec, stream=1)
    coeffs = level_coefficients_from_config(cfg, spectrum)
    hea = build_eigensystem(spectrum, coeffs, int(cfg["hea"]["P"]), int(cfg["hea"]["L"]))
    y = make_target(cfg, X, spectrum, stream=2)
    decomposition = decomp_mod.decompose_from_dataset(
        X, y, spectrum,
        P=int(cfg["target"]["P"]), L=int(cfg["hea"]["L"]),
        method=cfg["target"]["method"],
    )
    trace = kernels_mod.trace_estimate(spec, X)
    task = ef.task_spectrum_from_decomposition(
        hea, decomposition, ridge=float(cfg["eigenframework"]["ridge"]), trace=trace
    )
    preds = ef.learning_curve_prediction(task, cfg["eigenframework"]["n_grid"])
    _write_csv(
        os.path.join(out, "learning_curve.csv"),
        ["n", "kappa", "e0", "bias", "test_risk", "train_risk"],
        [
            (p.n, float(p.kappa), float(p.e0), float(p.bias),
             float(p.test_risk), float(p.train_risk))
            for p in preds
        ],
    )
    decomposition.dump_json(os.path.join(out, "decomposition.json"))
    summary = {
        "config_hash": config_hash(cfg),
        "radius": spectrum.radius,
        "effective_dimension": spectrum.effective_dimension,
        "kernel": spec.to_dict(),
        "modes": len(hea.modes),
        "eigensystem_truncated": hea.truncated,
        "kernel_trace": trace,
        "tail_mass": task.tail_mass,
        "noise_power": decomposition.noise_power,
    }
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=1)
    return out


def cmd_empirical_curve(cfg):
    out = run_dir(cfg, "empirical-curve")
    spec = kernel_from_config(cfg)
    grid = cfg["eigenframework"]["n_grid"]
    pool = int(max(grid)) + int(cfg["empirical"]["test_size"])
    X, spectrum = make_data(cfg, pool, stream=3)
    y = make_target(cfg, X, spectrum, stream=4)
    curve = krr_mod.empirical_learning_curve(
        spec, X, y, grid,
        delta=float(cfg["eigenframework"]["ridge"]),
        trials=int(cfg["empirical"]["trials"]),
        test_size=int(cfg["empirical"]["test_size"]),
        seed=int(cfg["seed"]),
    )
    _write_csv(
        os.path.join(out, "empirical_curve.csv"),
        ["n", "mse_mean", "mse_stderr", "trials"],
        [
            (int(n), float(m), float(s), curve.trials)
            for n, m, s in zip(curve.n_grid, curve.mse_mean, curve.mse_stderr)
        ],
    )
    return out


def cmd_check_hea(cfg):
    out = run_dir(cfg, "check-hea")
    spec = kernel_from_config(cfg)
    N = int(cfg["check"]["N"])
    if N > DIAG_GUARD:
        raise ConfigError(
            f"check.N = {N} exceeds the diagonalization guard {DIAG_GUARD}; "
            "subsample the data"
        )
    X, spectrum = make_data(cfg, N, stream=5)
    coeffs = level_coefficients_from_config(cfg, spectrum)
    k = int(cfg["check"]["top_modes"])
    hea = build_eigensystem(spectrum, coeffs, max(k, int(cfg["hea"]["P"])),
                            int(cfg["hea"]["L"]))
    emp = spectral_mod.empirical_eigensystem(spec, X, k)
    report = spectral_mod.compare_eigensystems(
        hea, emp, X, bins_per_decade=int(cfg["check"]["bins_per_decade"])
    )
    report.dump_json(os.path.join(out, "overlap.json"))
    _write_csv(
        os.path.join(out, "scatter.csv"),
        ["rank", "lambda_emp", "lambda_th", "degree"],
        spectral_mod.eigenvalue_scatter(hea, emp),
    )
    return out


def cmd_decompose_target(cfg):
    out = run_dir(cfg, "decompose-target")
    n_dec = int(cfg["target"]["N"])
    X, spectrum = make_data(cfg, n_dec, stream=1)
    y = make_target(cfg, X, spectrum, stream=2)
    decomposition = decomp_mod.decompose_from_dataset(
        X, y, spectrum,
        P=int(cfg["target"]["P"]), L=int(cfg["hea"]["L"]),
        method=cfg["target"]["method"],
    )
    decomposition.dump_json(os.path.join(out, "decomposition.json"))
    return out


def _sweep_overlap(cfg, spec, spectrum):
    N = int(cfg["failure_modes"]["N"])
    X = data_mod.sample_gaussian(spectrum, N, _subseed(cfg, 6))
    L = int(cfg["hea"]["L"])
    coeffs = kernels_mod.level_coefficients(spec, spectrum.radius, L)
    k = int(cfg["check"]["top_modes"])
    hea = build_eigensystem(spectrum, coeffs, max(k, 200), L)
    emp = spectral_mod.empirical_eigensystem(spec, X, k)
    report = spectral_mod.compare_eigensystems(
        hea, emp, X, bins_per_decade=int(cfg["check"]["bins_per_decade"])
    )
    tops = spectral_mod.top_bin_overlaps(report, int(cfg["failure_modes"]["top_bins"]))
    return float(np.mean(tops))


def cmd_failure_modes(cfg):
    if cfg["data"].get("synthetic") is None:
        raise ConfigError("failure-mode sweeps need synthetic data")
    out = run_dir(cfg, "failure-modes")
    fm = cfg["failure_modes"]
    spec = kernel_from_config(cfg)
    rows = []
    if fm["sweep"] == "gaussian_width":
        for sigma in fm["widths"]:
            spectrum = spectrum_from_config(cfg)
            swept = kernels_mod.gaussian(float(sigma))
            rows.append((float(sigma), spectrum.effective_dimension,
                         _sweep_overlap(cfg, swept, spectrum)))
        header = ["sigma", "d_eff", "top_bin_overlap"]
    elif fm["sweep"] in ("laplace_deff", "gaussian_deff"):
        syn = cfg["data"]["synthetic"]
        for target in fm["deff_targets"]:
            expo = exponent_for_deff(
                int(syn["d"]), float(target), syn.get("decay_offset", 6)
            )
            g = powerlaw_eigenvalues(int(syn["d"]), expo, syn.get("decay_offset", 6))
            spectrum = data_mod.CovarianceSpectrum.from_eigenvalues(g)
            rows.append((float(target), spectrum.effective_dimension,
                         _sweep_overlap(cfg, spec, spectrum)))
        header = ["d_eff_target", "d_eff", "top_bin_overlap"]
    else:
        raise ConfigError(f"unknown sweep {fm['sweep']!r}")
    _write_csv(os.path.join(out, "sweep.csv"), header, rows)
    return out


def cmd_gen_data(cfg):
    out = run_dir(cfg, "gen-data")
    n = int(cfg["data"].get("synthetic", {}).get("n_samples", cfg["target"]["N"]))
    X, spectrum = make_data(cfg, n, stream=7)
    fmt = cfg["data"].get("format", "csv")
    ext = "csv" if fmt == "csv" else "heam"
    io_mod.save_matrix(os.path.join(out, f"data.{ext}"), X, fmt)
    y = make_target(cfg, X, spectrum, stream=8)
    io_mod.save_matrix(os.path.join(out, f"labels.{ext}"), y.reshape(-1, 1), fmt)
    return out
