"""Command line surface: file formats, linear encoder, experiment runner.

Matrices travel as csv (one sample per line) or raw-f32 (16-byte header,
then column-major float32). The encoder for unseen queries is a per-bit
ridge regression on the input features, not a kernel machine, so encoded
query codes are a rough linear surrogate.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics as metrics_mod
from . import similarity
from .al import ALConfig
from .core import CodeMatrix, DenseMatrix, DimensionError, NumericalError, _as_array
from .driver import InferenceConfig, infer_codes
from .similarity import SUPERVISED, UNSUPERVISED

_MAGIC = b"BHSH"

_DEFAULTS = {
    "mode": UNSUPERVISED,
    "backend": "al",
    "bits": 8,
    "sweeps": 3,
    "seed": 0,
    "normalize": False,
    "train": None,
    "labels": None,
    "query": None,
    "query_labels": None,
    "out_dir": "out",
    "al_T": 10,
    "al_mu0": 0.1,
    "al_alpha": 10.0,
    "al_eps": 1e-6,
    "sdr_trials": 100,
    "sdr_tol": 1e-6,
    "ridge": 1e-3,
    "knn_k": 4,
}


@dataclass(frozen=True)
class LinearEncoder:
    """Per-bit linear model with bias; encode maps scores through sgn."""

    weights: np.ndarray

    @property
    def bits(self):
        return self.weights.shape[0]

    @property
    def dim(self):
        return self.weights.shape[1] - 1

    def encode(self, x) -> CodeMatrix:
        data = _as_array(x)
        if data.ndim != 2 or data.shape[0] != self.dim:
            raise DimensionError(f"encoder expects {self.dim} features, got shape {data.shape}")
        scores = self.weights[:, :-1] @ data + self.weights[:, -1:]
        return CodeMatrix(np.where(scores >= 0.0, 1, -1))


def fit_linear_encoder(x, z: CodeMatrix, ridge=1e-3) -> LinearEncoder:
    """Ridge least-squares fit of each code row against features plus bias."""
    data = _as_array(x)
    if data.ndim != 2 or data.shape[1] != z.samples:
        raise DimensionError(f"data shape {data.shape} does not match {z.samples} code columns")
    if ridge < 0.0:
        raise ValueError("ridge must be >= 0")
    feats = np.vstack([data, np.ones((1, data.shape[1]))])
    normal = feats @ feats.T + ridge * np.eye(feats.shape[0])
    rhs = feats @ z.as_float().T
    try:
        w = np.linalg.solve(normal, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError("normal equations are singular; refit with ridge > 0") from exc
    return LinearEncoder(w.T)


def load_matrix(path) -> DenseMatrix:
    """Read a D x n matrix from csv or raw-f32, detected by the magic bytes.

    csv holds one sample per line; the returned matrix has samples as
    columns either way.
    """
    p = Path(path)
    with open(p, "rb") as fh:
        head = fh.read(4)
    if head == _MAGIC:
        return _load_raw(p)
    return _load_csv(p)


def _load_csv(p) -> DenseMatrix:
    try:
        rows = np.loadtxt(p, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{p}: malformed csv: {exc}") from exc
    if not np.isfinite(rows).all():
        raise ValueError(f"{p}: non-finite values in matrix")
    return DenseMatrix(rows.T)


def _load_raw(p) -> DenseMatrix:
    blob = p.read_bytes()
    if len(blob) < 16 or blob[:4] != _MAGIC:
        raise ValueError(f"{p}: bad magic, not a raw-f32 matrix file")
    d, n, reserved = np.frombuffer(blob[4:16], dtype="<u4")
    if reserved != 0:
        raise ValueError(f"{p}: malformed header, reserved field is {reserved}")
    payload = np.frombuffer(blob[16:], dtype="<f4")
    if payload.shape[0] != int(d) * int(n):
        raise ValueError(
            f"{p}: header says {d} x {n} but file holds {payload.shape[0]} values"
        )
    mat = payload.reshape((int(n), int(d))).T.astype(np.float64)
    if not np.isfinite(mat).all():
        raise ValueError(f"{p}: non-finite values in matrix")
    return DenseMatrix(mat)


def save_matrix_raw(path, m) -> None:
    """Write the raw-f32 format: magic, u32 D, u32 n, u32 zero, column-major f32."""
    data = _as_array(m)
    d, n = data.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(np.asarray([d, n, 0], dtype="<u4").tobytes())
        fh.write(np.asarray(data.T, dtype="<f4").tobytes())


def load_labels(path) -> np.ndarray:
    lab = np.loadtxt(path, dtype=np.int64, ndmin=1)
    if lab.ndim != 1:
        raise ValueError(f"{path}: labels must be one integer per line")
    return lab


def save_codes(path, z: CodeMatrix) -> None:
    """csv of +-1 integers, one sample per line."""
    np.savetxt(path, z.codes.T, fmt="%d", delimiter=",")


def load_codes(path) -> CodeMatrix:
    rows = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
    return CodeMatrix(rows.T)


def _merge_config(args) -> dict:
    cfg = dict(_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["normalize"] is None:
        cfg["normalize"] = False
    return cfg


def run_experiment(cfg: dict) -> dict:
    """Load, infer, encode, evaluate, and write artifacts under out_dir."""
    t_total = time.perf_counter()
    if cfg["train"] is None:
        raise ValueError("a training matrix is required (--train)")
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    x = load_matrix(cfg["train"])
    if cfg["normalize"]:
        x = DenseMatrix(similarity.normalize_columns(x))
    labels = load_labels(cfg["labels"]) if cfg["labels"] else None
    if cfg["mode"] == SUPERVISED:
        if labels is None:
            raise ValueError("supervised mode needs --labels")
        if labels.shape[0] != x.cols:
            raise DimensionError(
                f"{labels.shape[0]} labels for {x.cols} training samples"
            )
        sim = similarity.build_supervised(labels)
    else:
        sim = similarity.build_unsupervised(x)
    target = similarity.derive_target(sim, cfg["bits"])
    run_cfg = InferenceConfig(
        code_length=cfg["bits"],
        sweeps=cfg["sweeps"],
        backend=cfg["backend"],
        al=ALConfig(
            max_outer=cfg["al_T"],
            mu0=cfg["al_mu0"],
            alpha=cfg["al_alpha"],
            epsilon=cfg["al_eps"],
        ),
        sdr_trials=cfg["sdr_trials"],
        sdr_tol=cfg["sdr_tol"],
        seed=cfg["seed"],
    )
    codes, trace = infer_codes(x, target, run_cfg)
    save_codes(out / "codes.csv", codes)
    with open(out / "trace.jsonl", "w") as fh:
        i = 0
        for sweep in range(run_cfg.sweeps):
            for bit in range(run_cfg.code_length):
                rec = {
                    "update": i,
                    "sweep": sweep,
                    "bit": bit,
                    "objective": trace.objectives[i],
                    "solver_iterations": trace.reports[i].iterations,
                }
                fh.write(json.dumps(rec) + "\n")
                i += 1

    query_codes = None
    if cfg["query"]:
        q = load_matrix(cfg["query"])
        if cfg["normalize"]:
            q = DenseMatrix(similarity.normalize_columns(q))
        encoder = fit_linear_encoder(x, codes, ridge=cfg["ridge"])
        query_codes = encoder.encode(q)
        save_codes(out / "query_codes.csv", query_codes)

    report = {
        "mean_ap": None,
        "precision_at_r2": None,
        "knn_accuracy": None,
        "wall_time_seconds": {"inference": trace.wall_time},
        "final_objective": float(trace.objectives[-1]),
        "backend": cfg["backend"],
    }
    if labels is not None:
        qlabels = load_labels(cfg["query_labels"]) if cfg["query_labels"] else None
        if query_codes is not None and qlabels is not None:
            truth = metrics_mod.RetrievalGroundTruth(qlabels, labels)
            m = metrics_mod.evaluate(query_codes, codes, truth, k=cfg["knn_k"])
        else:
            truth = metrics_mod.RetrievalGroundTruth(labels, labels)
            m = metrics_mod.evaluate(codes, codes, truth, k=cfg["knn_k"])
        report["mean_ap"] = m.mean_ap
        report["precision_at_r2"] = m.precision_at_r2
        report["knn_accuracy"] = m.knn_accuracy
    report["wall_time_seconds"]["total"] = time.perf_counter() - t_total
    with open(out / "metrics.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    with open(out / "config.json", "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hashinfer",
        description="Infer similarity-preserving binary codes and evaluate retrieval.",
    )
    ap.add_argument("--config", help="json file with the same keys as the flags")
    ap.add_argument("--mode", choices=[UNSUPERVISED, SUPERVISED])
    ap.add_argument("--backend", choices=["al", "sdr"])
    ap.add_argument("--bits", type=int, help="code length L")
    ap.add_argument("--sweeps", type=int, help="passes over all bits")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--normalize", action="store_const", const=True, default=None,
                    help="scale input columns to unit norm")
    ap.add_argument("--train", help="training matrix (csv or raw-f32)")
    ap.add_argument("--labels", help="training labels, one integer per line")
    ap.add_argument("--query", help="query matrix to encode with the fitted encoder")
    ap.add_argument("--query-labels", dest="query_labels")
    ap.add_argument("--out-dir", dest="out_dir")
    ap.add_argument("--al-T", dest="al_T", type=int, help="outer iteration cap")
    ap.add_argument("--al-mu0", dest="al_mu0", type=float, help="initial penalty")
    ap.add_argument("--al-alpha", dest="al_alpha", type=float, help="penalty growth")
    ap.add_argument("--al-eps", dest="al_eps", type=float, help="outer stop tolerance")
    ap.add_argument("--sdr-trials", dest="sdr_trials", type=int)
    ap.add_argument("--sdr-tol", dest="sdr_tol", type=float)
    ap.add_argument("--ridge", type=float, help="encoder ridge strength")
    ap.add_argument("--knn-k", dest="knn_k", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        report = run_experiment(cfg)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"hashinfer: data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"hashinfer: numerical error: {exc}", file=sys.stderr)
        return 4
    summary = {k: report[k] for k in ("mean_ap", "precision_at_r2", "knn_accuracy", "final_objective")}
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
