"""Command-line front end for the full pipeline.

Subcommands: kta, train, predict, evaluate, grid, export-qubo. Every command
is deterministic given --seed; pass --no-timestamp to strip timestamps and
wall-clock timings from reports so identical runs produce byte-identical
output.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import anneal, kernel as kernelmod, svm
from .anneal import AnnealSchedule
from .data import Dataset, fit_preprocessing, load_simple_csv, load_wdbc, prime_seeds, split, subsample
from .errors import ResourceError
from .featuremaps import FEATURE_MAP_KINDS, FeatureMapConfig
from .qubo import bits_for, build_qubo
from .simulator import DEFAULT_QUBIT_CAP
from .svm import ClassicalKernelConfig


class UsageError(Exception):
    """Bad invocation or configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    command: str
    data: str | None
    data_format: str
    subsample_size: int
    seeds_count: int
    test_fraction: float
    seed: int
    kernel: str
    qubits: list[int]
    feature_map: list[str]
    reps: list[int]
    c_values: list[int]
    penalty: float
    gamma: float | None
    sa_sweeps: int
    sa_restarts: int
    sa_beta_start: float
    sa_beta_end: float
    use_bias: bool
    allow_large: bool
    no_timestamp: bool
    model_path: str
    output: str | None
    export_qubo_path: str | None
    export_kernel_path: str | None
    evaluate_on: str = "test"
    kernels: list[str] = field(default_factory=list)

    @property
    def qubit_cap(self) -> int:
        return max(DEFAULT_QUBIT_CAP, max(self.qubits, default=0)) if self.allow_large else DEFAULT_QUBIT_CAP

    def schedule(self) -> AnnealSchedule:
        return AnnealSchedule(
            sweeps=self.sa_sweeps,
            beta_start=self.sa_beta_start,
            beta_end=self.sa_beta_end,
            restarts=self.sa_restarts,
            seed=self.seed,
        )

    def validate(self) -> None:
        if self.data is not None and not Path(self.data).exists():
            raise UsageError(f"data file not found: {self.data}")
        if not 0.0 < self.test_fraction < 1.0:
            raise UsageError(f"--test-fraction must be in (0, 1), got {self.test_fraction}")
        if self.seeds_count < 1:
            raise UsageError("--seeds-count must be >= 1")
        for c in self.c_values:
            try:
                bits_for(c)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        for fm in self.feature_map:
            if fm not in FEATURE_MAP_KINDS:
                raise UsageError(f"unknown feature map {fm!r}; expected one of {FEATURE_MAP_KINDS}")
        for kind in self.kernels or [self.kernel]:
            if kind not in ("quantum", "linear", "rbf"):
                raise UsageError(f"unknown kernel {kind!r}")
        if self.command != "grid":
            for q in self.qubits:
                if q > self.qubit_cap:
                    raise UsageError(
                        f"{q} qubits exceeds the cap of {self.qubit_cap}; pass --allow-large to override"
                    )
        if self.gamma is not None and self.gamma <= 0:
            raise UsageError(f"--gamma must be positive, got {self.gamma}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [v.strip().lower() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qksvm",
        description="Quantum-kernel SVM trained by QUBO annealing, simulated classically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, needs_data: bool = True):
        p.add_argument("--data", required=needs_data, help="input CSV path")
        p.add_argument(
            "--data-format",
            choices=("wdbc", "simple"),
            default="wdbc",
            help="wdbc: id,M|B,30 features; simple: label(+1/-1),features...",
        )
        p.add_argument("--subsample-size", type=int, default=140,
                       help="prime-seeded subsample size; 0 keeps every row")
        p.add_argument("--seeds-count", type=int, default=10000,
                       help="how many primes to try as subsample seeds")
        p.add_argument("--test-fraction", type=float, default=0.25)
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--kernel", choices=("quantum", "linear", "rbf"), default="quantum")
        p.add_argument("--qubits", type=_int_list, default=[4],
                       help="qubit count (quantum) / PCA dimension (classical); comma list in grid mode")
        p.add_argument("--feature-map", type=_str_list, default=["z"],
                       help="z, zz, su2hr or su2rr; comma list in grid mode")
        p.add_argument("--reps", type=_int_list, default=[1], help="feature-map repetitions")
        p.add_argument("--c-value", type=_int_list, default=[63], help="box constraint C, must be 2^b - 1")
        p.add_argument("--penalty", type=float, default=1.0, help="equality-constraint penalty multiplier")
        p.add_argument("--gamma", type=float, default=None, help="rbf width; default 1/dim")
        p.add_argument("--sa-sweeps", type=int, default=2000)
        p.add_argument("--sa-restarts", type=int, default=8)
        p.add_argument("--sa-beta-start", type=float, default=0.1)
        p.add_argument("--sa-beta-end", type=float, default=10.0)
        p.add_argument("--no-bias", action="store_true",
                       help="drop the bias term and the equality-constraint penalty")
        p.add_argument("--allow-large", action="store_true",
                       help="lift the qubit cap (a 30-qubit state needs ~17 GB)")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit timestamps and timings for byte-reproducible reports")
        p.add_argument("--output", default=None, help="report path (printed to stdout when omitted)")

    p_kta = sub.add_parser("kta", help="score kernel configurations by kernel-target alignment")
    add_common(p_kta)
    p_kta.add_argument("--export-kernel", default=None, help="write the training kernel as CSV")

    p_train = sub.add_parser("train", help="train a model and write a JSON report")
    add_common(p_train)
    p_train.add_argument("--model", default="qksvm-model.json", help="model file to write")
    p_train.add_argument("--export-qubo", default=None, help="also write the solved QUBO as text")
    p_train.add_argument("--export-kernel", default=None, help="write the training kernel as CSV")

    p_pred = sub.add_parser("predict", help="predict labels for every row of a data file")
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--data-format", choices=("wdbc", "simple"), default="wdbc")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--no-timestamp", action="store_true")
    p_pred.add_argument("--output", default=None)

    p_eval = sub.add_parser("evaluate", help="evaluate a saved model")
    add_common(p_eval)
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--on", choices=("train", "test", "all"), default="test",
                        help="which part of the derived split to score")

    p_grid = sub.add_parser("grid", help="sweep kernel configurations and C values")
    add_common(p_grid)
    p_grid.add_argument("--kernels", type=_str_list, default=["quantum"],
                        help="comma list over {quantum, linear, rbf}")

    p_export = sub.add_parser("export-qubo", help="build the training QUBO and write it without solving")
    add_common(p_export)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        data=getattr(args, "data", None),
        data_format=getattr(args, "data_format", "wdbc"),
        subsample_size=getattr(args, "subsample_size", 0),
        seeds_count=getattr(args, "seeds_count", 1),
        test_fraction=getattr(args, "test_fraction", 0.25),
        seed=getattr(args, "seed", 7),
        kernel=getattr(args, "kernel", "quantum"),
        qubits=list(getattr(args, "qubits", [4])),
        feature_map=list(getattr(args, "feature_map", ["z"])),
        reps=list(getattr(args, "reps", [1])),
        c_values=list(getattr(args, "c_value", [63])),
        penalty=getattr(args, "penalty", 1.0),
        gamma=getattr(args, "gamma", None),
        sa_sweeps=getattr(args, "sa_sweeps", 2000),
        sa_restarts=getattr(args, "sa_restarts", 8),
        sa_beta_start=getattr(args, "sa_beta_start", 0.1),
        sa_beta_end=getattr(args, "sa_beta_end", 10.0),
        use_bias=not getattr(args, "no_bias", False),
        allow_large=getattr(args, "allow_large", False),
        no_timestamp=getattr(args, "no_timestamp", False),
        model_path=getattr(args, "model", "qksvm-model.json"),
        output=getattr(args, "output", None),
        export_qubo_path=getattr(args, "export_qubo", None),
        export_kernel_path=getattr(args, "export_kernel", None),
        evaluate_on=getattr(args, "on", "test"),
        kernels=list(getattr(args, "kernels", [])),
    )


# ---------------------------------------------------------------------------
# shared pipeline pieces

class StageTimer:
    """Accumulates wall time per stage and tags escaping exceptions with the
    stage name so main() can report where a run failed."""

    def __init__(self):
        self.timings: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        except Exception as exc:
            if not hasattr(exc, "stage"):
                exc.stage = name
            raise
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0


def load_dataset(cfg: RunConfig) -> Dataset:
    if cfg.data_format == "wdbc":
        return load_wdbc(cfg.data)
    return load_simple_csv(cfg.data)


def prepare_splits(cfg: RunConfig, timer: StageTimer):
    """load -> optional prime-seeded subsample -> stratified split."""
    with timer.stage("load"):
        full = load_dataset(cfg)
    sub_info = {"size": full.n, "chosen_seed": None, "score": None}
    chosen = full
    if cfg.subsample_size:
        if not 2 <= cfg.subsample_size <= full.n:
            raise UsageError(
                f"--subsample-size must be in [2, {full.n}] for this file, got {cfg.subsample_size}"
            )
        with timer.stage("subsample"):
            seeds = prime_seeds(cfg.seeds_count)
            chosen, chosen_seed, score = subsample(full, cfg.subsample_size, seeds)
        sub_info = {"size": chosen.n, "chosen_seed": chosen_seed, "score": score}
    with timer.stage("split"):
        train_ds, test_ds = split(chosen, cfg.test_fraction, cfg.seed)
    return chosen, train_ds, test_ds, sub_info


def kernel_config_for(cfg: RunConfig, kind: str, q: int, fm: str, reps: int, dim: int):
    if kind == "quantum":
        return FeatureMapConfig(kind=fm, num_qubits=q, repetitions=reps)
    if kind == "rbf":
        gamma = cfg.gamma if cfg.gamma is not None else 1.0 / dim
        return ClassicalKernelConfig("rbf", gamma)
    return ClassicalKernelConfig("linear")


def fit_cell_preprocessing(train_ds: Dataset, kind: str, q: int):
    quantum = kind == "quantum"
    target = min(q, train_ds.d) if q else None
    return fit_preprocessing(train_ds, q=target, with_angle=quantum)


def build_cell_kernel(cfg: RunConfig, train_ds: Dataset, kind: str, q: int, fm: str, reps: int):
    """Fit preprocessing, build the training kernel, and return all three."""
    pre = fit_cell_preprocessing(train_ds, kind, q)
    feats = pre.apply(train_ds.features)
    kcfg = kernel_config_for(cfg, kind, q, fm, reps, feats.shape[1])
    if kind == "quantum":
        if feats.shape[1] != q:
            raise UsageError(
                f"{q} qubits requested but the data only has {feats.shape[1]} dimensions"
            )
        K = kernelmod.gram_matrix(feats, kcfg, cfg.qubit_cap)
    else:
        K = kernelmod.classical_kernel(kcfg.kind, feats, kcfg.gamma)
    return pre, kcfg, K


# ---------------------------------------------------------------------------
# output helpers

def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def emit_report(report: dict, cfg: RunConfig, timer: StageTimer | None = None) -> str:
    if not cfg.no_timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
        if timer is not None:
            report["timings"] = {k: round(v, 6) for k, v in timer.timings.items()}
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return text


def write_kernel_csv(K, path) -> None:
    with open(path, "w") as fh:
        for row in K.values:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def config_dict(cfg: RunConfig) -> dict:
    out = {
        "data": cfg.data,
        "data_format": cfg.data_format,
        "subsample_size": cfg.subsample_size,
        "seeds_count": cfg.seeds_count,
        "test_fraction": cfg.test_fraction,
        "seed": cfg.seed,
        "kernel": cfg.kernels or cfg.kernel,
        "qubits": cfg.qubits,
        "feature_map": cfg.feature_map,
        "reps": cfg.reps,
        "c_value": cfg.c_values,
        "penalty": cfg.penalty,
        "gamma": cfg.gamma,
        "sa": {
            "sweeps": cfg.sa_sweeps,
            "restarts": cfg.sa_restarts,
            "beta_start": cfg.sa_beta_start,
            "beta_end": cfg.sa_beta_end,
        },
        "use_bias": cfg.use_bias,
        "allow_large": cfg.allow_large,
    }
    return out


def _single(cfg: RunConfig, what: str, values: list):
    if len(values) != 1:
        raise UsageError(f"{what} must be a single value for `{cfg.command}`, got {values}")
    return values[0]


# ---------------------------------------------------------------------------
# commands

def cmd_kta(cfg: RunConfig) -> int:
    timer = StageTimer()
    _, train_ds, _, sub_info = prepare_splits(cfg, timer)
    train_ds.require_both_classes("kta")
    rows = []
    kinds = cfg.kernels or [cfg.kernel]
    with timer.stage("kernels"):
        for kind in kinds:
            q_list = cfg.qubits if kind == "quantum" else [cfg.qubits[0]]
            fm_list = cfg.feature_map if kind == "quantum" else ["-"]
            reps_list = cfg.reps if kind == "quantum" else [0]
            for q in q_list:
                for fm in fm_list:
                    for reps in reps_list:
                        pre, kcfg, K = build_cell_kernel(cfg, train_ds, kind, q, fm, reps)
                        value = kernelmod.kta(K, train_ds.labels)
                        rows.append({
                            "kernel": K.provenance,
                            "kta": value,
                            "train_size": train_ds.n,
                        })
                        if cfg.export_kernel_path and len(rows) == 1:
                            write_kernel_csv(K, cfg.export_kernel_path)
    rows.sort(key=lambda r: -r["kta"])
    for row in rows:
        prov = row["kernel"]
        name = (
            f"{prov['feature_map']}(q={prov['num_qubits']},r={prov['repetitions']})"
            if prov["kind"] == "quantum"
            else prov["kind"]
        )
        print(f"KTA {row['kta']:.6f}  {name}", file=sys.stderr)
    report = {
        "command": "kta",
        "config": config_dict(cfg),
        "subsample": sub_info,
        "rows": rows,
    }
    emit_report(report, cfg, timer)
    return 0


def _train_model(cfg: RunConfig, train_ds: Dataset, timer: StageTimer):
    kind = cfg.kernel
    q = _single(cfg, "--qubits", cfg.qubits)
    fm = _single(cfg, "--feature-map", cfg.feature_map)
    reps = _single(cfg, "--reps", cfg.reps)
    c_value = _single(cfg, "--c-value", cfg.c_values)
    with timer.stage("preprocess"):
        pre = fit_cell_preprocessing(train_ds, kind, q)
        dim = pre.output_dim
    kcfg = kernel_config_for(cfg, kind, q, fm, reps, dim)
    if kind == "quantum" and dim != q:
        raise UsageError(f"{q} qubits requested but the data only has {dim} dimensions")
    with timer.stage("train"):
        model = svm.train(
            train_ds,
            kcfg,
            c_value,
            cfg.penalty,
            cfg.schedule(),
            preprocessing=pre,
            use_bias=cfg.use_bias,
            qubit_cap=cfg.qubit_cap,
        )
    return model


def cmd_train(cfg: RunConfig) -> int:
    timer = StageTimer()
    _, train_ds, test_ds, sub_info = prepare_splits(cfg, timer)
    model = _train_model(cfg, train_ds, timer)
    diag = model.diagnostics
    timer.timings.update({f"train.{k}": v for k, v in diag["timings"].items()})
    kta_value = kernelmod.kta(diag["kernel"], train_ds.labels)
    with timer.stage("evaluate"):
        train_metrics = svm.evaluate(model, train_ds)
        test_metrics = svm.evaluate(model, test_ds) if test_ds.n else None
    with timer.stage("write"):
        svm.save_model(model, cfg.model_path)
        if cfg.export_qubo_path:
            anneal.export_qubo(diag["problem"], cfg.export_qubo_path)
        if cfg.export_kernel_path:
            write_kernel_csv(diag["kernel"], cfg.export_kernel_path)
    report = {
        "command": "train",
        "config": config_dict(cfg),
        "subsample": sub_info,
        "train_size": train_ds.n,
        "test_size": test_ds.n,
        "kta": kta_value,
        "qubo": {
            "num_vars": diag["num_vars"],
            "n": train_ds.n,
            "bits": diag["problem"].encoding.bits,
        },
        "solver": {
            "energy": diag["solver_energy"],
            "constraint_residual": diag["constraint_residual"],
        },
        "model": {
            "bias": model.bias,
            "support_count": int(len(model.support_alphas)),
        },
        "train_metrics": train_metrics.to_dict(),
        "test_metrics": test_metrics.to_dict() if test_metrics else None,
        "macro_f1": test_metrics.macro_f1 if test_metrics else train_metrics.macro_f1,
    }
    emit_report(report, cfg, timer)
    return 0


def cmd_predict(cfg: RunConfig) -> int:
    model = svm.load_model(cfg.model_path)
    ds = load_dataset(cfg)
    values = svm.decision_values(model, ds.features)
    labels = np.where(values >= 0.0, 1, -1)
    report = {
        "command": "predict",
        "model": cfg.model_path,
        "rows": [
            {
                "id": ds.source_ids[i],
                "label": int(ds.labels[i]),
                "predicted": int(labels[i]),
                "decision_value": float(values[i]),
            }
            for i in range(ds.n)
        ],
    }
    emit_report(report, cfg)
    return 0


def cmd_evaluate(cfg: RunConfig) -> int:
    timer = StageTimer()
    model = svm.load_model(cfg.model_path)
    chosen, train_ds, test_ds, sub_info = prepare_splits(cfg, timer)
    part = {"train": train_ds, "test": test_ds, "all": chosen}[cfg.evaluate_on]
    if part.n == 0:
        raise UsageError(f"the `{cfg.evaluate_on}` part of the split is empty")
    with timer.stage("evaluate"):
        metrics = svm.evaluate(model, part)
    report = {
        "command": "evaluate",
        "config": config_dict(cfg),
        "model": cfg.model_path,
        "on": cfg.evaluate_on,
        "size": part.n,
        "metrics": metrics.to_dict(),
        "macro_f1": metrics.macro_f1,
    }
    emit_report(report, cfg, timer)
    return 0


def cmd_export_qubo(cfg: RunConfig) -> int:
    timer = StageTimer()
    _, train_ds, _, _sub = prepare_splits(cfg, timer)
    kind = cfg.kernel
    q = _single(cfg, "--qubits", cfg.qubits)
    fm = _single(cfg, "--feature-map", cfg.feature_map)
    reps = _single(cfg, "--reps", cfg.reps)
    c_value = _single(cfg, "--c-value", cfg.c_values)
    pre, kcfg, K = build_cell_kernel(cfg, train_ds, kind, q, fm, reps)
    effective_penalty = cfg.penalty if cfg.use_bias else 0.0
    problem = build_qubo(K, train_ds.labels, c_value, effective_penalty)
    path = cfg.output or "qubo.txt"
    anneal.export_qubo(problem, path)
    print(f"wrote {problem.num_vars}-variable qubo to {path}", file=sys.stderr)
    return 0


def cmd_grid(cfg: RunConfig) -> int:
    timer = StageTimer()
    _, train_ds, test_ds, sub_info = prepare_splits(cfg, timer)
    kinds = cfg.kernels or [cfg.kernel]
    cells = []
    for kind in kinds:
        q_list = cfg.qubits if kind == "quantum" else [cfg.qubits[0]]
        fm_list = cfg.feature_map if kind == "quantum" else ["-"]
        reps_list = cfg.reps if kind == "quantum" else [0]
        for q in q_list:
            for fm in fm_list:
                for reps in reps_list:
                    for c_value in cfg.c_values:
                        cells.append((kind, q, fm, reps, c_value))
    rows = []
    schedule = cfg.schedule()
    for kind, q, fm, reps, c_value in cells:
        cell_cfg = {
            "kernel": kind,
            "qubits": q if kind == "quantum" else None,
            "feature_map": fm if kind == "quantum" else None,
            "reps": reps if kind == "quantum" else None,
            "c_value": c_value,
        }
        row = {"config": cell_cfg}
        try:
            pre = fit_cell_preprocessing(train_ds, kind, q)
            kcfg = kernel_config_for(cfg, kind, q, fm, reps, pre.output_dim)
            if kind == "quantum" and pre.output_dim != q:
                raise UsageError(f"{q} qubits but only {pre.output_dim} data dimensions")
            model = svm.train(
                train_ds, kcfg, c_value, cfg.penalty, schedule,
                preprocessing=pre, use_bias=cfg.use_bias, qubit_cap=cfg.qubit_cap,
            )
            diag = model.diagnostics
            metrics = svm.evaluate(model, test_ds) if test_ds.n else svm.evaluate(model, train_ds)
            row.update({
                "status": "ok",
                "kta": kernelmod.kta(diag["kernel"], train_ds.labels),
                "macro_f1": metrics.macro_f1,
                "energy": diag["solver_energy"],
                "constraint_residual": diag["constraint_residual"],
                "num_vars": diag["num_vars"],
            })
        except ResourceError as exc:
            row.update({"status": "skipped: resource", "detail": str(exc)})
        except Exception as exc:  # fail soft: one cell must not sink the sweep
            row.update({"status": f"failed: {type(exc).__name__}", "detail": str(exc)})
        rows.append(row)
    ok = [r for r in rows if r["status"] == "ok"]
    bad = [r for r in rows if r["status"] != "ok"]
    ok.sort(key=lambda r: (-r["macro_f1"], r["num_vars"]))
    rows = ok + bad
    for row in rows:
        cc = row["config"]
        name = f"{cc['kernel']}:{cc['feature_map']}(q={cc['qubits']},r={cc['reps']})" \
            if cc["kernel"] == "quantum" else cc["kernel"]
        if row["status"] == "ok":
            print(f"F1 {row['macro_f1']:.4f}  KTA {row['kta']:.4f}  C={cc['c_value']}  {name}",
                  file=sys.stderr)
        else:
            print(f"{row['status']}  C={cc['c_value']}  {name}", file=sys.stderr)
    report = {
        "command": "grid",
        "config": config_dict(cfg),
        "subsample": sub_info,
        "rows": rows,
    }
    if cfg.output and cfg.output.endswith(".csv"):
        _write_grid_csv(rows, cfg.output)
    else:
        emit_report(report, cfg, timer)
    return 0


def _write_grid_csv(rows: list[dict], path) -> None:
    cols = ("status", "kernel", "qubits", "feature_map", "reps", "c_value",
            "kta", "macro_f1", "energy", "constraint_residual", "num_vars")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            cc = row["config"]
            vals = [
                row["status"],
                cc["kernel"], cc["qubits"], cc["feature_map"], cc["reps"], cc["c_value"],
                row.get("kta"), row.get("macro_f1"), row.get("energy"),
                row.get("constraint_residual"), row.get("num_vars"),
            ]
            fh.write(",".join("" if v is None else str(v) for v in vals) + "\n")


COMMANDS = {
    "kta": cmd_kta,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "grid": cmd_grid,
    "export-qubo": cmd_export_qubo,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"error in stage '{stage}': " if stage else "error: "
        print(f"{prefix}{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
