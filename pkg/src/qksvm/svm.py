"""Classifier assembly: bias recovery from decoded multipliers, the kernel
decision function, evaluation metrics, the training orchestration, and model
persistence."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .anneal import AnnealSchedule, solve_sa
from .data import AngleScaler, Dataset, PcaModel, Preprocessing, fit_preprocessing
from .errors import ModelFormatError
from .featuremaps import FeatureMapConfig, build_feature_map
from .kernel import classical_kernel, gram_matrix
from .qubo import BinarySolution, QuboProblem, build_qubo, decode, energy
from .simulator import DEFAULT_QUBIT_CAP, run_circuit

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClassicalKernelConfig:
    kind: str  # "linear" or "rbf"
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown classical kernel {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "rbf":
            return f"rbf(gamma={self.gamma})"
        return "linear"


KernelConfig = FeatureMapConfig | ClassicalKernelConfig


@dataclass
class Metrics:
    """Confusion counts (+1 is the positive class) and derived scores."""

    tp: int
    fp: int
    fn: int
    tn: int

    @staticmethod
    def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        return precision, recall, f1

    @property
    def positive(self) -> tuple[float, float, float]:
        return self._prf(self.tp, self.fp, self.fn)

    @property
    def negative(self) -> tuple[float, float, float]:
        # the negative class's "true positives" are the true negatives
        return self._prf(self.tn, self.fn, self.fp)

    @property
    def macro_f1(self) -> float:
        return 0.5 * (self.positive[2] + self.negative[2])

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.fn + self.tn
        return (self.tp + self.tn) / total if total else 0.0

    def to_dict(self) -> dict:
        pos_p, pos_r, pos_f1 = self.positive
        neg_p, neg_r, neg_f1 = self.negative
        return {
            "confusion": {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn},
            "positive": {"precision": pos_p, "recall": pos_r, "f1": pos_f1},
            "negative": {"precision": neg_p, "recall": neg_r, "f1": neg_f1},
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
        }


@dataclass
class SvmModel:
    """Everything needed for standalone inference.

    Support vectors are kept in raw (pre-preprocessing) form together with the
    fitted preprocessing, so a saved model is self-contained.
    """

    alphas: np.ndarray
    bias: float
    support_vectors: np.ndarray
    support_labels: np.ndarray
    support_alphas: np.ndarray
    kernel_config: KernelConfig
    preprocessing: Preprocessing
    c_value: int
    penalty: float
    use_bias: bool = True
    qubit_cap: int = DEFAULT_QUBIT_CAP
    diagnostics: dict | None = field(default=None, repr=False, compare=False)
    _support_states: list | None = field(default=None, repr=False, compare=False)

    def _preprocessed_supports(self) -> np.ndarray:
        return self.preprocessing.apply(self.support_vectors) if len(self.support_vectors) else np.zeros((0, self.preprocessing.output_dim))

    def _quantum_support_states(self) -> list:
        if self._support_states is None:
            sv = self._preprocessed_supports()
            self._support_states = [
                run_circuit(build_feature_map(self.kernel_config, row), self.qubit_cap).amplitudes
                for row in sv
            ]
        return self._support_states


def compute_bias(alphas: np.ndarray, y: np.ndarray, K, c_value: int) -> float:
    """Average of y_j - sum_i alpha_i y_i K_ij over margin support vectors
    (0 < alpha < C), falling back to all alpha > 0, then to 0."""
    mat = np.asarray(getattr(K, "values", K), dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    y = np.asarray(y, dtype=float)
    margin = np.flatnonzero((alphas > 0) & (alphas < c_value))
    if margin.size == 0:
        margin = np.flatnonzero(alphas > 0)
    if margin.size == 0:
        return 0.0
    weighted = alphas * y
    return float(np.mean(y[margin] - mat[:, margin].T @ weighted))


def _kernel_against_supports(model: SvmModel, features: np.ndarray) -> np.ndarray:
    """Rows of k(x, sv_i) for each preprocessed input row x."""
    cfg = model.kernel_config
    if isinstance(cfg, FeatureMapConfig):
        states = model._quantum_support_states()
        out = np.zeros((features.shape[0], len(states)))
        for r, row in enumerate(features):
            state = run_circuit(build_feature_map(cfg, row), model.qubit_cap).amplitudes
            for c, sv_state in enumerate(states):
                out[r, c] = min(1.0, max(0.0, abs(np.vdot(sv_state, state)) ** 2))
        return out
    sv = model._preprocessed_supports()
    if cfg.kind == "linear":
        return features @ sv.T
    diff2 = (
        np.sum(features**2, axis=1)[:, None]
        + np.sum(sv**2, axis=1)[None, :]
        - 2.0 * features @ sv.T
    )
    return np.exp(-cfg.gamma * np.maximum(diff2, 0.0))


def decision_values(model: SvmModel, raw_features: np.ndarray) -> np.ndarray:
    """f(x) = sum_i alpha_i y_i k(x, x_i) + bias for each input row."""
    raw_features = np.atleast_2d(np.asarray(raw_features, dtype=float))
    if not np.all(np.isfinite(raw_features)):
        raise ValueError("inputs contain non-finite values")
    features = model.preprocessing.apply(raw_features)
    if len(model.support_alphas) == 0:
        return np.full(raw_features.shape[0], model.bias)
    kvals = _kernel_against_supports(model, features)
    weights = model.support_alphas.astype(float) * model.support_labels.astype(float)
    return kvals @ weights + model.bias


def decision_value(model: SvmModel, x_raw) -> float:
    return float(decision_values(model, np.atleast_2d(x_raw))[0])


def predict(model: SvmModel, x_raw) -> int:
    value = decision_value(model, x_raw)
    return 1 if value >= 0.0 else -1  # exact ties go to +1


def predict_many(model: SvmModel, raw_features: np.ndarray) -> np.ndarray:
    values = decision_values(model, raw_features)
    return np.where(values >= 0.0, 1, -1)


def evaluate(model: SvmModel, test: Dataset) -> Metrics:
    if test.n < 1:
        raise ValueError("cannot evaluate on an empty dataset")
    predicted = predict_many(model, test.features)
    actual = test.labels
    return Metrics(
        tp=int(np.sum((predicted == 1) & (actual == 1))),
        fp=int(np.sum((predicted == 1) & (actual == -1))),
        fn=int(np.sum((predicted == -1) & (actual == 1))),
        tn=int(np.sum((predicted == -1) & (actual == -1))),
    )


def train(
    train_ds: Dataset,
    kernel_config: KernelConfig,
    c_value: int,
    penalty: float,
    schedule: AnnealSchedule,
    preprocessing: Preprocessing | None = None,
    solver: Callable[[QuboProblem, AnnealSchedule], BinarySolution] = solve_sa,
    use_bias: bool = True,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> SvmModel:
    """Gram matrix -> QUBO -> anneal -> decode -> bias.

    When no fitted preprocessing is passed, one is fitted here on the training
    set: standardize, PCA down to the qubit count for quantum kernels, and
    angle-scale into [0, pi] (quantum kernels only; classical kernels need no
    bounded phases). With use_bias=False both the bias and the
    equality-constraint penalty are dropped.
    """
    train_ds.require_both_classes("training")
    if preprocessing is None:
        quantum = isinstance(kernel_config, FeatureMapConfig)
        preprocessing = fit_preprocessing(
            train_ds,
            q=kernel_config.num_qubits if quantum else None,
            with_angle=quantum,
        )
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    features = preprocessing.apply(train_ds.features)
    if isinstance(kernel_config, FeatureMapConfig):
        if features.shape[1] != kernel_config.num_qubits:
            raise ValueError(
                f"preprocessed dimension {features.shape[1]} does not match "
                f"{kernel_config.num_qubits} qubits"
            )
        kernel = gram_matrix(features, kernel_config, qubit_cap)
    else:
        kernel = classical_kernel(kernel_config.kind, features, kernel_config.gamma)
        if kernel_config.kind == "rbf" and kernel_config.gamma is None:
            kernel_config = ClassicalKernelConfig("rbf", kernel.provenance["gamma"])
    timings["kernel"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    effective_penalty = penalty if use_bias else 0.0
    problem = build_qubo(kernel, train_ds.labels, c_value, effective_penalty)
    timings["qubo"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    solution = solver(problem, schedule)
    timings["solve"] = time.perf_counter() - t0
    alphas = decode(problem, solution)
    bias = compute_bias(alphas, train_ds.labels, kernel, c_value) if use_bias else 0.0
    mask = alphas > 0
    model = SvmModel(
        alphas=alphas,
        bias=bias,
        support_vectors=train_ds.features[mask].copy(),
        support_labels=train_ds.labels[mask].copy(),
        support_alphas=alphas[mask].copy(),
        kernel_config=kernel_config,
        preprocessing=preprocessing,
        c_value=c_value,
        penalty=float(penalty),
        use_bias=use_bias,
        qubit_cap=qubit_cap,
        diagnostics={
            "kernel": kernel,
            "problem": problem,
            "solver_energy": solution.energy,
            "constraint_residual": float(np.sum(alphas * train_ds.labels)),
            "num_vars": problem.num_vars,
            "timings": timings,
        },
    )
    assert abs(energy(problem, solution.bits) - solution.energy) <= 1e-9
    return model


# ---------------------------------------------------------------------------
# persistence

def _format_value(value, indent: int) -> str:
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{pad}  "{k}": {_format_value(v, indent + 2)}' for k, v in sorted(value.items())
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if len(value) == 0:
            return "[]"
        inner = ", ".join(_format_value(v, indent) for v in value)
        return "[" + inner + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value)}")


def dumps_17g(obj: dict) -> str:
    """JSON text with every real emitted at 17 significant digits (exact
    round-trip for doubles)."""
    return _format_value(obj, 0) + "\n"


def _kernel_config_dict(cfg: KernelConfig) -> dict:
    if isinstance(cfg, FeatureMapConfig):
        return {
            "kind": "quantum",
            "feature_map": cfg.kind,
            "num_qubits": cfg.num_qubits,
            "repetitions": cfg.repetitions,
        }
    out = {"kind": cfg.kind}
    if cfg.kind == "rbf":
        out["gamma"] = cfg.gamma
    return out


def _kernel_config_from_dict(raw: dict) -> KernelConfig:
    if raw["kind"] == "quantum":
        return FeatureMapConfig(
            kind=raw["feature_map"],
            num_qubits=int(raw["num_qubits"]),
            repetitions=int(raw["repetitions"]),
        )
    if raw["kind"] == "rbf":
        return ClassicalKernelConfig("rbf", float(raw["gamma"]))
    return ClassicalKernelConfig(raw["kind"])


def save_model(model: SvmModel, path) -> None:
    pre = model.preprocessing
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "kernel_config": _kernel_config_dict(model.kernel_config),
        "c_value": model.c_value,
        "penalty": model.penalty,
        "use_bias": model.use_bias,
        "alphas": [int(a) for a in model.alphas],
        "bias": model.bias,
        "support_vectors": [list(row) for row in model.support_vectors],
        "support_labels": [int(v) for v in model.support_labels],
        "preprocessing": {
            "mean": list(pre.mean),
            "std": list(pre.std),
            "pca_mean": list(pre.pca.mean) if pre.pca is not None else None,
            "pca_components": [list(r) for r in pre.pca.components] if pre.pca is not None else None,
            "angle_min": list(pre.angle.feature_min) if pre.angle is not None else None,
            "angle_max": list(pre.angle.feature_max) if pre.angle is not None else None,
        },
    }
    with open(path, "w") as fh:
        fh.write(dumps_17g(payload))


def load_model(path) -> SvmModel:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file {path} is not valid JSON: {exc}") from None
    version = raw.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"model file {path} has version {version!r}; this build reads version {MODEL_FORMAT_VERSION}"
        )
    try:
        pre_raw = raw["preprocessing"]
        pca = None
        if pre_raw["pca_components"] is not None:
            components = np.array(pre_raw["pca_components"], dtype=float)
            pca = PcaModel(
                mean=np.array(pre_raw["pca_mean"], dtype=float),
                components=components,
                explained_variance_ratio=np.zeros(components.shape[0]),
            )
        angle = None
        if pre_raw["angle_min"] is not None:
            angle = AngleScaler(
                feature_min=np.array(pre_raw["angle_min"], dtype=float),
                feature_max=np.array(pre_raw["angle_max"], dtype=float),
            )
        preprocessing = Preprocessing(
            mean=np.array(pre_raw["mean"], dtype=float),
            std=np.array(pre_raw["std"], dtype=float),
            pca=pca,
            angle=angle,
        )
        alphas = np.array(raw["alphas"], dtype=int)
        c_value = int(raw["c_value"])
        if alphas.size and (alphas.min() < 0 or alphas.max() > c_value):
            raise ValueError(f"alphas must lie in [0, {c_value}]")
        support_vectors = np.array(raw["support_vectors"], dtype=float)
        if support_vectors.size == 0:
            support_vectors = np.zeros((0, preprocessing.input_dim))
        support_labels = np.array(raw["support_labels"], dtype=int)
        model = SvmModel(
            alphas=alphas,
            bias=float(raw["bias"]),
            support_vectors=support_vectors,
            support_labels=support_labels,
            support_alphas=alphas[alphas > 0].copy(),
            kernel_config=_kernel_config_from_dict(raw["kernel_config"]),
            preprocessing=preprocessing,
            c_value=c_value,
            penalty=float(raw["penalty"]),
            use_bias=bool(raw.get("use_bias", True)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"model file {path} is malformed: {exc}") from None
    return model
