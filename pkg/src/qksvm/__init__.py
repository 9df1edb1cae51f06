"""Quantum-kernel SVM trained by QUBO annealing, simulated classically.

The pipeline: encode data through a parameterized feature-map circuit, build
the fidelity Gram matrix by exact statevector simulation, score kernels with
kernel-target alignment, compile the SVM dual to a QUBO over binary-expanded
multipliers, solve it with restart-based simulated annealing, and evaluate
the resulting classifier.
"""

__version__ = "0.1.0"

from .anneal import AnnealSchedule, brute_force, export_qubo, import_qubo, solve_sa
from .data import (
    AngleScaler,
    Dataset,
    PcaModel,
    Preprocessing,
    fit_preprocessing,
    load_simple_csv,
    load_wdbc,
    prime_seeds,
    split,
    subsample,
)
from .featuremaps import FeatureMapConfig, build_feature_map
from .kernel import KernelMatrix, classical_kernel, fidelity, gram_matrix, kta
from .qubo import BinarySolution, QuboProblem, bits_for, build_qubo, decode, encode, energy
from .simulator import CircuitSpec, Gate, StateVector, inner_product, invert_circuit, run_circuit
from .svm import (
    ClassicalKernelConfig,
    Metrics,
    SvmModel,
    compute_bias,
    decision_value,
    evaluate,
    load_model,
    predict,
    save_model,
    train,
)

__all__ = [
    "AnnealSchedule",
    "AngleScaler",
    "BinarySolution",
    "CircuitSpec",
    "ClassicalKernelConfig",
    "Dataset",
    "FeatureMapConfig",
    "Gate",
    "KernelMatrix",
    "Metrics",
    "PcaModel",
    "Preprocessing",
    "QuboProblem",
    "StateVector",
    "SvmModel",
    "bits_for",
    "brute_force",
    "build_feature_map",
    "build_qubo",
    "classical_kernel",
    "compute_bias",
    "decision_value",
    "decode",
    "encode",
    "energy",
    "evaluate",
    "export_qubo",
    "fidelity",
    "fit_preprocessing",
    "gram_matrix",
    "import_qubo",
    "inner_product",
    "invert_circuit",
    "kta",
    "load_model",
    "load_simple_csv",
    "load_wdbc",
    "predict",
    "prime_seeds",
    "run_circuit",
    "save_model",
    "solve_sa",
    "split",
    "subsample",
    "train",
]
