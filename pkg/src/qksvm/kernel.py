"""Gram matrices from feature-map state overlaps, classical reference kernels,
and kernel-target alignment."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import AlignmentUndefinedError
from .featuremaps import FeatureMapConfig, build_feature_map
from .simulator import DEFAULT_QUBIT_CAP, run_circuit


@dataclass
class KernelMatrix:
    """Symmetric n x n kernel matrix plus a record of how it was built."""

    values: np.ndarray
    provenance: dict[str, Any]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def has_unit_diagonal(self) -> bool:
        return self.provenance.get("kind") in ("quantum", "rbf")

    def validate(self, psd_tol: float = 1e-7) -> None:
        """Assert the structural invariants; raises ValueError on violation.

        Positive semidefiniteness is checked by attempting a Cholesky
        factorization of K + psd_tol*I, which succeeds exactly when the
        smallest eigenvalue is above -psd_tol (up to roundoff).
        """
        K = self.values
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValueError(f"kernel matrix must be square, got {K.shape}")
        if not np.all(np.isfinite(K)):
            raise ValueError("kernel matrix has non-finite entries")
        if np.max(np.abs(K - K.T)) > 1e-9:
            raise ValueError("kernel matrix is not symmetric within 1e-9")
        if self.has_unit_diagonal() and np.max(np.abs(np.diag(K) - 1.0)) > 1e-9:
            raise ValueError("kernel diagonal deviates from 1 by more than 1e-9")
        if self.provenance.get("kind") == "quantum":
            if K.min() < -1e-9 or K.max() > 1.0 + 1e-9:
                raise ValueError("fidelity kernel entries outside [0, 1]")
        shifted = K + psd_tol * np.eye(self.n)
        try:
            np.linalg.cholesky(shifted)
        except np.linalg.LinAlgError:
            raise ValueError(f"kernel matrix is not PSD within {psd_tol}") from None


def fidelity(
    x_i: np.ndarray,
    x_j: np.ndarray,
    cfg: FeatureMapConfig,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> float:
    """|<phi(x_i)|phi(x_j)>|^2, clamped into [0, 1]."""
    s_i = run_circuit(build_feature_map(cfg, x_i), qubit_cap)
    s_j = run_circuit(build_feature_map(cfg, x_j), qubit_cap)
    overlap = np.vdot(s_j.amplitudes, s_i.amplitudes)
    return float(min(1.0, max(0.0, abs(overlap) ** 2)))


def gram_matrix(
    X: np.ndarray,
    cfg: FeatureMapConfig,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> KernelMatrix:
    """Fidelity Gram matrix over the rows of X.

    Each statevector is prepared once (n circuit runs), then the n(n-1)/2
    pairwise overlaps are plain inner products; the upper triangle is mirrored
    so the result is symmetric by construction.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    states = [run_circuit(build_feature_map(cfg, X[i]), qubit_cap).amplitudes for i in range(n)]
    K = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            val = min(1.0, max(0.0, abs(np.vdot(states[j], states[i])) ** 2))
            K[i, j] = val
            K[j, i] = val
    provenance = {
        "kind": "quantum",
        "feature_map": cfg.kind,
        "num_qubits": cfg.num_qubits,
        "repetitions": cfg.repetitions,
    }
    return KernelMatrix(values=K, provenance=provenance)


def classical_kernel(kind: str, X: np.ndarray, gamma: float | None = None) -> KernelMatrix:
    """Reference kernels: linear K_ij = <x_i, x_j>; rbf K_ij = exp(-gamma*|x_i-x_j|^2).

    rbf gamma defaults to 1/d where d is the feature dimension.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if kind == "linear":
        K = X @ X.T
        K = 0.5 * (K + K.T)
        return KernelMatrix(values=K, provenance={"kind": "linear"})
    if kind == "rbf":
        if gamma is None:
            gamma = 1.0 / X.shape[1]
        if gamma <= 0:
            raise ValueError(f"rbf gamma must be positive, got {gamma}")
        sq = np.sum(X**2, axis=1)
        dist2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X @ X.T), 0.0)
        K = np.exp(-gamma * dist2)
        K = 0.5 * (K + K.T)
        np.fill_diagonal(K, 1.0)
        return KernelMatrix(values=K, provenance={"kind": "rbf", "gamma": float(gamma)})
    raise ValueError(f"unknown classical kernel {kind!r}; expected 'linear' or 'rbf'")


def kta(K: KernelMatrix | np.ndarray, y: np.ndarray) -> float:
    """Kernel-target alignment: y^T K y / (||K||_F * n)."""
    mat = K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if mat.shape != (n, n):
        raise ValueError(f"kernel shape {mat.shape} does not match {n} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    frob = float(np.linalg.norm(mat))
    if frob == 0.0:
        raise AlignmentUndefinedError("alignment undefined for the zero kernel matrix")
    return float(y @ mat @ y) / (frob * n)
