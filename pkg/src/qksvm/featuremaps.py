"""Parameterized encoding circuits mapping a classical vector to a quantum state.

Four families are supported, each repeated `repetitions` times:

  z      per qubit i: H, then P(2*x_i)
  zz     the z layer, then for every pair i<j the entangling sandwich
         CX(i->j), P(2*(pi-x_i)*(pi-x_j)) on j, CX(i->j)
  su2hr  H on every qubit, RY(x_i) on qubit i, then the chain CX(i->i+1)
  su2rr  per qubit i: RY(x_i) then RZ(x_i), then the chain CX(i->i+1)

Inputs are consumed directly as radians; the data pipeline scales features
into [0, pi] before they reach a feature map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import CircuitSpec, Gate

FEATURE_MAP_KINDS = ("z", "zz", "su2hr", "su2rr")


@dataclass(frozen=True)
class FeatureMapConfig:
    kind: str
    num_qubits: int
    repetitions: int = 1

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in FEATURE_MAP_KINDS:
            raise ValueError(f"unknown feature map {self.kind!r}; expected one of {FEATURE_MAP_KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    def describe(self) -> str:
        return f"{self.kind}(q={self.num_qubits},r={self.repetitions})"


def gate_count(cfg: FeatureMapConfig) -> int:
    """Exact gate count of build_feature_map for this configuration."""
    q, r = cfg.num_qubits, cfg.repetitions
    if cfg.kind == "z":
        per_rep = 2 * q
    elif cfg.kind == "zz":
        per_rep = 2 * q + 3 * (q * (q - 1) // 2)
    else:  # su2hr, su2rr: a 2q rotation layer plus the CX chain
        per_rep = 2 * q + (q - 1)
    return r * per_rep


def build_feature_map(cfg: FeatureMapConfig, x: np.ndarray) -> CircuitSpec:
    """Build the encoding circuit for input vector x (len(x) == num_qubits)."""
    x = np.asarray(x, dtype=float)
    q = cfg.num_qubits
    if x.shape != (q,):
        raise ValueError(f"input of shape {x.shape} does not match {q} qubits")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature map input has non-finite entries")

    gates: list[Gate] = []
    for _ in range(cfg.repetitions):
        if cfg.kind in ("z", "zz"):
            gates.extend(Gate("H", (i,)) for i in range(q))
            gates.extend(Gate("P", (i,), 2.0 * x[i]) for i in range(q))
            if cfg.kind == "zz":
                for i in range(q):
                    for j in range(i + 1, q):
                        phase = 2.0 * (math.pi - x[i]) * (math.pi - x[j])
                        gates.append(Gate("CX", (i, j)))
                        gates.append(Gate("P", (j,), phase))
                        gates.append(Gate("CX", (i, j)))
        elif cfg.kind == "su2hr":
            gates.extend(Gate("H", (i,)) for i in range(q))
            gates.extend(Gate("RY", (i,), x[i]) for i in range(q))
            gates.extend(Gate("CX", (i, i + 1)) for i in range(q - 1))
        else:  # su2rr
            for i in range(q):
                gates.append(Gate("RY", (i,), x[i]))
                gates.append(Gate("RZ", (i,), x[i]))
            gates.extend(Gate("CX", (i, i + 1)) for i in range(q - 1))
    return CircuitSpec(q, tuple(gates))
