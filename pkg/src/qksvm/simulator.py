"""Dense statevector simulation of the small gate set used by the feature maps.

Qubit indexing is little-endian: qubit 0 is the least significant bit of the
amplitude index. A single-qubit gate on qubit t therefore acts along axis 1 of
the state viewed as shape (2^(q-1-t), 2, 2^t), which keeps every gate an O(2^q)
vectorized update on the contiguous amplitude buffer.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError

# 2^24 amplitudes = 256 MB of complex128; anything larger must be opted into.
DEFAULT_QUBIT_CAP = 24

ROTATION_KINDS = frozenset({"RX", "RY", "RZ", "P"})
GATE_KINDS = frozenset({"H", "X", "CX", "CZ"}) | ROTATION_KINDS

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One gate application: kind, target qubit(s), optional angle in radians."""

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets = 2 if self.kind in ("CX", "CZ") else 1
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} takes {n_targets} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind} targets must be distinct: {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative qubit index in {self.targets}")
        if self.kind in ROTATION_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle, got {self.angle}")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")

    def adjoint(self) -> "Gate":
        if self.kind in ROTATION_KINDS:
            return Gate(self.kind, self.targets, -self.angle)
        return self  # H, X, CX, CZ are self-adjoint


@dataclass(frozen=True)
class CircuitSpec:
    """An ordered gate list over a fixed number of qubits."""

    num_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.num_qubits:
                raise ValueError(f"gate {g} out of range for {self.num_qubits} qubits")


@dataclass
class StateVector:
    """Complex amplitudes of a q-qubit register, little-endian indexed."""

    amplitudes: np.ndarray
    num_qubits: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _apply_1q(amps: np.ndarray, matrix: np.ndarray, target: int) -> None:
    view = amps.reshape(-1, 2, 1 << target)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = matrix[0, 0] * lo + matrix[0, 1] * hi
    view[:, 1, :] = matrix[1, 0] * lo + matrix[1, 1] * hi


def _apply_phase(amps: np.ndarray, target: int, phase0: complex, phase1: complex) -> None:
    view = amps.reshape(-1, 2, 1 << target)
    if phase0 != 1.0:
        view[:, 0, :] *= phase0
    view[:, 1, :] *= phase1


def _apply_cx(amps: np.ndarray, control: int, target: int) -> None:
    # axes of the view: (above hi, bit hi, between, bit lo, below lo)
    hi, lo = max(control, target), min(control, target)
    view = amps.reshape(-1, 2, (1 << (hi - lo - 1)), 2, 1 << lo)
    if control == hi:
        a = view[:, 1, :, 0, :].copy()
        view[:, 1, :, 0, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = a
    else:
        a = view[:, 0, :, 1, :].copy()
        view[:, 0, :, 1, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = a


def _apply_cz(amps: np.ndarray, control: int, target: int) -> None:
    hi, lo = max(control, target), min(control, target)
    view = amps.reshape(-1, 2, (1 << (hi - lo - 1)), 2, 1 << lo)
    view[:, 1, :, 1, :] *= -1.0


def apply_gate(amps: np.ndarray, gate: Gate) -> None:
    """Apply one gate in place to a flat amplitude buffer."""
    kind = gate.kind
    if kind == "H":
        _apply_1q(amps, _H, gate.targets[0])
    elif kind == "X":
        _apply_1q(amps, _X, gate.targets[0])
    elif kind == "P":
        _apply_phase(amps, gate.targets[0], 1.0, cmath.exp(1j * gate.angle))
    elif kind == "RZ":
        half = 0.5 * gate.angle
        _apply_phase(amps, gate.targets[0], cmath.exp(-1j * half), cmath.exp(1j * half))
    elif kind == "RY":
        half = 0.5 * gate.angle
        c, s = math.cos(half), math.sin(half)
        _apply_1q(amps, np.array([[c, -s], [s, c]], dtype=complex), gate.targets[0])
    elif kind == "RX":
        half = 0.5 * gate.angle
        c, s = math.cos(half), math.sin(half)
        _apply_1q(amps, np.array([[c, -1j * s], [-1j * s, c]], dtype=complex), gate.targets[0])
    elif kind == "CX":
        _apply_cx(amps, gate.targets[0], gate.targets[1])
    elif kind == "CZ":
        _apply_cz(amps, gate.targets[0], gate.targets[1])
    else:  # pragma: no cover - Gate validation forbids this
        raise ValueError(f"unknown gate kind {kind!r}")


def run_circuit(circuit: CircuitSpec, qubit_cap: int = DEFAULT_QUBIT_CAP) -> StateVector:
    """Apply the circuit to |0...0> and return the resulting state.

    Raises ResourceError when the circuit needs more qubits than `qubit_cap`
    (2^30 amplitudes is a ~17 GB allocation; nobody gets that by accident).
    """
    q = circuit.num_qubits
    if q > qubit_cap:
        raise ResourceError(
            f"{q} qubits exceeds the cap of {qubit_cap}; "
            "raise the cap explicitly to run this circuit"
        )
    amps = np.zeros(1 << q, dtype=complex)
    amps[0] = 1.0
    for gate in circuit.gates:
        apply_gate(amps, gate)
    return StateVector(amplitudes=amps, num_qubits=q)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum_k conj(a_k) * b_k."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit mismatch: {a.num_qubits} vs {b.num_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def invert_circuit(circuit: CircuitSpec) -> CircuitSpec:
    """Adjoint circuit: gates reversed, each replaced by its adjoint."""
    return CircuitSpec(circuit.num_qubits, tuple(g.adjoint() for g in reversed(circuit.gates)))


def concat_circuits(first: CircuitSpec, second: CircuitSpec) -> CircuitSpec:
    if first.num_qubits != second.num_qubits:
        raise ValueError("cannot concatenate circuits over different qubit counts")
    return CircuitSpec(first.num_qubits, first.gates + second.gates)


def dump_state(state: StateVector, threshold: float = 1e-12) -> str:
    """Debug dump: one line "index real imag" per amplitude above threshold."""
    lines = []
    for idx, amp in enumerate(state.amplitudes):
        if abs(amp) > threshold:
            lines.append(f"{idx} {float(amp.real)!r} {float(amp.imag)!r}")
    return "\n".join(lines)
