import math

import numpy as np
import pytest

from qksvm.errors import ResourceError
from qksvm.featuremaps import FeatureMapConfig, build_feature_map
from qksvm.simulator import (
    CircuitSpec,
    Gate,
    StateVector,
    concat_circuits,
    dump_state,
    inner_product,
    invert_circuit,
    run_circuit,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def test_h_on_zero():
    out = run_circuit(CircuitSpec(1, [Gate("H", (0,))]))
    assert np.allclose(out.amplitudes, [INV_SQRT2, INV_SQRT2])


def test_x_then_cx_gives_basis_11():
    circuit = CircuitSpec(2, [Gate("X", (0,)), Gate("CX", (0, 1))])
    out = run_circuit(circuit)
    expected = np.zeros(4)
    expected[0b11] = 1.0
    assert np.allclose(out.amplitudes, expected)


def test_phase_pi_after_h():
    out = run_circuit(CircuitSpec(1, [Gate("H", (0,)), Gate("P", (0,), math.pi)]))
    assert np.allclose(out.amplitudes, [INV_SQRT2, -INV_SQRT2])


def test_little_endian_convention():
    # X on qubit 0 flips the least significant amplitude-index bit
    out = run_circuit(CircuitSpec(2, [Gate("X", (0,))]))
    assert out.amplitudes[0b01] == 1.0
    out = run_circuit(CircuitSpec(2, [Gate("X", (1,))]))
    assert out.amplitudes[0b10] == 1.0


def test_cx_control_targets_either_order():
    # control above target and below target must both work
    for control, target in [(0, 2), (2, 0)]:
        circuit = CircuitSpec(3, [Gate("X", (control,)), Gate("CX", (control, target))])
        out = run_circuit(circuit)
        expected_index = (1 << control) | (1 << target)
        assert abs(out.amplitudes[expected_index]) == pytest.approx(1.0)


def test_cz_phase_only_on_11():
    circuit = CircuitSpec(
        2, [Gate("H", (0,)), Gate("H", (1,)), Gate("CZ", (0, 1))]
    )
    out = run_circuit(circuit)
    assert np.allclose(out.amplitudes, [0.5, 0.5, 0.5, -0.5])


def test_rotation_matrices_against_dense_matrices():
    # compare single-qubit rotations with their 2x2 matrix exponentials
    theta = 0.7321
    ry = np.array(
        [
            [math.cos(theta / 2), -math.sin(theta / 2)],
            [math.sin(theta / 2), math.cos(theta / 2)],
        ]
    )
    rx = np.array(
        [
            [math.cos(theta / 2), -1j * math.sin(theta / 2)],
            [-1j * math.sin(theta / 2), math.cos(theta / 2)],
        ]
    )
    rz = np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    for kind, mat in [("RY", ry), ("RX", rx), ("RZ", rz)]:
        out = run_circuit(CircuitSpec(1, [Gate("H", (0,)), Gate(kind, (0,), theta)]))
        assert np.allclose(out.amplitudes, mat @ h @ np.array([1, 0]))


def test_norm_preserved_by_random_circuits():
    rng = np.random.default_rng(11)
    for _ in range(20):
        q = int(rng.integers(1, 5))
        gates = []
        for _ in range(30):
            kind = rng.choice(["H", "X", "RX", "RY", "RZ", "P", "CX", "CZ"])
            if kind in ("CX", "CZ"):
                if q == 1:
                    continue
                t = rng.choice(q, size=2, replace=False)
                gates.append(Gate(kind, (int(t[0]), int(t[1]))))
            elif kind in ("RX", "RY", "RZ", "P"):
                gates.append(Gate(kind, (int(rng.integers(q)),), float(rng.uniform(-6, 6))))
            else:
                gates.append(Gate(kind, (int(rng.integers(q)),)))
        out = run_circuit(CircuitSpec(q, gates))
        assert out.norm() == pytest.approx(1.0, abs=1e-9)


def test_double_h_restores_state():
    rng = np.random.default_rng(5)
    x = rng.uniform(0, math.pi, 3)
    base = build_feature_map(FeatureMapConfig("zz", 3, 1), x)
    doubled = CircuitSpec(3, base.gates + tuple([Gate("H", (1,)), Gate("H", (1,))]))
    assert np.allclose(
        run_circuit(base).amplitudes, run_circuit(doubled).amplitudes, atol=1e-12
    )


def test_inner_product_basics():
    zero = run_circuit(CircuitSpec(1, []))
    one = run_circuit(CircuitSpec(1, [Gate("X", (0,))]))
    plus = run_circuit(CircuitSpec(1, [Gate("H", (0,))]))
    assert inner_product(zero, one) == 0
    assert inner_product(plus, zero) == pytest.approx(INV_SQRT2)
    for state in (zero, one, plus):
        assert inner_product(state, state) == pytest.approx(1.0, abs=1e-12)


def test_inner_product_dimension_mismatch():
    a = run_circuit(CircuitSpec(1, []))
    b = run_circuit(CircuitSpec(2, []))
    with pytest.raises(ValueError):
        inner_product(a, b)


def test_invert_rules():
    assert invert_circuit(CircuitSpec(1, [Gate("H", (0,))])).gates == (Gate("H", (0,)),)
    inv = invert_circuit(CircuitSpec(1, [Gate("RY", (0,), 0.5)]))
    assert inv.gates == (Gate("RY", (0,), -0.5),)
    seq = CircuitSpec(2, [Gate("H", (0,)), Gate("P", (1,), 0.3), Gate("CX", (0, 1))])
    inv = invert_circuit(seq)
    assert [g.kind for g in inv.gates] == ["CX", "P", "H"]
    assert inv.gates[1].angle == -0.3


@pytest.mark.parametrize("kind", ["z", "zz", "su2hr", "su2rr"])
def test_circuit_then_inverse_returns_to_zero(kind):
    rng = np.random.default_rng(17)
    for _ in range(5):
        x = rng.uniform(0, math.pi, 3)
        circuit = build_feature_map(FeatureMapConfig(kind, 3, 2), x)
        round_trip = concat_circuits(circuit, invert_circuit(circuit))
        out = run_circuit(round_trip)
        assert abs(out.amplitudes[0]) == pytest.approx(1.0, abs=1e-9)


def test_composite_equals_inner_product_fidelity():
    # the all-zero amplitude of phi(x_i);phi(x_j)^-1 carries the overlap
    rng = np.random.default_rng(23)
    cfg = FeatureMapConfig("zz", 2, 1)
    for _ in range(10):
        x_i, x_j = rng.uniform(0, math.pi, (2, 2))
        c_i = build_feature_map(cfg, x_i)
        c_j = build_feature_map(cfg, x_j)
        composite = concat_circuits(c_i, invert_circuit(c_j))
        amp0 = run_circuit(composite).amplitudes[0]
        overlap = inner_product(run_circuit(c_j), run_circuit(c_i))
        assert abs(amp0) ** 2 == pytest.approx(abs(overlap) ** 2, abs=1e-10)


def test_qubit_cap():
    with pytest.raises(ResourceError):
        run_circuit(CircuitSpec(25, []))
    with pytest.raises(ResourceError):
        run_circuit(CircuitSpec(5, []), qubit_cap=4)
    out = run_circuit(CircuitSpec(5, []), qubit_cap=5)
    assert out.amplitudes.shape == (32,)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("H", (0, 1))
    with pytest.raises(ValueError):
        Gate("CX", (1, 1))
    with pytest.raises(ValueError):
        Gate("RY", (0,))
    with pytest.raises(ValueError):
        Gate("RY", (0,), float("nan"))
    with pytest.raises(ValueError):
        Gate("H", (0,), 0.4)
    with pytest.raises(ValueError):
        CircuitSpec(1, [Gate("H", (1,))])


def test_dump_state_format():
    out = run_circuit(CircuitSpec(2, [Gate("H", (0,))]))
    lines = dump_state(out).splitlines()
    assert len(lines) == 2
    idx, real, imag = lines[0].split()
    assert idx == "0"
    assert float(real) == pytest.approx(INV_SQRT2)
    assert float(imag) == 0.0


def test_statevector_dataclass():
    sv = StateVector(np.array([1.0 + 0j, 0.0]), 1)
    assert sv.norm() == 1.0
