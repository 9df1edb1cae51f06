"""Compiles the kernel SVM dual into a QUBO over binary-expanded multipliers.

The continuous objective being minimized is

    E(alpha) = 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
               - sum_i alpha_i
               + penalty * (sum_i alpha_i y_i)^2

with each multiplier written as alpha_i = sum_k 2^k a_{i,k} over b bits, so
alpha_i ranges over the integers [0, C] with C = 2^b - 1. Variable (i, k) maps
to flat index i*b + k. Coefficients are stored upper-triangular with the
symmetric off-diagonal terms folded in by doubling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def bits_for(c_value: int) -> int:
    """Number of bits b with C = 2^b - 1; rejects C+1 not a power of two.

    Restricting C this way keeps every bit combination meaningful: the encoded
    integers cover [0, C] exactly.
    """
    if c_value < 1:
        raise ValueError(f"C must be positive, got {c_value}")
    succ = c_value + 1
    if succ & (succ - 1):
        raise ValueError(f"C + 1 must be a power of two, got C = {c_value}")
    return succ.bit_length() - 1


@dataclass(frozen=True)
class QuboEncoding:
    n: int
    bits: int

    @property
    def c_value(self) -> int:
        return (1 << self.bits) - 1

    @property
    def num_vars(self) -> int:
        return self.n * self.bits


@dataclass
class QuboProblem:
    """Upper-triangular QUBO coefficients plus the decode metadata."""

    num_vars: int
    coefficients: dict[tuple[int, int], float]
    encoding: QuboEncoding
    penalty: float
    labels: np.ndarray

    def __post_init__(self):
        for p, q in self.coefficients:
            if not (0 <= p <= q < self.num_vars):
                raise ValueError(f"coefficient index ({p}, {q}) out of range")


@dataclass
class BinarySolution:
    bits: np.ndarray
    energy: float


def build_qubo(K, y: np.ndarray, c_value: int, penalty: float) -> QuboProblem:
    """Expand the dual objective over bit variables.

    With p = i*b + k and p' = j*b + l, the folded upper-triangular
    coefficients are

        Q_pp   = 2^(2k) * (K_ii / 2 + penalty) - 2^k
        Q_pp'  = 2^(k+l) * y_i * y_j * (K_ij + 2*penalty)   for p < p'

    (cross terms between bits of the same alpha_i use K_ii). The all-zero
    assignment always has energy 0: there is no constant term.
    """
    mat = np.asarray(getattr(K, "values", K), dtype=float)
    y = np.asarray(y, dtype=int)
    n = y.shape[0]
    if mat.shape != (n, n):
        raise ValueError(f"kernel shape {mat.shape} does not match {n} labels")
    if penalty < 0:
        raise ValueError(f"penalty must be >= 0, got {penalty}")
    b = bits_for(c_value)
    coeffs: dict[tuple[int, int], float] = {}
    weights = [float(1 << k) for k in range(b)]
    for i in range(n):
        for k in range(b):
            p = i * b + k
            val = weights[k] * weights[k] * (0.5 * mat[i, i] + penalty) - weights[k]
            if val != 0.0:
                coeffs[(p, p)] = val
    for i in range(n):
        for j in range(i, n):
            pair = float(y[i] * y[j]) * (mat[i, j] + 2.0 * penalty)
            if pair == 0.0:
                continue
            for k in range(b):
                l_start = k + 1 if i == j else 0
                for l in range(l_start, b):
                    val = weights[k] * weights[l] * pair
                    coeffs[(i * b + k, j * b + l)] = val
    return QuboProblem(
        num_vars=n * b,
        coefficients=coeffs,
        encoding=QuboEncoding(n=n, bits=b),
        penalty=float(penalty),
        labels=y.copy(),
    )


def energy(problem: QuboProblem, bits) -> float:
    """Sum of Q_pq * bits_p * bits_q over the stored upper triangle."""
    bits = np.asarray(bits, dtype=int)
    if bits.shape != (problem.num_vars,):
        raise ValueError(f"expected {problem.num_vars} bits, got shape {bits.shape}")
    total = 0.0
    for (p, q), val in problem.coefficients.items():
        if bits[p] and bits[q]:
            total += val
    return total


def decode(problem: QuboProblem, solution: BinarySolution) -> np.ndarray:
    """Recover the integer multipliers alpha_i = sum_k 2^k bits_{i*b+k}."""
    b = problem.encoding.bits
    bits = np.asarray(solution.bits, dtype=int).reshape(problem.encoding.n, b)
    powers = 1 << np.arange(b)
    return bits @ powers


def encode(problem: QuboProblem, alphas) -> np.ndarray:
    """Inverse of decode: bit pattern for integer multipliers in [0, C]."""
    alphas = np.asarray(alphas, dtype=int)
    enc = problem.encoding
    if alphas.shape != (enc.n,):
        raise ValueError(f"expected {enc.n} multipliers, got shape {alphas.shape}")
    if alphas.min(initial=0) < 0 or alphas.max(initial=0) > enc.c_value:
        raise ValueError(f"multipliers must lie in [0, {enc.c_value}]")
    bits = (alphas[:, None] >> np.arange(enc.bits)[None, :]) & 1
    return bits.reshape(-1)


def dual_objective(K, y: np.ndarray, alphas: np.ndarray, penalty: float) -> float:
    """The continuous objective the QUBO encodes, evaluated directly."""
    mat = np.asarray(getattr(K, "values", K), dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.asarray(alphas, dtype=float)
    ya = a * y
    return float(0.5 * ya @ mat @ ya - a.sum() + penalty * (ya.sum()) ** 2)


def dense_form(problem: QuboProblem) -> tuple[np.ndarray, np.ndarray]:
    """(symmetric coupling matrix with zero diagonal, diagonal vector)."""
    m = problem.num_vars
    W = np.zeros((m, m))
    h = np.zeros(m)
    for (p, q), val in problem.coefficients.items():
        if p == q:
            h[p] = val
        else:
            W[p, q] = val
            W[q, p] = val
    return W, h
