"""Restart-based simulated annealing for QUBO instances, an exhaustive oracle
for small instances, and a text export for hand-off to external solvers.

The Metropolis sweep keeps a cached local-field vector f where
f_p = Q_pp + sum_{q != p} Q~_pq s_q, so a flip costs O(1) to score and O(m)
only when accepted. All randomness is drawn up front from per-restart
numpy Generator streams, which makes the jitted core a pure function of its
arrays: results are bitwise reproducible for a fixed (problem, schedule, seed)
whether or not the JIT is enabled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ResourceError
from .qubo import BinarySolution, QuboProblem, QuboEncoding, dense_form, energy

BRUTE_FORCE_CAP = 24
_SEED_MASK = (1 << 63) - 1


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric inverse-temperature ramp with independent restarts."""

    sweeps: int = 2000
    beta_start: float = 0.1
    beta_end: float = 10.0
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not (0 < self.beta_start <= self.beta_end):
            raise ValueError("need 0 < beta_start <= beta_end")

    def betas(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.beta_end])
        return np.geomspace(self.beta_start, self.beta_end, self.sweeps)


@njit(cache=True)
def _sweep_core(W, h, bits, order, unif, betas):  # pragma: no cover - jitted
    m = bits.shape[0]
    f = h + W @ bits.astype(np.float64)
    e = 0.0
    for p in range(m):
        if bits[p]:
            e += h[p]
            for q in range(p + 1, m):
                if bits[q]:
                    e += W[p, q]
    best_e = e
    best_bits = bits.copy()
    for t in range(order.shape[0]):
        beta = betas[t]
        for s in range(m):
            p = order[t, s]
            ds = 1 - 2 * bits[p]
            de = ds * f[p]
            if de <= 0.0 or unif[t, s] < math.exp(-beta * de):
                bits[p] += ds
                e += de
                dsf = float(ds)
                for q in range(m):
                    f[q] += W[q, p] * dsf
                if e < best_e:
                    best_e = e
                    best_bits[:] = bits
    return best_bits, best_e


def _sweep_python(W, h, bits, order, unif, betas, check_every=1024):
    """Pure-python twin of the jitted core; spot-checks the cached energy
    against a full recomputation every `check_every` accepted flips."""
    m = bits.shape[0]
    f = h + W @ bits.astype(np.float64)
    e = float(bits @ h + 0.5 * bits @ (W @ bits))
    best_e = e
    best_bits = bits.copy()
    accepted = 0
    for t in range(order.shape[0]):
        beta = betas[t]
        for s in range(m):
            p = order[t, s]
            ds = 1 - 2 * bits[p]
            de = ds * f[p]
            if de <= 0.0 or unif[t, s] < math.exp(-beta * de):
                bits[p] += ds
                e += de
                f += W[:, p] * float(ds)
                accepted += 1
                if accepted % check_every == 0:
                    full = float(bits @ h + 0.5 * bits @ (W @ bits))
                    if abs(e - full) > 1e-9 * max(1.0, abs(full)):
                        raise AssertionError(
                            f"incremental energy drifted: cached {e!r} vs {full!r}"
                        )
                if e < best_e:
                    best_e = e
                    best_bits[:] = bits
    return best_bits, best_e


def solve_sa(problem: QuboProblem, schedule: AnnealSchedule, debug: bool = False) -> BinarySolution:
    """Best-of-restarts Metropolis single-bit-flip annealing.

    Each restart runs on its own Generator stream seeded with
    schedule.seed + restart index; the best assignment over all restarts wins,
    earlier restarts winning ties. The returned energy is recomputed from the
    coefficient map, so it always matches energy() exactly.
    """
    if problem.num_vars < 1:
        raise ValueError("problem must have at least one variable")
    W, h = dense_form(problem)
    betas = schedule.betas()
    m = problem.num_vars
    core = _sweep_python if debug else _sweep_core
    best_bits, best_e = None, math.inf
    for restart in range(schedule.restarts):
        rng = np.random.default_rng((schedule.seed + restart) & _SEED_MASK)
        bits = rng.integers(0, 2, size=m, dtype=np.int64)
        order = np.argsort(rng.random((schedule.sweeps, m)), axis=1).astype(np.int64)
        unif = rng.random((schedule.sweeps, m))
        run_bits, run_e = core(W, h, bits, order, unif, betas)
        if run_e < best_e:
            best_e = run_e
            best_bits = run_bits
    final = energy(problem, best_bits)
    return BinarySolution(bits=best_bits.astype(np.int64), energy=final)


def brute_force(problem: QuboProblem) -> BinarySolution:
    """Exact minimum by exhaustive enumeration, capped at 24 variables.

    Assignments are scanned in lexicographic order of the bit string
    (bit 0 most significant), so ties resolve to the lexicographically
    smallest optimum.
    """
    m = problem.num_vars
    if m > BRUTE_FORCE_CAP:
        raise ResourceError(f"brute force capped at {BRUTE_FORCE_CAP} variables, got {m}")
    W, h = dense_form(problem)
    U = np.triu(W)  # strict upper triangle; diagonal lives in h
    shifts = (m - 1 - np.arange(m)).astype(np.uint32)
    best_e = math.inf
    best_v = 0
    chunk = 1 << 16
    for start in range(0, 1 << m, chunk):
        stop = min(start + chunk, 1 << m)
        v = np.arange(start, stop, dtype=np.uint32)
        bits = ((v[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        energies = bits @ h + np.einsum("ij,ij->i", bits @ U, bits)
        local = int(np.argmin(energies))
        if energies[local] < best_e:
            best_e = float(energies[local])
            best_v = start + local
    best_bits = ((best_v >> shifts) & 1).astype(np.int64)
    return BinarySolution(bits=best_bits, energy=energy(problem, best_bits))


def export_qubo(problem: QuboProblem, path) -> None:
    """Write the coordinate-list text form: comment header with the encoding
    metadata, then one "i j value" line per nonzero coefficient, (i, j)
    ascending, 17 significant digits."""
    enc = problem.encoding
    lines = [
        "# qubo coordinate list",
        f"# n {enc.n}",
        f"# b {enc.bits}",
        f"# c {enc.c_value}",
        f"# penalty {problem.penalty:.17g}",
        "# labels " + " ".join(str(int(v)) for v in problem.labels),
    ]
    for (p, q) in sorted(problem.coefficients):
        val = problem.coefficients[(p, q)]
        if val != 0.0:
            lines.append(f"{p} {q} {val:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def import_qubo(path) -> QuboProblem:
    """Read a file written by export_qubo; coefficients round-trip exactly."""
    meta: dict[str, str] = {}
    coeffs: dict[tuple[int, int], float] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split(None, 1)
                if len(parts) == 2:
                    meta[parts[0]] = parts[1]
                continue
            p_str, q_str, val_str = line.split()
            coeffs[(int(p_str), int(q_str))] = float(val_str)
    try:
        enc = QuboEncoding(n=int(meta["n"]), bits=int(meta["b"]))
        penalty = float(meta["penalty"])
        labels = np.array([int(v) for v in meta["labels"].split()])
    except KeyError as exc:
        raise ValueError(f"qubo file {path} is missing header field {exc}") from None
    return QuboProblem(
        num_vars=enc.num_vars,
        coefficients=coeffs,
        encoding=enc,
        penalty=penalty,
        labels=labels,
    )
