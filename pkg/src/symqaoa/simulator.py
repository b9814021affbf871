"""Full-statevector QAOA simulation for diagonal cost functions.

Bit convention, used everywhere including file formats: bit j of an integer
index is variable/qubit/vertex j, least significant bit = vertex 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .autgroup import BitstringOrbits
from .errors import InvalidParamsError, NotBijectionError, SizeLimitError
from .graphs import Graph

MAX_QUBITS = 26


@dataclass(frozen=True, eq=False)
class CostDiagonal:
    """Diagonal cost operator: values[x] = f(x)."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.shape != (1 << self.n,):
            raise InvalidParamsError(
                f"diagonal needs 2^{self.n} entries, got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise InvalidParamsError("diagonal values must be finite")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over 2^n basis states."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "amplitudes", np.asarray(self.amplitudes, dtype=np.complex128)
        )
        if self.amplitudes.shape != (1 << self.n,):
            raise InvalidParamsError(
                f"state needs 2^{self.n} amplitudes, got {self.amplitudes.shape}"
            )
        norm = float((self.amplitudes.real**2 + self.amplitudes.imag**2).sum())
        if abs(norm - 1.0) > 1e-12:
            raise InvalidParamsError(f"state norm^2 = {norm!r}, expected 1")


@dataclass(frozen=True)
class Angles:
    """One (beta, gamma) pair per layer."""

    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if len(self.betas) != len(self.gammas):
            raise InvalidParamsError("betas and gammas must have equal length")
        if not self.betas:
            raise InvalidParamsError("need at least one layer")
        if not all(math.isfinite(v) for v in self.betas + self.gammas):
            raise InvalidParamsError("angles must be finite")

    @property
    def p(self) -> int:
        return len(self.betas)


def format_bitstring(x: int, n: int) -> str:
    """Character i = bit i = vertex i (LSB first)."""
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def maxcut_diagonal(g: Graph) -> CostDiagonal:
    """values[x] = number of edges cut by the assignment x."""
    if g.n > MAX_QUBITS:
        raise SizeLimitError(f"statevector path needs n <= {MAX_QUBITS}, got {g.n}")
    x = np.arange(1 << g.n, dtype=np.int64)
    vals = np.zeros(1 << g.n, dtype=np.int64)
    for u, v in g.edges:
        vals += ((x >> u) ^ (x >> v)) & 1
    return CostDiagonal(g.n, vals.astype(np.float64))


class Engine:
    """Reusable simulator bound to one cost diagonal; buffers are allocated once
    so repeated evaluations (optimizer inner loop) do not churn memory. Not safe
    for concurrent use of a single instance.
    """

    def __init__(self, diag: CostDiagonal):
        self.n = diag.n
        self.size = 1 << diag.n
        self.values = diag.values
        rounded = np.rint(diag.values)
        if np.array_equal(rounded, diag.values) and rounded.min() >= 0:
            # integer costs: per-layer phases come from a small power table
            self._int_costs = rounded.astype(np.int64)
            self._fmax = int(self._int_costs.max())
        else:
            self._int_costs = None
            self._fmax = 0
        self._state = np.empty(self.size, dtype=np.complex128)
        self._phase = np.empty(self.size, dtype=np.complex128)
        half = max(self.size // 2, 1)
        self._h0 = np.empty(half, dtype=np.complex128)
        self._h1 = np.empty(half, dtype=np.complex128)

    def _apply_phase(self, gamma: float) -> None:
        if self._int_costs is not None:
            table = np.exp(-1j * gamma) ** np.arange(self._fmax + 1)
            np.take(table, self._int_costs, out=self._phase)
        else:
            np.multiply(self.values, -1j * gamma, out=self._phase)
            np.exp(self._phase, out=self._phase)
        self._state *= self._phase

    def _apply_mixer(self, beta: float) -> None:
        c = math.cos(beta)
        ms = -1j * math.sin(beta)
        state = self._state
        for j in range(self.n):
            half = 1 << j
            v = state.reshape(-1, 2, half)
            v0, v1 = v[:, 0, :], v[:, 1, :]
            t0 = self._h0.reshape(-1, half)
            t1 = self._h1.reshape(-1, half)
            np.copyto(t0, v0)
            v0 *= c
            np.multiply(v1, ms, out=t1)
            v0 += t1
            v1 *= c
            np.multiply(t0, ms, out=t1)
            v1 += t1

    def run(self, betas, gammas) -> np.ndarray:
        """Evolved amplitudes in the engine's internal buffer (no copy)."""
        self._state.fill(1.0 / math.sqrt(self.size))
        for beta, gamma in zip(betas, gammas):
            self._apply_phase(gamma)
            self._apply_mixer(beta)
        return self._state

    def statevector(self, angles: Angles) -> StateVector:
        return StateVector(self.n, self.run(angles.betas, angles.gammas).copy())

    def expectation(self, betas, gammas) -> float:
        amps = self.run(betas, gammas)
        return float((amps.real**2 + amps.imag**2) @ self.values)


def evolve(diag: CostDiagonal, angles: Angles) -> StateVector:
    """Alternating phase/mixer evolution from the uniform superposition."""
    return Engine(diag).statevector(angles)


def probabilities(state: StateVector) -> np.ndarray:
    amps = state.amplitudes
    return amps.real**2 + amps.imag**2


def expectation(state: StateVector, diag: CostDiagonal) -> float:
    if state.n != diag.n:
        raise InvalidParamsError(f"state has n={state.n}, diagonal n={diag.n}")
    return float(probabilities(state) @ diag.values)


class OrbitSpread(NamedTuple):
    probability: float
    amplitude: float


def orbit_spread(state: StateVector, orbits: BitstringOrbits) -> OrbitSpread:
    """Worst within-orbit disagreement: max over orbits of (max - min) measurement
    probability, and the largest modulus of an amplitude's deviation from its
    orbit's first member (equal amplitudes, not just probabilities, are expected
    when evolution starts from the uniform state).
    """
    if orbits.n != state.n:
        raise InvalidParamsError(f"orbits are over n={orbits.n}, state has n={state.n}")
    order = np.argsort(orbits.labels, kind="stable")
    starts = np.zeros(orbits.n_orbits, dtype=np.int64)
    np.cumsum(orbits.sizes[:-1], out=starts[1:])
    probs = probabilities(state)[order]
    spread = np.maximum.reduceat(probs, starts) - np.minimum.reduceat(probs, starts)
    amps = state.amplitudes[order]
    firsts = np.repeat(amps[starts], orbits.sizes)
    return OrbitSpread(float(spread.max()), float(np.abs(amps - firsts).max()))


class SymmetryFlags(NamedTuple):
    cost_commutes: bool
    mixer_commutes: bool


def check_symmetry_conditions(mapping, diag: CostDiagonal) -> SymmetryFlags:
    """Test a bitstring bijection a(x) for the two commutation conditions: the
    cost is constant along a, and a maps j-bit-flip neighbors onto bit-flip
    neighbors (as sets). Together they make the evolution orbit-invariant.
    """
    n = diag.n
    if n > 16:
        raise SizeLimitError(f"symmetry condition check needs n <= 16, got {n}")
    size = 1 << n
    a = np.asarray(mapping, dtype=np.int64)
    if a.shape != (size,) or not np.array_equal(np.sort(a), np.arange(size)):
        raise NotBijectionError(f"mapping is not a bijection on {{0..{size - 1}}}")
    cost_ok = bool(np.array_equal(diag.values[a], diag.values))
    bits = np.int64(1) << np.arange(n, dtype=np.int64)
    x = np.arange(size, dtype=np.int64)
    image_of_neighbors = np.sort(a[x[:, None] ^ bits[None, :]], axis=1)
    neighbors_of_image = np.sort(a[:, None] ^ bits[None, :], axis=1)
    mixer_ok = bool(np.array_equal(image_of_neighbors, neighbors_of_image))
    return SymmetryFlags(cost_ok, mixer_ok)


def probabilities_csv(state: StateVector) -> str:
    """'bitstring,probability' lines for every basis state, for plotting."""
    probs = probabilities(state)
    lines = ["bitstring,probability"]
    for x in range(1 << state.n):
        lines.append(f"{format_bitstring(x, state.n)},{float(probs[x])!r}")
    return "\n".join(lines) + "\n"
