"""Symmetry-reduced QAOA evolution.

When the cost is constant on the orbits of a bitstring symmetry group, the
dynamics stay inside the span of the normalized orbit sums, so one amplitude
per orbit suffices. Two routes: a generic orbit basis built by explicit
enumeration (n <= 16), and a closed-form Hamming-weight ladder for complete
graphs at any n. Both assume the uniform initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .autgroup import (
    BitstringOrbits,
    PermGroup,
    automorphism_generators,
    bitstring_orbits,
    cycle_lengths,
    iter_elements,
    fixed_bitstring_count,
)
from .errors import InvalidParamsError, NotInvariantError, SizeLimitError
from .graphs import Graph
from .simulator import Angles, CostDiagonal, StateVector

ENUMERATION_CAP = 8 * 10**6
ORBIT_N_CAP = 20
GENERIC_N_CAP = 16


@dataclass(frozen=True)
class BitstringGroup:
    """Bit-permutation group induced by vertex permutations, optionally extended
    by the global flip (which commutes with every bit permutation)."""

    n: int
    perm_group: PermGroup
    include_flip: bool = False

    def __post_init__(self):
        if self.perm_group.n != self.n:
            raise InvalidParamsError("permutation degree does not match n")

    def order(self) -> int:
        base = self.perm_group.order()
        return 2 * base if self.include_flip else base


def symmetry_group(g: Graph, include_flip: bool = False) -> BitstringGroup:
    return BitstringGroup(g.n, automorphism_generators(g), include_flip)


@dataclass(frozen=True)
class QuotientCount:
    """Orbit count of the group action on all 2^n bitstrings, with whichever of
    the three counting routes was feasible: averaged fixed points over elements,
    direct orbit enumeration, and the sum of reciprocal orbit sizes."""

    dim: int
    group_order: int
    burnside_avg: int | None
    orbit_count: int | None
    reciprocal_sum: int | None
    fixed_counts: tuple[int, ...] | None

    @property
    def routes_agree(self) -> bool:
        vals = {v for v in (self.burnside_avg, self.orbit_count, self.reciprocal_sum) if v is not None}
        return len(vals) == 1


def quotient_dimension(grp: BitstringGroup) -> QuotientCount:
    """|B/A| for the bitstring action; exact integers throughout."""
    n = grp.n
    order = grp.order()
    can_enumerate = order <= ENUMERATION_CAP
    can_orbit = n <= ORBIT_N_CAP
    if not can_enumerate and not can_orbit:
        raise SizeLimitError(
            f"group order {order} exceeds {ENUMERATION_CAP} and n={n} exceeds {ORBIT_N_CAP}"
        )
    burnside_avg = None
    fixed_counts = None
    if can_enumerate:
        counts = []
        canon: dict[int, int] = {}  # share int objects; big groups repeat few values
        for perm in iter_elements(grp.perm_group, cap=ENUMERATION_CAP):
            c = fixed_bitstring_count(perm)
            counts.append(canon.setdefault(c, c))
        if grp.include_flip:
            for perm in iter_elements(grp.perm_group, cap=ENUMERATION_CAP):
                c = fixed_bitstring_count(perm, flipped=True)
                counts.append(canon.setdefault(c, c))
        total = sum(counts)
        if total % order:
            raise NotInvariantError("fixed-point total not divisible by group order")
        burnside_avg = total // order
        fixed_counts = tuple(counts)
    orbit_count = None
    reciprocal_sum = None
    if can_orbit:
        orbits = bitstring_orbits(grp.perm_group, include_global_flip=grp.include_flip)
        orbit_count = orbits.n_orbits
        # sum over every x of 1/|orbit(x)|: each x contributes the reciprocal of
        # its own orbit size, so group the 2^n terms by orbit
        recip = sum((Fraction(int(c)) / int(c) for c in orbits.sizes), Fraction(0))
        if recip.denominator != 1:
            raise NotInvariantError("reciprocal orbit-size sum is not an integer")
        reciprocal_sum = int(recip)
    dims = {v for v in (burnside_avg, orbit_count, reciprocal_sum) if v is not None}
    if len(dims) != 1:
        raise NotInvariantError(f"counting routes disagree: {sorted(dims)}")
    return QuotientCount(
        dim=dims.pop(),
        group_order=order,
        burnside_avg=burnside_avg,
        orbit_count=orbit_count,
        reciprocal_sum=reciprocal_sum,
        fixed_counts=fixed_counts,
    )


@dataclass(frozen=True, eq=False)
class OrbitBasis:
    """Orthonormal basis of normalized orbit sums |o_k> = sum over orbit k / sqrt(size)."""

    n: int
    orbits: BitstringOrbits

    @property
    def dim(self) -> int:
        return self.orbits.n_orbits


def build_orbit_basis(g: Graph, include_flip: bool = False) -> OrbitBasis:
    if g.n > GENERIC_N_CAP:
        raise SizeLimitError(f"generic orbit basis needs n <= {GENERIC_N_CAP}, got {g.n}")
    grp = automorphism_generators(g)
    return OrbitBasis(g.n, bitstring_orbits(grp, include_global_flip=include_flip))


@dataclass(eq=False)
class ReducedOperators:
    """Cost, mixer, and initial state projected onto an orbit-sum basis."""

    cost_diag: np.ndarray
    mixer: np.ndarray
    init: np.ndarray
    _eig: tuple | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.cost_diag)

    def mixer_eig(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            w, v = np.linalg.eigh(self.mixer)
            self._eig = (w, v)
        return self._eig


def reduce_operators(diag: CostDiagonal, basis: OrbitBasis) -> ReducedOperators:
    """Project a cost diagonal onto the basis. The cost must be constant on every
    orbit; otherwise the group was not a symmetry of this cost.

    Mixer entry (k,l) is t * sqrt(s_k/s_l) where t counts the single-bit-flip
    neighbors of one orbit-k member landing in orbit l; symmetry of the result
    (s_k t_kl = s_l t_lk, hypercube edge counting) is enforced numerically.
    """
    if diag.n != basis.n:
        raise InvalidParamsError(f"diagonal n={diag.n}, basis n={basis.n}")
    orb = basis.orbits
    labels, sizes, reps = orb.labels, orb.sizes, orb.reps
    order = np.argsort(labels, kind="stable")
    starts = np.zeros(orb.n_orbits, dtype=np.int64)
    np.cumsum(sizes[:-1], out=starts[1:])
    sorted_vals = diag.values[order]
    firsts = np.repeat(sorted_vals[starts], sizes)
    if not np.array_equal(sorted_vals, firsts):
        raise NotInvariantError("cost is not constant on an orbit")
    dim = orb.n_orbits
    transfer = np.zeros((dim, dim), dtype=np.float64)
    for k in range(dim):
        x = int(reps[k])
        for j in range(basis.n):
            transfer[k, labels[x ^ (1 << j)]] += 1.0
    ratio = np.sqrt(sizes.astype(np.float64)[:, None] / sizes.astype(np.float64)[None, :])
    mixer = transfer * ratio
    mixer = (mixer + mixer.T) / 2.0
    init = np.sqrt(sizes.astype(np.float64) / float(1 << basis.n))
    return ReducedOperators(diag.values[reps].copy(), mixer, init)


def hamming_reduced_ops(n: int) -> ReducedOperators:
    """Complete-graph fast path: the (n+1)-dimensional Hamming-weight ladder.

    The mixer couples adjacent weights with sqrt((d+1)(n-d)), the cut value
    depends only on the weight, f(d) = n*d - d^2, and the uniform state has
    binomial weights.
    """
    if n < 1:
        raise InvalidParamsError(f"need n >= 1, got {n}")
    d = np.arange(n + 1, dtype=np.float64)
    cost = n * d - d * d
    mixer = np.zeros((n + 1, n + 1), dtype=np.float64)
    off = np.sqrt((d[:-1] + 1.0) * (n - d[:-1]))
    idx = np.arange(n)
    mixer[idx, idx + 1] = off
    mixer[idx + 1, idx] = off
    init = np.sqrt(np.array([math.comb(n, k) for k in range(n + 1)], dtype=np.float64) / float(2**n))
    return ReducedOperators(cost, mixer, init)


class ReducedResult(NamedTuple):
    amplitudes: np.ndarray
    expectation: float


class ReducedEngine:
    """Reusable reduced-space simulator; the mixer eigendecomposition is computed
    once and shared across angle evaluations."""

    def __init__(self, ops: ReducedOperators):
        self.ops = ops
        self._w, self._v = ops.mixer_eig()

    def run(self, betas, gammas) -> np.ndarray:
        ops = self.ops
        amps = ops.init.astype(np.complex128)
        for beta, gamma in zip(betas, gammas):
            amps *= np.exp(-1j * gamma * ops.cost_diag)
            amps = self._v @ (np.exp(-1j * beta * self._w) * (self._v.T @ amps))
        return amps

    def expectation(self, betas, gammas) -> float:
        amps = self.run(betas, gammas)
        return float((amps.real**2 + amps.imag**2) @ self.ops.cost_diag)


def reduced_evolve(ops: ReducedOperators, angles: Angles) -> ReducedResult:
    """Alternating phase and exact mixer exponential in the reduced space."""
    amps = ReducedEngine(ops).run(angles.betas, angles.gammas)
    expect = float((amps.real**2 + amps.imag**2) @ ops.cost_diag)
    return ReducedResult(amps, expect)


def lift(amplitudes: np.ndarray, basis: OrbitBasis) -> StateVector:
    """Expand reduced amplitudes to the full space: every orbit member receives
    a_k / sqrt(|orbit_k|)."""
    if len(amplitudes) != basis.dim:
        raise InvalidParamsError(f"expected {basis.dim} amplitudes, got {len(amplitudes)}")
    per_member = np.asarray(amplitudes, dtype=np.complex128) / np.sqrt(
        basis.orbits.sizes.astype(np.float64)
    )
    return StateVector(basis.n, per_member[basis.orbits.labels])
