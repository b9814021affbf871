"""Orbit-basis reduction tests: quotient counting and reduced-vs-full evolution."""

import math
import random

import numpy as np
import pytest

import oracles
from symqaoa.autgroup import PermGroup
from symqaoa.errors import InvalidParamsError, NotInvariantError, SizeLimitError
from symqaoa.graphs import Graph, complete, cycle, ladder, named, random_regular, wheel
from symqaoa.reduced import (
    BitstringGroup,
    ReducedEngine,
    build_orbit_basis,
    hamming_reduced_ops,
    quotient_dimension,
    reduce_operators,
    reduced_evolve,
    lift,
    symmetry_group,
)
from symqaoa.simulator import Angles, Engine, maxcut_diagonal


def random_angles(rng, p):
    return Angles(
        betas=[rng.uniform(-math.pi, math.pi) for _ in range(p)],
        gammas=[rng.uniform(-math.pi, math.pi) for _ in range(p)],
    )


def test_quotient_dims_known():
    trivial = PermGroup(4, ())
    assert quotient_dimension(BitstringGroup(4, trivial)).dim == 16
    assert quotient_dimension(BitstringGroup(4, trivial, include_flip=True)).dim == 8
    assert quotient_dimension(symmetry_group(complete(4))).dim == 5
    assert quotient_dimension(symmetry_group(complete(4), include_flip=True)).dim == 3
    assert quotient_dimension(symmetry_group(complete(5), include_flip=True)).dim == 3
    assert quotient_dimension(symmetry_group(complete(8))).dim == 9
    assert quotient_dimension(symmetry_group(complete(8), include_flip=True)).dim == 5


@pytest.mark.parametrize("flip", [False, True])
@pytest.mark.parametrize("seed", range(5))
def test_quotient_matches_brute_burnside(seed, flip):
    rng = random.Random(400 + seed)
    n = rng.randint(3, 6)
    pool = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = rng.sample(pool, rng.randint(1, len(pool)))
    g = Graph.from_edges(n, edges)
    perms = oracles.brute_automorphisms(n, edges)
    want = oracles.burnside_count(n, perms, with_flip=flip)
    count = quotient_dimension(symmetry_group(g, include_flip=flip))
    assert count.dim == want
    assert count.routes_agree
    assert count.group_order == len(perms) * (2 if flip else 1)
    assert count.burnside_avg == count.orbit_count == count.reciprocal_sum == count.dim
    assert len(count.fixed_counts) == count.group_order


def test_quotient_size_limit():
    with pytest.raises(SizeLimitError):
        quotient_dimension(symmetry_group(complete(22)))


def test_bitstring_group_validation():
    with pytest.raises(InvalidParamsError):
        BitstringGroup(5, PermGroup(4, ()))


def test_hamming_ops_equal_generic_reduction():
    for n in (2, 3, 5, 7):
        fast = hamming_reduced_ops(n)
        basis = build_orbit_basis(complete(n))
        generic = reduce_operators(maxcut_diagonal(complete(n)), basis)
        assert fast.dim == generic.dim == n + 1
        assert np.allclose(fast.cost_diag, generic.cost_diag, atol=1e-12)
        assert np.allclose(fast.mixer, generic.mixer, atol=1e-12)
        assert np.allclose(fast.init, generic.init, atol=1e-12)


def test_hamming_ops_values():
    ops = hamming_reduced_ops(3)
    assert list(ops.cost_diag) == [0.0, 2.0, 2.0, 0.0]
    assert ops.mixer[0, 1] == pytest.approx(math.sqrt(3))
    assert ops.mixer[1, 2] == pytest.approx(2.0)
    assert np.allclose(ops.mixer, ops.mixer.T)
    assert ops.init @ ops.init == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidParamsError):
        hamming_reduced_ops(0)


@pytest.mark.parametrize("flip", [False, True])
@pytest.mark.parametrize(
    "graph",
    [complete(5), cycle(6), wheel(6), ladder(4), named("petersen"), random_regular(8, 3, seed=4)],
)
def test_reduced_evolution_matches_full(graph, flip):
    rng = random.Random(graph.n * 1000 + graph.m + flip)
    diag = maxcut_diagonal(graph)
    basis = build_orbit_basis(graph, include_flip=flip)
    ops = reduce_operators(diag, basis)
    assert basis.dim < (1 << graph.n)
    angles = random_angles(rng, 2)
    result = reduced_evolve(ops, angles)
    full = Engine(diag)
    assert result.expectation == pytest.approx(
        full.expectation(angles.betas, angles.gammas), abs=1e-11
    )
    # the full evolution never leaves the symmetric subspace, so the lifted
    # reduced state is the full state itself
    lifted = lift(result.amplitudes, basis)
    assert np.allclose(lifted.amplitudes, full.statevector(angles).amplitudes, atol=1e-11)


def test_hamming_matches_full_k12():
    rng = random.Random(12)
    angles = random_angles(rng, 3)
    ops = hamming_reduced_ops(12)
    want = Engine(maxcut_diagonal(complete(12))).expectation(angles.betas, angles.gammas)
    assert reduced_evolve(ops, angles).expectation == pytest.approx(want, abs=1e-11)


def test_reduced_engine_preserves_norm():
    rng = random.Random(3)
    ops = hamming_reduced_ops(9)
    eng = ReducedEngine(ops)
    for _ in range(3):
        a = random_angles(rng, 4)
        amps = eng.run(a.betas, a.gammas)
        assert np.vdot(amps, amps).real == pytest.approx(1.0, abs=1e-12)


def test_reduce_rejects_noninvariant_cost():
    # S4 orbits are Hamming-weight classes; a path's cut count is not constant
    # on them
    basis = build_orbit_basis(complete(4))
    path = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    with pytest.raises(NotInvariantError):
        reduce_operators(maxcut_diagonal(path), basis)
    with pytest.raises(InvalidParamsError):
        reduce_operators(maxcut_diagonal(complete(5)), basis)


def test_basis_size_limit():
    with pytest.raises(SizeLimitError):
        build_orbit_basis(complete(17))


def test_lift_validation():
    basis = build_orbit_basis(complete(3))
    with pytest.raises(InvalidParamsError):
        lift(np.ones(3), basis)
