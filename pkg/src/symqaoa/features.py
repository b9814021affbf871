"""Symmetry measures of a graph and their edge-deletion-averaged relaxations.

A vertex permutation that fails to be an automorphism of G may still be one of
G with an edge or two removed, so averaging the exact measures over deleted
variants grades symmetry continuously instead of all-or-nothing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .autgroup import automorphism_generators, vertex_orbits
from .errors import InvalidParamsError
from .graphs import Graph

FEATURE_NAMES = (
    "log_aut",
    "avg_log_aut_1",
    "avg_log_aut_2",
    "n_vertices",
    "n_orbits",
    "avg_orbits_1",
    "avg_orbits_2",
    "entropy",
    "avg_entropy_1",
    "avg_entropy_2",
)


@dataclass(frozen=True)
class SymmetryFeatures:
    log_aut: float
    avg_log_aut_1: float
    avg_log_aut_2: float
    n_vertices: int
    n_orbits: int
    avg_orbits_1: float
    avg_orbits_2: float
    entropy: float
    avg_entropy_1: float
    avg_entropy_2: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES], dtype=np.float64)


def graph_entropy(orbits: list[list[int]], n: int) -> float:
    """(1/n) * sum |A_i| ln |A_i| over the orbit partition; 0 iff all singletons,
    ln(n) iff a single orbit."""
    return sum(len(a) * math.log(len(a)) for a in orbits) / n


def exact_features(g: Graph) -> tuple[float, int, float]:
    """(ln|Aut|, orbit count, entropy) of one graph."""
    grp = automorphism_generators(g)
    orbits = vertex_orbits(grp)
    log_aut = _log_order(grp.order())
    return log_aut, len(orbits), graph_entropy(orbits, g.n)


def _log_order(order: int) -> float:
    # group orders overflow float64 well before n = 200, so log via int.bit_length
    if order.bit_length() <= 53:
        return math.log(order)
    shift = order.bit_length() - 53
    return math.log(order >> shift) + shift * math.log(2)


def _deletion_pairs(m: int, max_pairs: int | None, seed: int | None):
    pairs = list(itertools.combinations(range(m), 2))
    if max_pairs is not None and len(pairs) > max_pairs:
        if seed is None:
            raise InvalidParamsError("subsampling two-edge pairs requires a seed")
        rng = np.random.default_rng(seed)
        keep = rng.choice(len(pairs), size=max_pairs, replace=False)
        pairs = [pairs[i] for i in sorted(keep)]
    return pairs


def approx_features(
    g: Graph,
    depth: int,
    max_pairs: int | None = None,
    seed: int | None = None,
) -> tuple[float, float, float]:
    """Mean of exact_features over all depth-edge deletions of g.

    depth 1 averages over |E| single deletions, depth 2 over C(|E|,2) pairs
    (optionally a seeded uniform subsample of max_pairs of them). Deletions
    that disconnect the graph are kept as-is.
    """
    if depth not in (1, 2):
        raise InvalidParamsError(f"deletion depth must be 1 or 2, got {depth}")
    if g.m < depth:
        raise InvalidParamsError(f"need at least {depth} edges, got {g.m}")
    if depth == 1:
        variants = [[e] for e in g.edges]
    else:
        variants = [
            [g.edges[i], g.edges[j]] for i, j in _deletion_pairs(g.m, max_pairs, seed)
        ]
    total = np.zeros(3)
    for removed in variants:
        total += exact_features(g.delete_edges(removed))
    mean = total / len(variants)
    return float(mean[0]), float(mean[1]), float(mean[2])


def feature_vector(
    g: Graph, max_pairs: int | None = None, seed: int | None = None
) -> SymmetryFeatures:
    """All ten symmetry features of a graph with at least two edges."""
    if g.m < 2:
        raise InvalidParamsError(f"feature vector needs at least 2 edges, got {g.m}")
    log_aut, n_orbits, entropy = exact_features(g)
    a1 = approx_features(g, 1)
    a2 = approx_features(g, 2, max_pairs=max_pairs, seed=seed)
    return SymmetryFeatures(
        log_aut=log_aut,
        avg_log_aut_1=a1[0],
        avg_log_aut_2=a2[0],
        n_vertices=g.n,
        n_orbits=n_orbits,
        avg_orbits_1=a1[1],
        avg_orbits_2=a2[1],
        entropy=entropy,
        avg_entropy_1=a1[2],
        avg_entropy_2=a2[2],
    )
