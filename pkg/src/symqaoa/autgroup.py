"""Graph automorphisms: color refinement, individualization-refinement search,
a Schreier-Sims stabilizer chain for exact group order, and orbit machinery on
vertices and bitstrings.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParamsError, SearchBudgetError, SizeLimitError
from .graphs import Graph

Perm = tuple[int, ...]


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose(a: Perm, b: Perm) -> Perm:
    """(a compose b)(i) = a(b(i))."""
    return tuple(a[x] for x in b)


def inverse(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, ai in enumerate(a):
        inv[ai] = i
    return tuple(inv)


def cycle_lengths(perm: Perm) -> list[int]:
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        out.append(length)
    return out


def is_automorphism(g: Graph, perm: Perm) -> bool:
    """Edge preservation both directions (a bijection preserving E preserves non-E too)."""
    if sorted(perm) != list(range(g.n)):
        return False
    edges = set(g.edges)
    for u, v in g.edges:
        pu, pv = perm[u], perm[v]
        if ((pu, pv) if pu < pv else (pv, pu)) not in edges:
            return False
    return True


def perm_to_line(perm: Perm) -> str:
    """Image notation: 'sigma(0) sigma(1) ...'."""
    return " ".join(str(x) for x in perm)


def parse_perm_line(line: str) -> Perm:
    perm = tuple(int(tok) for tok in line.split())
    if sorted(perm) != list(range(len(perm))):
        raise InvalidParamsError(f"not a permutation: {line!r}")
    return perm


@dataclass(frozen=True)
class Coloring:
    """Vertex coloring with contiguous color ids; cells come out in color-id order."""

    colors: tuple[int, ...]

    @staticmethod
    def uniform(n: int) -> "Coloring":
        return Coloring((0,) * n)

    @property
    def n_colors(self) -> int:
        return max(self.colors) + 1

    def cells(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_colors)]
        for v, c in enumerate(self.colors):
            out[c].append(v)
        return out


def _normalize(colors: list[int]) -> list[int]:
    rank = {c: i for i, c in enumerate(sorted(set(colors)))}
    return [rank[c] for c in colors]


def _refine(adj: list[tuple[int, ...]], colors: list[int]) -> Coloring:
    n = len(adj)
    colors = _normalize(colors)
    k = max(colors) + 1
    while k < n:
        sigs = [(colors[v],) + tuple(sorted(colors[u] for u in adj[v])) for v in range(n)]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        if len(rank) == k:
            break
        colors = [rank[sigs[v]] for v in range(n)]
        k = len(rank)
    return Coloring(tuple(colors))


def color_refine(g: Graph, init: Coloring | None = None) -> Coloring:
    """Coarsest equitable refinement of init (uniform if omitted); idempotent.

    Each round recolors vertices by (current color, sorted multiset of neighbor
    colors) and stops when the number of classes no longer grows. New color ids
    are signature ranks, so the result depends only on the input partition and
    the graph, not on incoming id values.
    """
    if init is not None and len(init.colors) != g.n:
        raise InvalidParamsError("coloring length does not match vertex count")
    adj = [tuple(s) for s in g.adjacency()]
    return _refine(adj, list(init.colors) if init is not None else [0] * g.n)


@dataclass
class PermGroup:
    """A permutation group given by generators; order and membership use a lazily
    built stabilizer chain.
    """

    n: int
    generators: tuple[Perm, ...]
    _chain: "_StabilizerChain | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.generators = tuple(tuple(g) for g in self.generators)
        for g in self.generators:
            if sorted(g) != list(range(self.n)):
                raise InvalidParamsError(f"generator {g} is not a permutation of 0..{self.n - 1}")

    def chain(self) -> "_StabilizerChain":
        if self._chain is None:
            self._chain = _StabilizerChain(self.n, self.generators)
        return self._chain

    def order(self) -> int:
        """Exact |<generators>| as an arbitrary-precision integer."""
        return self.chain().order()

    def contains(self, perm: Perm) -> bool:
        if len(perm) != self.n:
            return False
        residue, _ = self.chain().sift(tuple(perm))
        return residue == identity_perm(self.n)


def group_order(grp: PermGroup) -> int:
    return grp.order()


# Chain internals store permutations as 256-byte translate tables with an
# identity tail: compose(a, b) is then b.translate(a), a single C call, and the
# identity-tail padding is closed under composition. Degree is capped at 255.
_IDENT256 = bytes(range(256))


def _as_table(perm) -> bytes:
    return bytes(perm) + _IDENT256[len(perm):]


_ARANGE256 = np.arange(256, dtype=np.uint8)


def _inv_table(a: bytes) -> bytes:
    inv = np.empty(256, dtype=np.uint8)
    inv[np.frombuffer(a, dtype=np.uint8)] = _ARANGE256
    return inv.tobytes()


class _StabilizerChain:
    """Deterministic incremental Schreier-Sims.

    Level i stores generators fixing base[:i] pointwise and the transversal of
    base[i] under them. _complete(i) sifts every (deduplicated) Schreier
    generator of level i through the lower chain, pushing residues down and
    repairing deepest-first, which keeps the level-i orbit frozen during its
    own scan.
    """

    def __init__(self, n: int, generators):
        if n > 255:
            raise SizeLimitError(f"stabilizer chain supports degree <= 255, got {n}")
        self.n = n
        self.base: list[int] = []
        self.sgens: list[list[bytes]] = []
        self.trans: list[dict[int, bytes]] = []
        self.trans_inv: list[dict[int, bytes]] = []
        self._inv_cache: dict[bytes, bytes] = {}
        gens = [t for t in dict.fromkeys(_as_table(g) for g in generators) if t != _IDENT256]
        if gens:
            b0 = min(i for g in gens for i in range(n) if g[i] != i)
            self.base.append(b0)
            self.sgens.append(gens)
            self.trans.append({})
            self.trans_inv.append({})
            self._complete(0)

    def order(self) -> int:
        total = 1
        for t in self.trans:
            total *= len(t)
        return total

    def sift(self, g: Perm) -> tuple[Perm, int]:
        residue, level = self._strip(_as_table(g), 0)
        return tuple(residue[: self.n]), level

    def _strip(self, g: bytes, start: int) -> tuple[bytes, int]:
        for level in range(start, len(self.base)):
            x = g[self.base[level]]
            rep_inv = self.trans_inv[level].get(x)
            if rep_inv is None:
                return g, level
            g = g.translate(rep_inv)
        return g, len(self.base)

    def _complete(self, i: int) -> None:
        gens_i = self.sgens[i]
        orbit = _orbit_transversal(gens_i, self.base[i])
        self.trans[i] = orbit
        cache = self._inv_cache
        for u in orbit.values():
            if u not in cache:
                cache[u] = _inv_table(u)
        inv_at = {x: cache[u] for x, u in orbit.items()}
        self.trans_inv[i] = inv_at
        seen: set[bytes] = set()
        for x in sorted(orbit):
            ux = orbit[x]
            for s in gens_i:
                sg = ux.translate(s).translate(inv_at[s[x]])
                if sg == _IDENT256 or sg in seen:
                    continue
                seen.add(sg)
                residue, j = self._strip(sg, i + 1)
                if residue == _IDENT256:
                    continue
                if j == len(self.base):
                    self.base.append(min(k for k in range(self.n) if residue[k] != k))
                    self.sgens.append([])
                    self.trans.append({})
                    self.trans_inv.append({})
                for level in range(i + 1, j + 1):
                    self.sgens[level].append(residue)
                for level in range(j, i, -1):
                    self._complete(level)
                # sgens[i] is untouched, so the level-i orbit and the already
                # verified Schreier generators remain valid; keep scanning.

    def transversal_sizes(self) -> list[int]:
        return [len(t) for t in self.trans]


def _orbit_transversal(gens: list[bytes], point: int) -> dict[int, bytes]:
    reps = {point: _IDENT256}
    queue = deque([point])
    while queue:
        x = queue.popleft()
        rx = reps[x]
        for s in gens:
            y = s[x]
            if y not in reps:
                reps[y] = rx.translate(s)
                queue.append(y)
    return reps


def automorphism_generators(g: Graph, node_cap: int = 10**7) -> PermGroup:
    """Generators of Aut(g) by individualization-refinement backtracking.

    The tree refines an ordered partition, branching on the first smallest
    non-singleton cell. Pruning: (a) a node whose cell-size sequence differs
    from the reference (leftmost) path at the same depth contains no leaf
    equivalent to the reference leaf; (b) a branch vertex lying in the orbit of
    an explored sibling under discovered generators fixing the node's prefix is
    redundant; (c) after a leaf yields an automorphism, the search backjumps to
    the deepest ancestor shared with the reference path.
    """
    n = g.n
    if n < 1:
        raise InvalidParamsError("graph must have at least one vertex")
    ident = identity_perm(n)
    edges = g.edges
    adj = [tuple(s) for s in g.adjacency()]
    gens: list[Perm] = []
    state = {"nodes": 0, "ref_leaf": None, "ref_cert": None}
    ref_invs: list[tuple[int, ...]] = []
    ref_prefix: list[int] = []

    def cell_sizes(coloring: Coloring) -> tuple[int, ...]:
        sizes = [0] * coloring.n_colors
        for c in coloring.colors:
            sizes[c] += 1
        return tuple(sizes)

    def certificate(lab: tuple[int, ...]) -> frozenset:
        out = set()
        for u, v in edges:
            a, b = lab[u], lab[v]
            out.add((a, b) if a < b else (b, a))
        return frozenset(out)

    def in_explored_orbit(v: int, explored: list[int], prefix: list[int]) -> bool:
        fixing = [s for s in gens if all(s[x] == x for x in prefix)]
        if not fixing:
            return False
        seen = set(explored)
        frontier = list(explored)
        while frontier:
            w = frontier.pop()
            for s in fixing:
                u = s[w]
                if u == v:
                    return True
                if u not in seen:
                    seen.add(u)
                    frontier.append(u)
        return False

    def search(coloring: Coloring, depth: int, prefix: list[int]):
        state["nodes"] += 1
        if state["nodes"] > node_cap:
            raise SearchBudgetError(f"automorphism search exceeded {node_cap} nodes")
        inv = cell_sizes(coloring)
        if state["ref_leaf"] is None:
            ref_invs.append(inv)
        elif depth >= len(ref_invs) or inv != ref_invs[depth]:
            return None
        cells = coloring.cells()
        target = None
        best = n + 1
        for idx, cell in enumerate(cells):
            if 1 < len(cell) < best:
                target, best = idx, len(cell)
        if target is None:
            # discrete: colors are a vertex -> position labeling
            lab = coloring.colors
            if state["ref_leaf"] is None:
                state["ref_leaf"] = lab
                state["ref_cert"] = certificate(lab)
                ref_prefix[:] = prefix
                return None
            if certificate(lab) == state["ref_cert"]:
                sigma = compose(inverse(lab), state["ref_leaf"])
                if sigma != ident and is_automorphism(g, sigma):
                    gens.append(sigma)
                    common = 0
                    while (
                        common < len(prefix)
                        and common < len(ref_prefix)
                        and prefix[common] == ref_prefix[common]
                    ):
                        common += 1
                    return common
            return None
        explored: list[int] = []
        for v in cells[target]:
            if explored and in_explored_orbit(v, explored, prefix):
                continue
            branched = list(coloring.colors)
            branched[v] = coloring.n_colors
            child = _refine(adj, branched)
            jump = search(child, depth + 1, prefix + [v])
            explored.append(v)
            if jump is not None and jump < depth:
                return jump
        return None

    search(_refine(adj, [0] * n), 0, [])
    if len(gens) > n * n:
        raise SearchBudgetError(f"generator count {len(gens)} exceeds {n * n}")
    return PermGroup(n, tuple(gens))


def vertex_orbits(grp: PermGroup) -> list[list[int]]:
    """Orbits of {0..n-1} under the generators, sorted by smallest member."""
    seen = [False] * grp.n
    orbits = []
    for v in range(grp.n):
        if seen[v]:
            continue
        comp = [v]
        seen[v] = True
        stack = [v]
        while stack:
            x = stack.pop()
            for s in grp.generators:
                y = s[x]
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    stack.append(y)
        orbits.append(sorted(comp))
    return orbits


def bitstring_action(perm: Perm) -> np.ndarray:
    """Index map of the bit-position action: bit perm[i] of the image = bit i of x."""
    n = len(perm)
    if n > 20:
        raise SizeLimitError(f"bit action table needs n <= 20, got {n}")
    x = np.arange(1 << n, dtype=np.int64)
    y = np.zeros_like(x)
    for i, t in enumerate(perm):
        y |= ((x >> i) & 1) << t
    return y


def flip_action(n: int) -> np.ndarray:
    """Index map of the global bit flip x -> complement(x)."""
    if n > 20:
        raise SizeLimitError(f"flip table needs n <= 20, got {n}")
    return np.arange((1 << n) - 1, -1, -1, dtype=np.int64)


@dataclass(frozen=True)
class BitstringOrbits:
    """Partition of {0,1}^n: labels[x] = orbit id, ids ordered by smallest member."""

    n: int
    labels: np.ndarray
    sizes: np.ndarray
    reps: np.ndarray

    @property
    def n_orbits(self) -> int:
        return len(self.sizes)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.labels == k)


def bitstring_orbits(grp: PermGroup, include_global_flip: bool = False) -> BitstringOrbits:
    """Orbits of all 2^n bitstrings under bit-position permutations and optionally
    the global flip. Labels converge by min-propagation along each action map,
    which reaches the whole component because permutation actions close into
    cycles.
    """
    n = grp.n
    if n > 20:
        raise SizeLimitError(f"bitstring orbits need n <= 20, got {n}")
    ident = identity_perm(n)
    maps = [bitstring_action(s) for s in dict.fromkeys(grp.generators) if s != ident]
    if include_global_flip:
        maps.append(flip_action(n))
    labels = np.arange(1 << n, dtype=np.int64)
    if maps:
        while True:
            prev = labels.copy()
            for m in maps:
                np.minimum(labels, labels[m], out=labels)
            labels = labels[labels]
            if np.array_equal(labels, prev):
                break
    reps, inv, counts = np.unique(labels, return_inverse=True, return_counts=True)
    return BitstringOrbits(n, inv.astype(np.int64), counts.astype(np.int64), reps)


def iter_elements(grp: PermGroup, cap: int = 10**6):
    """Yield every group element exactly once, as Perm tuples.

    Elements are products of stabilizer-chain coset representatives, the
    deepest level varying slowest, so each comes out once with no dedup set
    and memory stays at the chain depth. Raises before yielding anything if
    the order exceeds cap.
    """
    chain = grp.chain()
    order = chain.order()
    if order > cap:
        raise SizeLimitError(f"group order {order} exceeds enumeration cap {cap}")
    n = grp.n
    reps = [list(t.values()) for t in chain.trans]

    def products(level: int):
        if level == len(reps):
            yield _IDENT256
            return
        for suffix in products(level + 1):
            for u in reps[level]:
                # table of u composed after suffix: result[i] = u[suffix[i]]
                yield suffix.translate(u)

    for table in products(0):
        yield tuple(table[:n])


def enumerate_elements(grp: PermGroup, cap: int = 10**6) -> list[Perm]:
    """Every group element as a list; see iter_elements for the streaming form."""
    return list(iter_elements(grp, cap=cap))


def fixed_bitstring_count(perm: Perm, flipped: bool = False) -> int:
    """|{x : a(x) = x}| for the bit action of perm, optionally composed with the
    global flip. A plain permutation fixes 2^(#cycles) strings; with the flip a
    cycle of odd length forces x_i != x_i, so any odd cycle kills all of them.
    """
    cycles = cycle_lengths(perm)
    if flipped and any(length % 2 for length in cycles):
        return 0
    return 1 << len(cycles)
