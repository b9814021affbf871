"""One-off generator for the bundled named-graph edge lists.

Constructs each graph by formula (generalized Petersen, LCF, gyroelongated
bipyramid) and cross-checks against the networkx built-in before writing.
Not shipped with the package; networkx is a dev-only tool here.
"""

import pathlib

import networkx as nx

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "symqaoa" / "data"


def gp(n, k):
    """Generalized Petersen graph GP(n, k): outer cycle, spokes, inner k-jump cycle."""
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n))
        edges.append((i, n + i))
        edges.append((n + i, n + (i + k) % n))
    return 2 * n, edges


def lcf(n, jumps, reps):
    """Hamiltonian cycle on n vertices plus LCF-notation chords."""
    seq = jumps * reps
    assert len(seq) == n
    edges = [(i, (i + 1) % n) for i in range(n)]
    edges += [(i, (i + seq[i]) % n) for i in range(n)]
    return n, edges


def icosahedron():
    """Top apex 0, upper ring 1..5, lower ring 6..10, bottom apex 11."""
    edges = []
    for i in range(5):
        u, l = 1 + i, 6 + i
        edges.append((0, u))
        edges.append((11, l))
        edges.append((u, 1 + (i + 1) % 5))
        edges.append((l, 6 + (i + 1) % 5))
        edges.append((u, l))
        edges.append((1 + (i + 1) % 5, l))
    return 12, edges


def canon(n, edges):
    out = set()
    for u, v in edges:
        assert u != v and 0 <= u < n and 0 <= v < n
        out.add((min(u, v), max(u, v)))
    return n, sorted(out)


SPECS = {
    "petersen": (gp(5, 2), nx.petersen_graph()),
    "heawood": (lcf(14, [5, -5], 7), nx.heawood_graph()),
    "mobius-kantor": (gp(8, 3), nx.moebius_kantor_graph()),
    "pappus": (lcf(18, [5, 7, -7, 7, -7, -5], 3), nx.pappus_graph()),
    "desargues": (gp(10, 3), nx.desargues_graph()),
    "dodecahedron": (gp(10, 2), nx.dodecahedral_graph()),
    "icosahedron": (icosahedron(), nx.icosahedral_graph()),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, ((n, edges), reference) in SPECS.items():
        n, edges = canon(n, edges)
        g = nx.Graph(edges)
        g.add_nodes_from(range(n))
        assert g.number_of_nodes() == reference.number_of_nodes(), name
        assert g.number_of_edges() == reference.number_of_edges(), name
        assert nx.is_isomorphic(g, reference), f"{name} does not match the reference"
        lines = [str(n)] + [f"{u} {v}" for u, v in edges]
        (OUT / f"{name}.edges").write_text("\n".join(lines) + "\n")
        print(f"{name}: n={n} m={len(edges)} ok")


if __name__ == "__main__":
    main()
