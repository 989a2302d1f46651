"""Directed multigraphs and their Kirchhoff spaces."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .subspace import IndexSet, Subspace, direct_sum, ilabel, vlabel

Edge = tuple[str, str, str]  # (name, tail, head)


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


@dataclass(frozen=True)
class Digraph:
    """Nodes plus named directed edges; self-loops and parallel edges allowed.

    Incidence convention: +1 at the tail, -1 at the head.  Edge voltage is
    tail potential minus head potential; edge current flows tail to head.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node")
        names = [e[0] for e in self.edges]
        if len(set(names)) != len(names):
            raise ValueError("duplicate edge name")
        known = set(self.nodes)
        for name, tail, head in self.edges:
            if tail not in known or head not in known:
                raise ValueError(f"edge {name} uses an undeclared node")

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], nodes: Sequence[str] = ()) -> "Digraph":
        """Build a graph; nodes not listed are added in order of appearance."""
        edges = [tuple(e) for e in edges]
        seen = list(dict.fromkeys(nodes))
        have = set(seen)
        for _, tail, head in edges:
            for n in (tail, head):
                if n not in have:
                    have.add(n)
                    seen.append(n)
        return cls(tuple(seen), tuple(edges))

    @property
    def edge_names(self) -> tuple[str, ...]:
        return tuple(e[0] for e in self.edges)

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e[0] == name:
                return e
        raise KeyError(name)

    def incidence(self) -> np.ndarray:
        """Node-edge incidence matrix (nodes x edges)."""
        pos = {n: k for k, n in enumerate(self.nodes)}
        a = np.zeros((len(self.nodes), len(self.edges)))
        for j, (_, tail, head) in enumerate(self.edges):
            a[pos[tail], j] += 1.0
            a[pos[head], j] -= 1.0
        return a

    def rank(self, edge_subset: Iterable[str] | None = None) -> int:
        """Graphic-matroid rank: |nodes| minus components of the spanning subgraph."""
        names = set(self.edge_names if edge_subset is None else edge_subset)
        uf = _UnionFind(self.nodes)
        r = 0
        for name, tail, head in self.edges:
            if name in names and uf.union(tail, head):
                r += 1
        return r

    def n_components(self) -> int:
        return len(self.nodes) - self.rank()

    def spanning_forest(self) -> tuple[list[Edge], list[Edge]]:
        """(tree edges, chords) for a forest grown in edge order."""
        uf = _UnionFind(self.nodes)
        tree, chords = [], []
        for e in self.edges:
            (tree if uf.union(e[1], e[2]) else chords).append(e)
        return tree, chords

    def kcl_rows(self) -> np.ndarray:
        """Independent KCL rows: incidence with one reference node per component dropped."""
        a = self.incidence()
        uf = _UnionFind(self.nodes)
        for _, tail, head in self.edges:
            uf.union(tail, head)
        seen, keep = set(), []
        for k, n in enumerate(self.nodes):
            root = uf.find(n)
            if root in seen:
                keep.append(k)
            else:
                seen.add(root)
        return a[keep]

    def kvl_rows(self) -> np.ndarray:
        """Fundamental circuit vectors, one per chord of the spanning forest."""
        tree, chords = self.spanning_forest()
        col = {name: j for j, name in enumerate(self.edge_names)}
        adj: dict[str, list[tuple[str, str, float]]] = defaultdict(list)
        for name, tail, head in tree:
            adj[tail].append((head, name, 1.0))   # traversed tail -> head
            adj[head].append((tail, name, -1.0))
        rows = np.zeros((len(chords), len(self.edges)))
        for k, (name, tail, head) in enumerate(chords):
            rows[k, col[name]] = 1.0
            # walk the tree from head back to tail to close the loop
            prev = {head: None}
            queue = deque([head])
            while queue:
                x = queue.popleft()
                if x == tail:
                    break
                for y, ename, sign in adj[x]:
                    if y not in prev:
                        prev[y] = (x, ename, sign)
                        queue.append(y)
            x = tail
            while prev[x] is not None:
                px, ename, sign = prev[x]
                rows[k, col[ename]] += sign
                x = px
        return rows

    def renamed(self, prefix: str) -> "Digraph":
        """Disjoint copy with every node and edge name prefixed."""
        return Digraph(
            tuple(prefix + n for n in self.nodes),
            tuple((prefix + a, prefix + t, prefix + h) for a, t, h in self.edges),
        )

    def disjoint_union(self, other: "Digraph") -> "Digraph":
        return Digraph(self.nodes + other.nodes, self.edges + other.edges)


def voltage_space(g: Digraph) -> Subspace:
    """KVL space: the node-potential image, on the voltage labels."""
    labels = [vlabel(e) for e in g.edge_names]
    return Subspace.span(labels, g.incidence())


def current_space(g: Digraph) -> Subspace:
    """KCL space: circulations, spanned by the fundamental circuits."""
    labels = [ilabel(e) for e in g.edge_names]
    return Subspace.span(labels, g.kvl_rows())


def topological_space(g: Digraph) -> Subspace:
    """``V^v(G) (+) V^i(G)`` on all voltage and current labels."""
    return direct_sum(voltage_space(g), current_space(g))


def topology_rows(g: Digraph) -> tuple[IndexSet, np.ndarray]:
    """Exact KVL + KCL constraint rows over ``IndexSet.pairs(edges)``."""
    index = IndexSet.pairs(g.edge_names)
    vcols = index.positions(vlabel(e) for e in g.edge_names)
    icols = index.positions(ilabel(e) for e in g.edge_names)
    kvl, kcl = g.kvl_rows(), g.kcl_rows()
    rows = np.zeros((kvl.shape[0] + kcl.shape[0], len(index)))
    rows[: kvl.shape[0], vcols] = kvl
    rows[kvl.shape[0]:, icols] = kcl
    return index, rows


def ports_contain_loop_or_cutset(g: Digraph, ports: Iterable[str]) -> Literal["no", "loop", "cutset"]:
    """Whether the edge set ``ports`` contains a circuit or a cutset of ``g``.

    A loop is reported before a cutset when both are present.
    """
    ports = list(ports)
    unknown = set(ports) - set(g.edge_names)
    if unknown:
        raise ValueError(f"unknown edges: {sorted(unknown)}")
    if g.rank(ports) < len(set(ports)):
        return "loop"
    rest = set(g.edge_names) - set(ports)
    if g.rank(rest) < g.rank():
        return "cutset"
    return "no"
