"""Undirected and directed binary phylogenetic networks.

Vertex ids are opaque strings. Leaves carry a taxon label; internal vertices
carry none. Both network types are immutable; derived lookup tables are
computed lazily and cached on the instance.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

Edge = tuple[str, str]
Arc = tuple[str, str]


class InvalidNetworkError(ValueError):
    """Raised when a graph violates the phylogenetic network definition."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class SuppressionError(ValueError):
    """Root suppression would create a loop or a parallel edge."""


def norm_edge(u: str, v: str) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_undirected(
    edges: Iterable[tuple[str, str]], labels: Mapping[str, str]
) -> ValidationReport:
    """Check a raw edge list plus leaf labelling against the network rules.

    ``edges`` may contain loops or repeated pairs; each is reported. ``labels``
    maps leaf vertex ids to taxon labels.
    """
    out: list[str] = []
    seen: set[Edge] = set()
    adj: dict[str, set[str]] = {}
    for u, v in edges:
        if u == v:
            out.append(f"loop at {u}")
            continue
        e = norm_edge(u, v)
        if e in seen:
            out.append(f"parallel edge {e[0]}-{e[1]}")
            continue
        seen.add(e)
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    for leaf in labels:
        adj.setdefault(leaf, set())

    for v in sorted(adj):
        d = len(adj[v])
        if v in labels:
            if d != 1:
                out.append(f"leaf {v} has degree {d}, expected 1")
        elif d == 1:
            out.append(f"degree 1 vertex {v} has no leaf label")
        elif d != 3:
            out.append(f"vertex {v} has degree {d}, expected 1 or 3")

    if len(labels) < 2:
        out.append(f"need at least 2 leaves, got {len(labels)}")
    names = Counter(labels.values())
    for name, k in sorted(names.items()):
        if not name:
            out.append("empty leaf label")
        elif k > 1:
            out.append(f"label {name!r} used by {k} leaves")

    if adj and not _connected(adj):
        out.append("graph is not connected")
    return ValidationReport(tuple(out))


def _connected(adj: Mapping[str, Iterable[str]]) -> bool:
    start = next(iter(adj))
    seen = {start}
    todo = [start]
    while todo:
        u = todo.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == len(adj)


@dataclass(frozen=True)
class UndirectedNetwork:
    """Simple connected graph whose vertices have degree 1 (leaves) or 3.

    ``edges`` is a sorted tuple of normalised pairs and ``labels`` a sorted
    tuple of ``(leaf_id, taxon)`` pairs, so two networks compare equal iff
    they have the same vertex ids, edges and labelling. Build instances with
    :meth:`build`.
    """

    edges: tuple[Edge, ...]
    labels: tuple[tuple[str, str], ...]

    @classmethod
    def build(
        cls,
        edges: Iterable[tuple[str, str]],
        labels: Mapping[str, str],
        validate: bool = True,
    ) -> "UndirectedNetwork":
        edges = list(edges)
        if validate:
            report = validate_undirected(edges, labels)
            if not report.ok:
                raise InvalidNetworkError(list(report.violations))
        return cls(
            tuple(sorted({norm_edge(u, v) for u, v in edges})),
            tuple(sorted(labels.items())),
        )

    @cached_property
    def label_map(self) -> dict[str, str]:
        return dict(self.labels)

    @cached_property
    def vertices(self) -> tuple[str, ...]:
        vs = {v for e in self.edges for v in e}
        vs.update(self.label_map)
        return tuple(sorted(vs))

    @cached_property
    def leaves(self) -> frozenset[str]:
        return frozenset(self.label_map)

    @cached_property
    def internal(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.leaves)

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    # integer-indexed tables used by the hot loops of the solvers

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def edge_ends(self) -> tuple[tuple[int, int], ...]:
        idx = self.index
        return tuple((idx[u], idx[v]) for u, v in self.edges)

    @cached_property
    def incidence(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex index: ``(edge_index, neighbour_index)`` pairs."""
        inc: list[list[tuple[int, int]]] = [[] for _ in self.vertices]
        for k, (i, j) in enumerate(self.edge_ends):
            inc[i].append((k, j))
            inc[j].append((k, i))
        return tuple(tuple(x) for x in inc)

    @cached_property
    def leaf_mask(self) -> tuple[bool, ...]:
        return tuple(v in self.leaves for v in self.vertices)

    def degree(self, v: str) -> int:
        return len(self.adjacency[v])

    @property
    def n_leaves(self) -> int:
        return len(self.labels)


def reticulation_number(n: UndirectedNetwork) -> int:
    """Cycle rank ``|E| - |V| + 1``; zero exactly for trees."""
    return len(n.edges) - len(n.vertices) + 1


def bfs_distances(n: UndirectedNetwork, source: str) -> dict[str, int]:
    dist = {source: 0}
    todo = deque([source])
    adj = n.adjacency
    while todo:
        u = todo.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                todo.append(w)
    return dist


def distance(n: UndirectedNetwork, u: str, v: str) -> int:
    return bfs_distances(n, u)[v]


@dataclass(frozen=True)
class DirectedNetwork:
    """Rooted binary phylogenetic network.

    Arcs are ``(parent, child)`` pairs kept sorted; ``labels`` maps leaf ids
    to taxa as a sorted tuple of pairs.
    """

    arcs: tuple[Arc, ...]
    root: str
    labels: tuple[tuple[str, str], ...]

    @classmethod
    def build(
        cls, arcs: Iterable[Arc], root: str, labels: Mapping[str, str]
    ) -> "DirectedNetwork":
        return cls(tuple(sorted(set(arcs))), root, tuple(sorted(labels.items())))

    @cached_property
    def label_map(self) -> dict[str, str]:
        return dict(self.labels)

    @cached_property
    def vertices(self) -> tuple[str, ...]:
        vs = {v for a in self.arcs for v in a}
        vs.add(self.root)
        vs.update(self.label_map)
        return tuple(sorted(vs))

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.arcs:
            out[u].append(v)
        return {v: tuple(cs) for v, cs in out.items()}

    @cached_property
    def parents(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.arcs:
            out[v].append(u)
        return {v: tuple(ps) for v, ps in out.items()}

    def indegree(self, v: str) -> int:
        return len(self.parents[v])

    def outdegree(self, v: str) -> int:
        return len(self.children[v])

    @cached_property
    def reticulations(self) -> frozenset[str]:
        return frozenset(v for v, ps in self.parents.items() if len(ps) >= 2)


def validate_directed(d: DirectedNetwork) -> ValidationReport:
    out: list[str] = []
    arcset = set(d.arcs)
    if len(arcset) != len(d.arcs):
        out.append("repeated arc")
    for u, v in d.arcs:
        if u == v:
            out.append(f"loop at {u}")
        elif (v, u) in arcset:
            out.append(f"antiparallel arcs {u}<->{v}")
    labels = d.label_map
    for v in d.vertices:
        deg = (d.indegree(v), d.outdegree(v))
        if v == d.root:
            if deg != (0, 2):
                out.append(f"root {v} has (indeg, outdeg) {deg}")
        elif v in labels:
            if deg != (1, 0):
                out.append(f"leaf {v} has (indeg, outdeg) {deg}")
        elif deg not in ((1, 2), (2, 1)):
            out.append(f"vertex {v} has (indeg, outdeg) {deg}")
    if len(labels) < 2:
        out.append("need at least 2 leaves")
    if not is_acyclic(d.arcs):
        out.append("directed cycle present")
    adj: dict[str, list[str]] = {v: [] for v in d.vertices}
    for u, v in d.arcs:
        adj[u].append(v)
        adj[v].append(u)
    if not _connected(adj):
        out.append("underlying graph is not connected")
    return ValidationReport(tuple(out))


def is_acyclic(arcs: Iterable[Arc]) -> bool:
    """Kahn's algorithm: true iff the arc set has no directed cycle."""
    indeg: Counter[str] = Counter()
    succ: dict[str, list[str]] = {}
    nodes: set[str] = set()
    for u, v in arcs:
        succ.setdefault(u, []).append(v)
        indeg[v] += 1
        nodes.update((u, v))
    ready = [v for v in nodes if indeg[v] == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for w in succ.get(u, ()):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return seen == len(nodes)


def is_tree_child(d: DirectedNetwork) -> bool:
    """Every non-leaf vertex has a child that is not a reticulation."""
    rets = d.reticulations
    for v, cs in d.children.items():
        if cs and all(c in rets for c in cs):
            return False
    return True


def has_tree_child_forbidden_subgraph(d: DirectedNetwork) -> bool:
    """Vertex with two reticulation children, or reticulation with one."""
    rets = d.reticulations
    for v, cs in d.children.items():
        k = sum(c in rets for c in cs)
        if k >= 2 or (k >= 1 and v in rets):
            return True
    return False


def is_stack_free(d: DirectedNetwork) -> bool:
    rets = d.reticulations
    return not any(c in rets for v in rets for c in d.children[v])


def underlying_edges(d: DirectedNetwork) -> list[Edge]:
    return [norm_edge(u, v) for u, v in d.arcs]


def suppress_root(d: DirectedNetwork) -> UndirectedNetwork:
    """Forget orientations and replace the path ``u - root - v`` by ``{u, v}``."""
    kids = d.children[d.root]
    if len(kids) != 2:
        raise SuppressionError(f"root {d.root} has {len(kids)} children")
    u, v = kids
    if u == v:
        raise SuppressionError("root suppression creates a loop")
    edges = {norm_edge(a, b) for a, b in d.arcs if d.root not in (a, b)}
    e = norm_edge(u, v)
    if e in edges:
        raise SuppressionError(f"root suppression duplicates edge {u}-{v}")
    edges.add(e)
    return UndirectedNetwork.build(edges, d.label_map)


# label-preserving isomorphism, used by round-trip checks

EXACT_ISO_LIMIT = 20


def fingerprint(n: UndirectedNetwork) -> tuple:
    """Isomorphism invariant: degree sequence plus labelled-neighbour profile."""
    labels = n.label_map
    degs = tuple(sorted(n.degree(v) for v in n.vertices))
    # a leaf is identified by its label; its neighbour by the sorted labels of
    # the leaves hanging off it
    hang: dict[str, list[str]] = {}
    for leaf, lab in labels.items():
        (p,) = n.adjacency[leaf]
        hang.setdefault(p, []).append(lab)
    profile = tuple(sorted(tuple(sorted(x)) for x in hang.values()))
    return (len(n.vertices), len(n.edges), degs, profile)


def isomorphic(a: UndirectedNetwork, b: UndirectedNetwork) -> bool:
    """Leaf-label-preserving isomorphism test.

    Exact for networks with at most ``EXACT_ISO_LIMIT`` vertices, a
    fingerprint comparison above that.
    """
    if a == b:
        return True
    if fingerprint(a) != fingerprint(b):
        return False
    if max(len(a.vertices), len(b.vertices)) > EXACT_ISO_LIMIT:
        return True
    import networkx as nx

    def to_nx(n: UndirectedNetwork) -> "nx.Graph":
        g = nx.Graph()
        for v in n.vertices:
            g.add_node(v, label=n.label_map.get(v))
        g.add_edges_from(n.edges)
        return g

    return nx.is_isomorphic(
        to_nx(a), to_nx(b), node_match=lambda x, y: x["label"] == y["label"]
    )
