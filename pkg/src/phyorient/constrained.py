"""Orientation under a fixed root edge and fixed reticulation set.

Given the edge that receives the root and the set of vertices that must end
up with in-degree two, there is at most one acyclic orientation. It is found
by unit propagation: once a vertex has all the in-arcs it needs its remaining
edges point away from it, and once its unoriented edges are exactly the
in-arcs it still needs they all point towards it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from phyorient.netmodel import (
    DirectedNetwork,
    Edge,
    UndirectedNetwork,
    is_acyclic,
    norm_edge,
    reticulation_number,
)

ROOT_ID = "__root"
MAX_ORACLE_EDGES = 22


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class OrientationConstraint:
    """Root edge plus the vertices whose desired in-degree is two."""

    root_edge: Edge
    reticulations: frozenset[str]

    @classmethod
    def of(cls, root_edge: tuple[str, str], reticulations: Iterable[str]):
        return cls(norm_edge(*root_edge), frozenset(reticulations))

    def desired_indegree(self, n: UndirectedNetwork) -> dict[str, int]:
        return {v: 2 if v in self.reticulations else 1 for v in n.vertices}


def check_constraint(n: UndirectedNetwork, c: OrientationConstraint) -> None:
    if c.root_edge not in n.edge_index:
        raise ValueError(f"root edge {c.root_edge} is not an edge of the network")
    bad = c.reticulations - set(n.vertices)
    if bad:
        raise ValueError(f"unknown vertices in reticulation set: {sorted(bad)}")
    if c.reticulations & n.leaves:
        raise ValueError("a leaf cannot be a reticulation")
    r = reticulation_number(n)
    if len(c.reticulations) != r:
        raise ValueError(f"need {r} reticulations, got {len(c.reticulations)}")
    if ROOT_ID in n.index:
        raise ValueError(f"vertex id {ROOT_ID!r} is reserved")


@dataclass(frozen=True)
class ConstrainedResult:
    network: Optional[DirectedNetwork]
    edges_oriented: int
    propagation_steps: int

    @property
    def feasible(self) -> bool:
        return self.network is not None


def propagate(
    n: UndirectedNetwork, root_edge: int, is_ret: list[bool] | tuple[bool, ...]
) -> tuple[Optional[list[int]], int, int]:
    """Index-level propagation core.

    ``root_edge`` is an edge index and ``is_ret`` a per-vertex flag. Returns
    ``(head, oriented, steps)`` where ``head[k]`` is the vertex index edge
    ``k`` points to (``-1`` for the root edge), or ``None`` as first element
    when the constraint cannot be met.
    """
    ends = n.edge_ends
    inc = n.incidence
    nv = len(inc)
    target = [2 if is_ret[v] else 1 for v in range(nv)]
    indeg = [0] * nv
    free = [len(x) for x in inc]
    head = [-2] * len(ends)  # -2 unoriented

    a, b = ends[root_edge]
    head[root_edge] = -1
    indeg[a] += 1
    indeg[b] += 1
    free[a] -= 1
    free[b] -= 1

    queue = list(range(nv))
    queued = [True] * nv
    steps = 0
    oriented = 0
    while queue:
        v = queue.pop()
        queued[v] = False
        steps += 1
        need = target[v] - indeg[v]
        if need < 0 or need > free[v]:
            return None, oriented, steps
        if free[v] == 0:
            continue
        if need == 0:
            into_v = False
        elif need == free[v]:
            into_v = True
        else:
            continue
        for k, w in inc[v]:
            if head[k] != -2:
                continue
            if into_v:
                head[k] = v
                indeg[v] += 1
            else:
                head[k] = w
                indeg[w] += 1
            free[v] -= 1
            free[w] -= 1
            oriented += 1
            if not queued[w]:
                queued[w] = True
                queue.append(w)

    if oriented != len(ends) - 1:
        # leftover edges: every stalled vertex still has slack both ways, so
        # any completion would contain a directed cycle
        return None, oriented, steps
    for v in range(nv):
        if indeg[v] != target[v]:
            return None, oriented, steps
    if not _acyclic_indexed(ends, head, root_edge, nv):
        return None, oriented, steps
    return head, oriented, steps


def _acyclic_indexed(ends, head, root_edge, nv) -> bool:
    succ: list[list[int]] = [[] for _ in range(nv)]
    indeg = [0] * nv
    for k, (i, j) in enumerate(ends):
        if k == root_edge:
            continue
        h = head[k]
        t = i if h == j else j
        succ[t].append(h)
        indeg[h] += 1
    ready = [v for v in range(nv) if indeg[v] == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for w in succ[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return seen == nv


def to_directed(
    n: UndirectedNetwork, root_edge: int, head: list[int]
) -> DirectedNetwork:
    names = n.vertices
    arcs = []
    for k, (i, j) in enumerate(n.edge_ends):
        if k == root_edge:
            arcs.append((ROOT_ID, names[i]))
            arcs.append((ROOT_ID, names[j]))
        elif head[k] == j:
            arcs.append((names[i], names[j]))
        else:
            arcs.append((names[j], names[i]))
    return DirectedNetwork.build(arcs, ROOT_ID, n.label_map)


def orient_constrained(
    n: UndirectedNetwork, c: OrientationConstraint
) -> ConstrainedResult:
    """Return the unique orientation meeting ``c``, or an infeasible result."""
    check_constraint(n, c)
    k = n.edge_index[c.root_edge]
    is_ret = [v in c.reticulations for v in n.vertices]
    head, oriented, steps = propagate(n, k, is_ret)
    if head is None:
        return ConstrainedResult(None, oriented, steps)
    return ConstrainedResult(to_directed(n, k, head), oriented, steps)


def orient_exhaustive_oracle(
    n: UndirectedNetwork, c: OrientationConstraint, prune: bool = True
) -> list[DirectedNetwork]:
    """All orientations of ``n`` with root on ``c.root_edge`` and the given in-degrees.

    Enumerates direction assignments of the non-root edges depth first. With
    ``prune`` a branch is cut as soon as some vertex exceeds its in-degree
    target or can no longer reach it; without it every one of the
    ``2**(|E|-1)`` assignments is visited. Each complete assignment is
    accepted iff in-degrees match and the arcs are acyclic.
    """
    check_constraint(n, c)
    if len(n.edges) > MAX_ORACLE_EDGES:
        raise BudgetExceededError(
            f"{len(n.edges)} edges exceed the oracle cap of {MAX_ORACLE_EDGES}"
        )
    u0, v0 = c.root_edge
    want = {v: (2 if v in c.reticulations else 1) for v in n.vertices}
    base = [(ROOT_ID, u0), (ROOT_ID, v0)]
    indeg = {v: 0 for v in n.vertices}
    indeg[u0] = indeg[v0] = 1
    edges = [e for e in n.edges if e != c.root_edge]
    remaining = {v: 0 for v in n.vertices}
    for u, v in edges:
        remaining[u] += 1
        remaining[v] += 1

    found: list[DirectedNetwork] = []
    chosen: list[tuple[str, str]] = []

    def ok(v: str) -> bool:
        return indeg[v] <= want[v] <= indeg[v] + remaining[v]

    def rec(i: int) -> None:
        if i == len(edges):
            arcs = base + chosen
            if all(indeg[v] == want[v] for v in n.vertices) and is_acyclic(arcs):
                found.append(DirectedNetwork.build(arcs, ROOT_ID, n.label_map))
            return
        u, v = edges[i]
        remaining[u] -= 1
        remaining[v] -= 1
        for t, h in ((u, v), (v, u)):
            indeg[h] += 1
            chosen.append((t, h))
            if not prune or (ok(u) and ok(v)):
                rec(i + 1)
            chosen.pop()
            indeg[h] -= 1
        remaining[u] += 1
        remaining[v] += 1

    rec(0)
    return found
