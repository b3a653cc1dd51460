"""Minimum-weight cycle bases over GF(2).

Cycles are held as integer bitmasks over the network's sorted edge list, so
symmetric difference is ``^`` and inner products are popcount parity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb, prod

from phyorient.netmodel import Edge, UndirectedNetwork, reticulation_number

EXHAUSTIVE_EDGE_LIMIT = 16


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class Cycle:
    mask: int
    vertices: tuple[str, ...]  # cyclic order, starting at the smallest id
    edges: tuple[Edge, ...]

    @property
    def length(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class CycleBasis:
    cycles: tuple[Cycle, ...]

    @property
    def total_length(self) -> int:
        return sum(c.length for c in self.cycles)

    @property
    def max_length(self) -> int:
        return max((c.length for c in self.cycles), default=0)

    def __len__(self) -> int:
        return len(self.cycles)

    def dump(self) -> str:
        return "".join(" ".join(c.vertices) + "\n" for c in self.cycles)


def mask_edges(n: UndirectedNetwork, mask: int) -> list[Edge]:
    return [e for k, e in enumerate(n.edges) if mask >> k & 1]


def cycle_from_mask(n: UndirectedNetwork, mask: int) -> Cycle:
    """Build a :class:`Cycle`; raises ``ValueError`` if ``mask`` is not one simple cycle."""
    edges = mask_edges(n, mask)
    adj: dict[str, list[str]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if len(edges) < 3 or any(len(ns) != 2 for ns in adj.values()):
        raise ValueError("edge set is not a simple cycle")
    start = min(adj)
    order = [start]
    prev, cur = start, min(adj[start])
    while cur != start:
        order.append(cur)
        a, b = adj[cur]
        prev, cur = cur, (b if a == prev else a)
    if len(order) != len(adj):
        raise ValueError("edge set is a union of several cycles")
    return Cycle(mask, tuple(order), tuple(edges))


def is_simple_cycle(n: UndirectedNetwork, mask: int) -> bool:
    try:
        cycle_from_mask(n, mask)
    except ValueError:
        return False
    return True


def gf2_rank(masks) -> int:
    basis: dict[int, int] = {}  # leading bit -> row
    for m in masks:
        while m:
            top = m.bit_length() - 1
            if top not in basis:
                basis[top] = m
                break
            m ^= basis[top]
    return len(basis)


def spanning_tree(n: UndirectedNetwork) -> tuple[set[int], dict[str, tuple[str, int]]]:
    """BFS tree from the smallest vertex: tree edge indices and parent links."""
    root = n.vertices[0]
    parent: dict[str, tuple[str, int]] = {}
    seen = {root}
    todo = deque([root])
    tree: set[int] = set()
    eidx = n.edge_index
    while todo:
        u = todo.popleft()
        for w in n.adjacency[u]:
            if w not in seen:
                seen.add(w)
                k = eidx[(u, w) if u <= w else (w, u)]
                tree.add(k)
                parent[w] = (u, k)
                todo.append(w)
    return tree, parent


def fundamental_cycles(n: UndirectedNetwork) -> list[int]:
    tree, parent = spanning_tree(n)

    def root_path(v: str) -> int:
        m = 0
        while v in parent:
            v, k = parent[v]
            m ^= 1 << k
        return m

    out = []
    for k, (u, v) in enumerate(n.edges):
        if k not in tree:
            out.append(root_path(u) ^ root_path(v) ^ (1 << k))
    return out


def _shortest_odd_cycle(n: UndirectedNetwork, witness: int) -> int:
    """Shortest cycle with odd intersection with ``witness``.

    Breadth-first search in the two-level signed graph from ``(v, 0)`` to
    ``(v, 1)`` for every start vertex ``v``; edges in ``witness`` switch
    level. Ties are broken by the sorted edge index list of the cycle.
    """
    inc = n.incidence
    best: tuple[int, list[int]] | None = None
    best_mask = 0
    for s in range(len(inc)):
        start = (s, 0)
        goal = (s, 1)
        prev: dict[tuple[int, int], tuple[tuple[int, int], int]] = {}
        seen = {start}
        todo = deque([start])
        while todo and goal not in seen:
            v, lvl = todo.popleft()
            for k, w in inc[v]:
                nxt = (w, lvl ^ (witness >> k & 1))
                if nxt not in seen:
                    seen.add(nxt)
                    prev[nxt] = ((v, lvl), k)
                    todo.append(nxt)
        if goal not in seen:
            continue
        mask = 0
        length = 0
        node = goal
        while node != start:
            node, k = prev[node]
            mask ^= 1 << k
            length += 1
        # rank by walk length: a minimum closed walk is always a simple cycle
        key = (length, [k for k in range(len(n.edges)) if mask >> k & 1])
        if best is None or key < best:
            best = key
            best_mask = mask
    if best is None:
        raise ValueError("no cycle meets the witness")
    return best_mask


def minimal_cycle_basis(n: UndirectedNetwork) -> CycleBasis:
    """Minimum total length cycle basis, de Pina's witness-vector method.

    Deterministic for a given network: the spanning tree is a BFS tree from
    the smallest vertex and cycle ties break lexicographically.
    """
    r = reticulation_number(n)
    if r == 0:
        raise ValueError("input is a tree")
    tree, _ = spanning_tree(n)
    witnesses = [1 << k for k in range(len(n.edges)) if k not in tree]
    cycles: list[int] = []
    for i in range(r):
        c = _shortest_odd_cycle(n, witnesses[i])
        cycles.append(c)
        for j in range(i + 1, r):
            if _parity(c & witnesses[j]):
                witnesses[j] ^= witnesses[i]
    return CycleBasis(tuple(cycle_from_mask(n, m) for m in cycles))


# independent routes used for verification


def cycle_space_cycles(n: UndirectedNetwork) -> list[int]:
    """Every simple cycle of ``n``, found by enumerating all ``2**r`` cycle space elements."""
    fund = fundamental_cycles(n)
    out = []
    for k in range(1, len(fund) + 1):
        for combo in combinations(fund, k):
            m = 0
            for c in combo:
                m ^= c
            if is_simple_cycle(n, m):
                out.append(m)
    return sorted(out)


def _greedy_basis_weight(candidates: list[int], r: int) -> int:
    """Matroid greedy: lightest independent family of size ``r``."""
    rows: dict[int, int] = {}
    total = 0
    picked = 0
    for m in sorted(candidates, key=lambda x: bin(x).count("1")):
        x = m
        while x:
            top = x.bit_length() - 1
            if top not in rows:
                rows[top] = x
                total += bin(m).count("1")
                picked += 1
                break
            x ^= rows[top]
        if picked == r:
            break
    if picked != r:
        raise ValueError("candidates do not span the cycle space")
    return total


def exhaustive_minimum_length(n: UndirectedNetwork) -> int:
    return _greedy_basis_weight(cycle_space_cycles(n), reticulation_number(n))


def horton_candidates(n: UndirectedNetwork) -> list[int]:
    """Horton's candidate set: ``P(v,x) + {x,y} + P(y,v)`` over all v and edges."""
    eidx = n.edge_index
    out = set()
    for v in n.vertices:
        # BFS tree from v with deterministic parents
        parent: dict[str, str] = {}
        seen = {v}
        todo = deque([v])
        while todo:
            u = todo.popleft()
            for w in n.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    todo.append(w)

        def path(x: str) -> tuple[int, set[str]]:
            m = 0
            vs = {x}
            while x in parent:
                p = parent[x]
                m ^= 1 << eidx[(p, x) if p <= x else (x, p)]
                x = p
                vs.add(x)
            return m, vs

        for k, (x, y) in enumerate(n.edges):
            px, vx = path(x)
            py, vy = path(y)
            if vx & vy == {v}:
                out.add(px ^ py ^ (1 << k))
    return sorted(m for m in out if is_simple_cycle(n, m))


def horton_minimum_length(n: UndirectedNetwork) -> int:
    return _greedy_basis_weight(horton_candidates(n), reticulation_number(n))


def all_minimal_bases(n: UndirectedNetwork) -> list[tuple[int, ...]]:
    """Every minimum-length basis, by brute force over r-subsets of cycles (tiny inputs only)."""
    r = reticulation_number(n)
    cycles = cycle_space_cycles(n)
    best = exhaustive_minimum_length(n)
    out = []
    for combo in combinations(cycles, r):
        if sum(bin(c).count("1") for c in combo) == best and gf2_rank(combo) == r:
            out.append(combo)
    return out


@dataclass(frozen=True)
class VerificationReport:
    simple: bool
    rank: bool
    spanning: bool
    minimal: bool
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


def verify_cycle_basis(n: UndirectedNetwork, b: CycleBasis) -> VerificationReport:
    problems = []
    r = reticulation_number(n)
    masks = [c.mask for c in b.cycles]
    simple = all(is_simple_cycle(n, m) for m in masks)
    if not simple:
        problems.append("a basis element is not a simple cycle of the network")
    rank_ok = len(masks) == r and gf2_rank(masks) == r
    if not rank_ok:
        problems.append(f"GF(2) rank {gf2_rank(masks)} with {len(masks)} cycles, expected {r}")
    spanning = all(gf2_rank(masks + [f]) == gf2_rank(masks) for f in fundamental_cycles(n))
    if not spanning:
        problems.append("basis does not span the fundamental cycles")
    total = sum(bin(m).count("1") for m in masks)
    if len(n.edges) <= EXHAUSTIVE_EDGE_LIMIT:
        best = exhaustive_minimum_length(n)
    else:
        best = horton_minimum_length(n)
    minimal = total == best
    if not minimal:
        problems.append(f"total length {total} exceeds minimum {best}")
    return VerificationReport(simple, rank_ok, spanning, minimal, tuple(problems))


def search_space_size(b: CycleBasis) -> int:
    return prod(len(c.vertices) for c in b.cycles)


def baseline_space_size(n: UndirectedNetwork) -> int:
    return comb(len(n.vertices) - n.n_leaves, reticulation_number(n))
