"""Search for an orientation of a network that lands in a target class.

Three solvers share one inner loop: for each candidate reticulation set and
each root edge, run constrained propagation and test the result.

* :func:`exact_c_orientation` draws one reticulation from each cycle of a
  minimal cycle basis (the basis-product search space).
* :func:`tree_child_heuristic` keeps only the placements with pairwise
  distance at least 2 that maximise the sum of pairwise distances.
* :func:`baseline_c_orientation` tries every r-subset of internal vertices.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, product
from typing import Callable, Iterable, Iterator, Optional, Sequence

from phyorient.constrained import BudgetExceededError, propagate, to_directed
from phyorient.cyclebasis import CycleBasis, baseline_space_size, minimal_cycle_basis
from phyorient.netmodel import (
    DirectedNetwork,
    Edge,
    SuppressionError,
    UndirectedNetwork,
    bfs_distances,
    is_stack_free,
    is_tree_child,
    reticulation_number,
    suppress_root,
    validate_directed,
)

DEFAULT_BASELINE_BUDGET = 200_000


class Verdict(str, Enum):
    ORIENTED = "ORIENTED"
    NO = "NO"
    PROBABLY_NO = "PROBABLY_NO"


class SolverTimeout(RuntimeError):
    pass


def _any_network(d: DirectedNetwork) -> bool:
    return True


@dataclass(frozen=True)
class ClassPredicate:
    name: str
    test: Callable[[DirectedNetwork], bool]


TREE_CHILD = ClassPredicate("tree-child", is_tree_child)
STACK_FREE = ClassPredicate("stack-free", is_stack_free)
ANY = ClassPredicate("any", _any_network)
CLASSES = {c.name: c for c in (TREE_CHILD, STACK_FREE, ANY)}


@dataclass(frozen=True)
class Outcome:
    verdict: Verdict
    network: Optional[DirectedNetwork] = None
    placement: tuple[str, ...] = ()
    root_edge: Optional[Edge] = None
    placements_tried: int = 0
    constrained_calls: int = 0
    elapsed: float = 0.0
    solver: str = ""

    @property
    def oriented(self) -> bool:
        return self.verdict is Verdict.ORIENTED


# called with (placement, root edge, orientation) for every feasible
# constrained orientation met during a search
Observer = Callable[[tuple[str, ...], Edge, DirectedNetwork], None]


def _unique_sets(tuples: Iterable[tuple[str, ...]]) -> Iterator[tuple[str, ...]]:
    """Drop tuples with a repeated vertex and tuples whose vertex set was already seen."""
    seen: set[frozenset[str]] = set()
    for t in tuples:
        s = frozenset(t)
        if len(s) != len(t) or s in seen:
            continue
        seen.add(s)
        yield t


@dataclass
class _Hit:
    placement: tuple[str, ...]
    root_edge: int
    head: list[int]


def _search(
    n: UndirectedNetwork,
    placements: Iterable[tuple[str, ...]],
    accept: Callable[[DirectedNetwork], bool],
    deadline: Optional[float] = None,
    observer: Optional[Observer] = None,
) -> tuple[Optional[tuple[_Hit, DirectedNetwork]], int, int]:
    """Try placements in order, root edges in sorted order; first accepted wins."""
    index = n.index
    leaf = n.leaf_mask
    n_edges = len(n.edges)
    tried = 0
    calls = 0
    for s in placements:
        if deadline is not None and time.monotonic() > deadline:
            raise SolverTimeout(f"gave up after {tried} placements")
        is_ret = [False] * len(index)
        for v in s:
            i = index[v]
            if leaf[i]:
                break
            is_ret[i] = True
        else:
            tried += 1
            for k in range(n_edges):
                calls += 1
                head, _, _ = propagate(n, k, is_ret)
                if head is None:
                    continue
                d = to_directed(n, k, head)
                if observer is not None:
                    observer(s, n.edges[k], d)
                if accept(d):
                    return (_Hit(s, k, head), d), tried, calls
    return None, tried, calls


def _finish(
    n: UndirectedNetwork,
    found,
    tried: int,
    calls: int,
    start: float,
    negative: Verdict,
    solver: str,
) -> Outcome:
    elapsed = time.perf_counter() - start
    if found is None:
        return Outcome(negative, None, (), None, tried, calls, elapsed, solver)
    hit, d = found
    return Outcome(
        Verdict.ORIENTED, d, hit.placement, n.edges[hit.root_edge], tried, calls, elapsed, solver
    )


def basis_or_empty(n: UndirectedNetwork) -> CycleBasis:
    if reticulation_number(n) == 0:
        return CycleBasis(())
    return minimal_cycle_basis(n)


def basis_placements(b: CycleBasis) -> Iterator[tuple[str, ...]]:
    """Tuples of ``V(C_1) x ... x V(C_r)`` in lexicographic order, one per vertex set."""
    return _unique_sets(product(*(sorted(c.vertices) for c in b.cycles)))


# parallel evaluation ------------------------------------------------------


def _search_chunk(n, chunk, cls, deadline):
    found, tried, calls = _search(n, chunk, cls.test, deadline)
    if found is None:
        return None, tried, calls
    hit, _ = found
    return hit, tried, calls


def _parallel_search(n, placements, cls, deadline, workers, chunk_size=64):
    """Evaluate placement chunks concurrently; the lowest-index success wins.

    Counters of the chunks preceding the winner are summed, so the returned
    counts equal those of a sequential run.
    """
    items = list(placements)
    chunks = [items[i : i + chunk_size] for i in range(0, len(items), chunk_size)]
    tried = calls = 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_search_chunk, n, c, cls, deadline) for c in chunks]
        try:
            for f in futures:
                hit, t, c = f.result()
                tried += t
                calls += c
                if hit is not None:
                    return (hit, to_directed(n, hit.root_edge, hit.head)), tried, calls
        finally:
            for f in futures:
                f.cancel()
    return None, tried, calls


def _run(n, placements, cls, deadline, observer, parallel):
    if parallel > 1 and observer is None:
        return _parallel_search(n, placements, cls, deadline, parallel)
    return _search(n, placements, cls.test, deadline, observer)


def _deadline(timeout: Optional[float]) -> Optional[float]:
    return None if timeout is None else time.monotonic() + timeout


# solvers ------------------------------------------------------------------


def exact_c_orientation(
    n: UndirectedNetwork,
    cls: ClassPredicate = TREE_CHILD,
    *,
    basis: Optional[CycleBasis] = None,
    timeout: Optional[float] = None,
    observer: Optional[Observer] = None,
    parallel: int = 1,
) -> Outcome:
    """Exact search over one reticulation per basic cycle.

    Returns the first orientation in ``cls`` in enumeration order, or a
    ``NO`` outcome when none exists.
    """
    start = time.perf_counter()
    b = basis if basis is not None else basis_or_empty(n)
    found, tried, calls = _run(
        n, basis_placements(b), cls, _deadline(timeout), observer, parallel
    )
    return _finish(n, found, tried, calls, start, Verdict.NO, "exact")


def placement_objective(
    n: UndirectedNetwork,
    s: Sequence[str],
    dist: Optional[dict[str, dict[str, int]]] = None,
) -> int:
    """Sum of pairwise distances between the placed reticulations."""
    if dist is None:
        dist = {v: bfs_distances(n, v) for v in s}
    return sum(dist[a][b] for a, b in combinations(s, 2))


def best_placements(
    n: UndirectedNetwork, b: CycleBasis
) -> tuple[int, list[tuple[str, ...]]]:
    """All tuples from the basis product with pairwise distance >= 2 maximising the distance sum.

    Returns ``(max_f, maximisers)`` with maximisers in lexicographic order;
    ``(-1, [])`` when no tuple has all pairwise distances >= 2.
    """
    choices = [sorted(c.vertices) for c in b.cycles]
    r = len(choices)
    if r == 0:
        return 0, [()]
    every = sorted({v for cs in choices for v in cs})
    dist = {v: bfs_distances(n, v) for v in every}
    # largest distance between any vertex of C_i and any of C_j
    reach = [[max(dist[a][b] for a in choices[i] for b in choices[j]) for j in range(r)] for i in range(r)]
    # bound contribution of pairs with at least one endpoint still unplaced
    tail_bound = [0] * (r + 1)
    for depth in range(r - 1, -1, -1):
        tail_bound[depth] = tail_bound[depth + 1] + sum(reach[i][depth] for i in range(depth))

    best = -1
    winners: list[tuple[str, ...]] = []
    picked: list[str] = []

    def rec(depth: int, f: int) -> None:
        nonlocal best, winners
        if f + tail_bound[depth] < best:
            return
        if depth == r:
            if f > best:
                best, winners = f, [tuple(picked)]
            else:
                winners.append(tuple(picked))
            return
        for v in choices[depth]:
            dv = dist[v]
            gain = 0
            for u in picked:
                d = dv[u]
                if d < 2:
                    break
                gain += d
            else:
                picked.append(v)
                rec(depth + 1, f + gain)
                picked.pop()

    rec(0, 0)
    return best, list(_unique_sets(winners))


def tree_child_heuristic(
    n: UndirectedNetwork,
    *,
    basis: Optional[CycleBasis] = None,
    timeout: Optional[float] = None,
    observer: Optional[Observer] = None,
    parallel: int = 1,
) -> Outcome:
    """Distance-maximising search for a tree-child orientation.

    Only placements maximising the sum of pairwise reticulation distances are
    tried, so a negative answer is ``PROBABLY_NO``. It is exact when the
    network has at most two reticulations.
    """
    start = time.perf_counter()
    b = basis if basis is not None else basis_or_empty(n)
    _, winners = best_placements(n, b)
    found, tried, calls = _run(
        n, winners, TREE_CHILD, _deadline(timeout), observer, parallel
    )
    return _finish(n, found, tried, calls, start, Verdict.PROBABLY_NO, "heuristic")


def placement_admissible(b: CycleBasis, vr: Iterable[str]) -> bool:
    """True iff each basic cycle can be matched to its own vertex of ``vr``.

    Bipartite matching by augmenting paths; ``False`` whenever ``vr`` and
    the basis differ in size.
    """
    vr = sorted(set(vr))
    if len(vr) != len(b.cycles):
        return False
    options = [[v for v in vr if v in set(c.vertices)] for c in b.cycles]
    owner: dict[str, int] = {}

    def augment(i: int, seen: set[str]) -> bool:
        for v in options[i]:
            if v in seen:
                continue
            seen.add(v)
            if v not in owner or augment(owner[v], seen):
                owner[v] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(options)))


def baseline_c_orientation(
    n: UndirectedNetwork,
    cls: ClassPredicate = TREE_CHILD,
    *,
    budget: int = DEFAULT_BASELINE_BUDGET,
    prune_admissible: bool = False,
    timeout: Optional[float] = None,
    observer: Optional[Observer] = None,
    parallel: int = 1,
) -> Outcome:
    """Try every r-subset of internal vertices with every root edge.

    Raises :class:`BudgetExceededError` when the number of subsets exceeds
    ``budget``. With ``prune_admissible`` subsets that cannot be matched to
    a minimal cycle basis are skipped.
    """
    start = time.perf_counter()
    size = baseline_space_size(n)
    if size > budget:
        raise BudgetExceededError(f"{size} reticulation sets exceed budget {budget}")
    r = reticulation_number(n)
    placements: Iterable[tuple[str, ...]] = combinations(n.internal, r)
    if prune_admissible and r > 0:
        b = minimal_cycle_basis(n)
        placements = (s for s in placements if placement_admissible(b, s))
    found, tried, calls = _run(n, placements, cls, _deadline(timeout), observer, parallel)
    return _finish(n, found, tried, calls, start, Verdict.NO, "baseline")


def check_orientation(
    n: UndirectedNetwork,
    d: DirectedNetwork,
    reticulations: Iterable[str],
    cls: ClassPredicate = ANY,
) -> list[str]:
    """Post-hoc audit of a claimed orientation of ``n``; empty list when sound."""
    problems = list(validate_directed(d).violations)
    want = frozenset(reticulations)
    if d.reticulations != want:
        problems.append(
            f"reticulations {sorted(d.reticulations)} differ from placement {sorted(want)}"
        )
    if not cls.test(d):
        problems.append(f"not in class {cls.name}")
    try:
        if suppress_root(d) != n:
            problems.append("suppressing the root does not give back the input")
    except SuppressionError as exc:
        problems.append(str(exc))
    return problems
