"""Random binary phylogenetic networks from a backwards split/coalesce process.

Starting from ``n`` extant lineages, each step either coalesces two lineages
into a new tree vertex (probability ``1 - p_r``) or splits one lineage into
two new parents (probability ``p_r``), until a single lineage remains. The
raw DAG is then cleaned into a binary network and unrooted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from phyorient.netmodel import (
    DirectedNetwork,
    SuppressionError,
    UndirectedNetwork,
    suppress_root,
    validate_directed,
)

RNG_NAME = "mt19937-float53-v1"
SEED_STRIDE = 0x9E3779B97F4A7C15
MAX_RETRIES = 1000


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    n_leaves: int
    p_r: float
    seed: int = 0
    max_steps: int = 100_000

    def __post_init__(self):
        if self.n_leaves < 2:
            raise ValueError("need at least 2 leaves")
        if not 0.0 <= self.p_r < 1.0:
            raise ValueError("p_r must lie in [0, 1)")


@dataclass(frozen=True)
class GenStep:
    taxa_before: tuple[int, ...]
    selected: tuple[int, ...]
    event: str  # "Coalesce" | "Split"
    new_taxa: tuple[int, ...]
    new_arcs: tuple[tuple[int, int], ...]


@dataclass
class GenTrace:
    steps: list[GenStep] = field(default_factory=list)
    retries: int = 0


class Chooser(Protocol):
    def split(self, taxa: Sequence[int]) -> bool: ...
    def pick_one(self, taxa: Sequence[int]) -> int: ...
    def pick_two(self, taxa: Sequence[int]) -> tuple[int, int]: ...


class RandomChooser:
    """Draws from Mersenne Twister using only ``random()``, whose stream is stable."""

    def __init__(self, seed: int, p_r: float):
        self.rng = random.Random(seed)
        self.p_r = p_r

    def _index(self, k: int) -> int:
        return min(int(self.rng.random() * k), k - 1)

    def split(self, taxa):
        return self.rng.random() < self.p_r

    def pick_one(self, taxa):
        return taxa[self._index(len(taxa))]

    def pick_two(self, taxa):
        i = self._index(len(taxa))
        j = self._index(len(taxa) - 1)
        if j >= i:
            j += 1
        return taxa[i], taxa[j]


class ScriptedChooser:
    """Replays a fixed list of events, e.g. ``[(3, 4), (2,), ...]``.

    A pair means coalesce those two lineages, a singleton means split it.
    """

    def __init__(self, script: Sequence[tuple[int, ...]]):
        self.script = list(script)
        self.pos = 0

    def split(self, taxa):
        return len(self.script[self.pos]) == 1

    def pick_one(self, taxa):
        (t,) = self.script[self.pos]
        self.pos += 1
        return t

    def pick_two(self, taxa):
        a, b = self.script[self.pos]
        self.pos += 1
        return a, b


def generate_raw_dag(
    cfg: GenConfig, chooser: Optional[Chooser] = None
) -> tuple[list[tuple[int, int]], GenTrace]:
    """Run the backwards process; vertices 1..n are the leaves."""
    ch = chooser if chooser is not None else RandomChooser(cfg.seed, cfg.p_r)
    taxa = list(range(1, cfg.n_leaves + 1))
    nxt = cfg.n_leaves + 1
    arcs: list[tuple[int, int]] = []
    trace = GenTrace()
    while len(taxa) > 1:
        if len(trace.steps) >= cfg.max_steps:
            raise GenerationError(f"no single lineage after {cfg.max_steps} steps")
        before = tuple(taxa)
        if ch.split(taxa):
            t = ch.pick_one(taxa)
            a, b = nxt, nxt + 1
            nxt += 2
            new = ((a, t), (b, t))
            taxa.remove(t)
            taxa += [a, b]
            step = GenStep(before, (t,), "Split", (a, b), new)
        else:
            x, y = ch.pick_two(taxa)
            c = nxt
            nxt += 1
            new = ((c, x), (c, y))
            taxa.remove(x)
            taxa.remove(y)
            taxa.append(c)
            step = GenStep(before, (x, y), "Coalesce", (c,), new)
        arcs.extend(new)
        trace.steps.append(step)
    return arcs, trace


def binarize_and_suppress(raw: Sequence[tuple[int, int]], n_leaves: int) -> DirectedNetwork:
    """Suppress (1,1) vertices and resolve over-degree vertices.

    A vertex with in-degree 2 and out-degree other than 1 gets a fresh
    reticulation inserted above it that takes over both incoming arcs.
    Out-degree above 2 is resolved by a fresh child taking the two smallest
    children. Raises :class:`SuppressionError` on a parallel arc.
    """
    parents: dict[int, list[int]] = {}
    children: dict[int, list[int]] = {}
    for u, v in raw:
        children.setdefault(u, []).append(v)
        parents.setdefault(v, []).append(u)
        children.setdefault(v, [])
        parents.setdefault(u, [])
    nxt = max(children) + 1

    for v in sorted(children):
        if len(parents[v]) == 1 and len(children[v]) == 1:
            (p,) = parents[v]
            (c,) = children[v]
            children[p][children[p].index(v)] = c
            parents[c][parents[c].index(v)] = p
            del parents[v], children[v]

    for u in children:
        if len(set(children[u])) != len(children[u]):
            raise SuppressionError(f"suppression creates parallel arcs below {u}")

    for v in sorted(children):
        if len(parents[v]) == 2 and len(children[v]) != 1:
            w = nxt
            nxt += 1
            parents[w] = parents[v]
            for p in parents[w]:
                children[p][children[p].index(v)] = w
            children[w] = [v]
            parents[v] = [w]
    for v in sorted(children):
        while len(children[v]) > 2:
            a, b = sorted(children[v])[:2]
            w = nxt
            nxt += 1
            children[v] = [c for c in children[v] if c not in (a, b)] + [w]
            children[w] = [a, b]
            parents[w] = [v]
            for c in (a, b):
                parents[c][parents[c].index(v)] = w

    (root,) = [v for v in children if not parents[v]]
    arcs = [(str(u), str(v)) for u, cs in children.items() for v in cs]
    labels = {str(i): f"x{i}" for i in range(1, n_leaves + 1)}
    d = DirectedNetwork.build(arcs, str(root), labels)
    report = validate_directed(d)
    if not report.ok:
        raise GenerationError("; ".join(report.violations))
    return d


def to_undirected(d: DirectedNetwork) -> UndirectedNetwork:
    return suppress_root(d)


@dataclass(frozen=True)
class Generated:
    network: UndirectedNetwork
    directed: DirectedNetwork
    trace: GenTrace
    seed_used: int


def attempt_seed(seed: int, attempt: int) -> int:
    return (seed + attempt * SEED_STRIDE) % (1 << 64)


def generate(cfg: GenConfig) -> Generated:
    """Generate one undirected network; collisions trigger a reseeded retry."""
    for attempt in range(MAX_RETRIES):
        s = attempt_seed(cfg.seed, attempt)
        raw, trace = generate_raw_dag(cfg, RandomChooser(s, cfg.p_r))
        try:
            d = binarize_and_suppress(raw, cfg.n_leaves)
            n = to_undirected(d)
        except SuppressionError:
            continue
        trace.retries = attempt
        return Generated(n, d, trace, s)
    raise GenerationError(f"no simple network after {MAX_RETRIES} attempts")
