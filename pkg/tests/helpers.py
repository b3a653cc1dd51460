"""Shared corpora and small builders for the test suite."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from phyorient.cyclebasis import CycleBasis, cycle_from_mask
from phyorient.fileio import read_network
from phyorient.genny import GenConfig, generate
from phyorient.netmodel import UndirectedNetwork, norm_edge, reticulation_number

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> UndirectedNetwork:
    return read_network(FIXTURES / f"{name}.txt")


def with_leaves(edges, leafy) -> UndirectedNetwork:
    """Attach a leaf ``l<v>`` labelled ``x<v>`` to every vertex in ``leafy``."""
    edges = list(edges) + [(v, "l" + v) for v in leafy]
    return UndirectedNetwork.build(edges, {"l" + v: "x" + v for v in leafy})


def basis_from_rows(n: UndirectedNetwork, text: str) -> CycleBasis:
    """Parse one cycle per line, vertices in cyclic order."""
    cycles = []
    for line in text.splitlines():
        vs = line.split()
        if not vs:
            continue
        mask = 0
        for a, b in zip(vs, vs[1:] + vs[:1]):
            mask |= 1 << n.edge_index[norm_edge(a, b)]
        cycles.append(cycle_from_mask(n, mask))
    return CycleBasis(tuple(cycles))


@lru_cache(maxsize=None)
def corpus(n_leaves: int, p_r: float, seeds: range, r_min: int = 0, r_max: int = 99):
    """Generated networks ``(name, network)`` whose cycle rank lies in ``[r_min, r_max]``."""
    out = []
    for seed in seeds:
        n = generate(GenConfig(n_leaves, p_r, seed)).network
        if r_min <= reticulation_number(n) <= r_max:
            out.append((f"net_{n_leaves}_{p_r:g}_{seed}", n))
    return tuple(out)


# the desk-scale corpus shared by the acceptance and property suites
def desk_corpus():
    return corpus(10, 0.15, range(400), 1, 4)
