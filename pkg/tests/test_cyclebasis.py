import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phyorient.cyclebasis import (
    CycleBasis,
    all_minimal_bases,
    baseline_space_size,
    cycle_from_mask,
    exhaustive_minimum_length,
    horton_minimum_length,
    minimal_cycle_basis,
    search_space_size,
    verify_cycle_basis,
)
from phyorient.fileio import format_network, parse_network
from phyorient.genny import GenConfig, generate
from phyorient.netmodel import norm_edge, reticulation_number
from phyorient.solvers import best_placements

from helpers import FIXTURES, basis_from_rows, fixture, with_leaves


def mask_of(n, *pairs):
    m = 0
    for a, b in pairs:
        m |= 1 << n.edge_index[norm_edge(a, b)]
    return m


def test_triangle_basis():
    n = fixture("triangle")
    b = minimal_cycle_basis(n)
    assert len(b) == 1 and b.total_length == 3
    assert b.cycles[0].vertices == ("a", "b", "c")


def test_two_triangles_prefer_triangles_over_outer_square():
    n = fixture("two_triangles_shared_edge")
    b = minimal_cycle_basis(n)
    assert b.total_length == 6
    assert sorted(c.length for c in b.cycles) == [3, 3]
    assert exhaustive_minimum_length(n) == 6
    assert len(all_minimal_bases(n)) == 1


def test_outer_square_basis_fails_only_minimality():
    n = fixture("two_triangles_shared_edge")
    tri = cycle_from_mask(n, mask_of(n, ("u", "v"), ("v", "a"), ("a", "u")))
    square = cycle_from_mask(n, mask_of(n, ("u", "a"), ("a", "v"), ("v", "b"), ("b", "u")))
    rep = verify_cycle_basis(n, CycleBasis((tri, square)))
    assert rep.simple and rep.rank and rep.spanning
    assert not rep.minimal
    assert any("7" in p and "6" in p for p in rep.problems)


def test_duplicated_cycle_fails_rank():
    n = fixture("two_triangles_shared_edge")
    tri = minimal_cycle_basis(n).cycles[0]
    rep = verify_cycle_basis(n, CycleBasis((tri, tri)))
    assert not rep.rank and not rep.spanning and not rep.ok


def test_tree_input_is_rejected():
    n = generate(GenConfig(6, 0.0, 1)).network
    with pytest.raises(ValueError, match="input is a tree"):
        minimal_cycle_basis(n)


def test_non_cycle_mask_is_rejected():
    n = fixture("triangle")
    with pytest.raises(ValueError):
        cycle_from_mask(n, mask_of(n, ("a", "b"), ("b", "c")))


def test_search_space_sizes_on_tiny_networks():
    two = fixture("two_triangles_shared_edge")
    assert search_space_size(minimal_cycle_basis(two)) == 9
    assert baseline_space_size(two) == 6
    tri = fixture("triangle")
    assert search_space_size(minimal_cycle_basis(tri)) == 3
    assert baseline_space_size(tri) == 3


def test_minimal_bases_can_disagree_on_the_objective():
    # the alternative swaps one basic cycle for another of the same length
    n = fixture("basis_dependent_r6")
    chosen = minimal_cycle_basis(n)
    alt = basis_from_rows(n, (FIXTURES / "basis_dependent_r6.alt_basis.txt").read_text())
    assert verify_cycle_basis(n, alt).ok
    assert alt.total_length == chosen.total_length
    assert best_placements(n, chosen)[0] == 70
    assert best_placements(n, alt)[0] == 69


def test_small_network_with_several_minimal_bases():
    # theta graph with three paths of length 3 between s and t, plus a hanging triangle
    edges = []
    for p in "abc":
        seq = ["s", p + "1", p + "2", "t"]
        edges += list(zip(seq, seq[1:]))
    edges += [("a1", "q"), ("q", "y1"), ("y1", "y2"), ("y2", "q")]
    n = with_leaves(edges, ["a2", "b1", "b2", "c1", "c2", "y1", "y2"])
    bases = all_minimal_bases(n)
    assert len(bases) == 3
    assert all(sum(bin(m).count("1") for m in combo) == 15 for combo in bases)
    chosen = minimal_cycle_basis(n)
    assert tuple(sorted(c.mask for c in chosen.cycles)) in {tuple(sorted(c)) for c in bases}


def test_basis_dump_is_deterministic():
    n = fixture("basis_dependent_r6")
    again = parse_network(format_network(n))
    assert minimal_cycle_basis(n).dump() == minimal_cycle_basis(again).dump()


configs = st.builds(
    GenConfig,
    n_leaves=st.integers(3, 12),
    p_r=st.sampled_from([0.1, 0.2, 0.3]),
    seed=st.integers(0, 2**32),
)


@settings(max_examples=200, deadline=None)
@given(configs)
def test_total_length_matches_networkx(cfg):
    n = generate(cfg).network
    r = reticulation_number(n)
    if r == 0 or r > 8:
        return
    b = minimal_cycle_basis(n)
    g = nx.Graph(list(n.edges))
    ref = sum(len(c) for c in nx.minimum_cycle_basis(g))
    assert b.total_length == ref
    assert len(b) == r
    assert verify_cycle_basis(n, b).ok
    assert b.total_length == horton_minimum_length(n)
