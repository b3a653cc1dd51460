import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phyorient.genny import GenConfig, generate
from phyorient.netmodel import (
    DirectedNetwork,
    InvalidNetworkError,
    SuppressionError,
    UndirectedNetwork,
    distance,
    has_tree_child_forbidden_subgraph,
    is_acyclic,
    is_stack_free,
    is_tree_child,
    isomorphic,
    reticulation_number,
    suppress_root,
    validate_directed,
    validate_undirected,
)

from helpers import fixture, with_leaves

TRIANGLE = [("a", "b"), ("b", "c"), ("a", "c")]


def oriented_triangle() -> DirectedNetwork:
    arcs = [("r", "a"), ("r", "la"), ("a", "b"), ("a", "c"), ("c", "b"), ("b", "lb"), ("c", "lc")]
    return DirectedNetwork.build(arcs, "r", {"la": "xa", "lb": "xb", "lc": "xc"})


def test_triangle_with_three_leaves_is_valid():
    n = with_leaves(TRIANGLE, "abc")
    assert reticulation_number(n) == 1
    assert n.leaves == {"la", "lb", "lc"}
    assert n.internal == ("a", "b", "c")


def test_single_edge_two_leaf_tree_is_valid():
    n = UndirectedNetwork.build([("p", "q")], {"p": "x1", "q": "x2"})
    assert reticulation_number(n) == 0


def test_triangle_with_one_leaf_reports_degree_two_vertices():
    report = validate_undirected(TRIANGLE + [("a", "la")], {"la": "x1"})
    assert not report.ok
    text = " ".join(report.violations)
    assert "vertex b has degree 2" in text
    assert "vertex c has degree 2" in text


@pytest.mark.parametrize(
    "edges, labels, needle",
    [
        ([("a", "a"), ("a", "x"), ("a", "y")], {"x": "1", "y": "2"}, "loop"),
        ([("x", "y"), ("y", "x")], {"x": "1", "y": "2"}, "parallel"),
        ([("x", "y"), ("u", "v")], {"x": "1", "y": "2", "u": "3", "v": "4"}, "not connected"),
        ([("x", "y")], {"x": "1", "y": "1"}, "used by 2 leaves"),
        ([("x", "y")], {"x": "1"}, "no leaf label"),
    ],
)
def test_validation_names_the_broken_rule(edges, labels, needle):
    report = validate_undirected(edges, labels)
    assert any(needle in v for v in report.violations), report.violations


def test_build_rejects_invalid_input():
    with pytest.raises(InvalidNetworkError):
        UndirectedNetwork.build(TRIANGLE, {"a": "x"})


def test_reticulation_number_examples():
    assert reticulation_number(fixture("two_triangles_shared_edge")) == 2
    quartet = [("a", "b"), ("a", "x1"), ("a", "x2"), ("b", "x3"), ("b", "x4")]
    tree = UndirectedNetwork.build(quartet, {f"x{i}": str(i) for i in range(1, 5)})
    assert reticulation_number(tree) == 0


def test_distance_examples():
    n = with_leaves(TRIANGLE, "abc")
    assert distance(n, "a", "a") == 0
    assert distance(n, "a", "c") == 1
    assert distance(n, "la", "lb") == 3


def test_is_acyclic_examples():
    assert is_acyclic([("a", "b"), ("b", "c")])
    assert not is_acyclic([("a", "b"), ("b", "c"), ("c", "a")])


def test_oriented_triangle_is_tree_child_and_round_trips():
    d = oriented_triangle()
    assert validate_directed(d).ok
    assert d.reticulations == {"b"}
    assert is_tree_child(d)
    assert suppress_root(d) == with_leaves(TRIANGLE, "abc")


def test_two_reticulation_children_is_not_tree_child():
    # v has reticulation children p and q
    arcs = [
        ("r", "v"), ("r", "w"), ("v", "p"), ("v", "q"), ("w", "p"), ("w", "s"),
        ("s", "q"), ("s", "l1"), ("p", "l2"), ("q", "l3"),
    ]
    d = DirectedNetwork.build(arcs, "r", {"l1": "1", "l2": "2", "l3": "3"})
    assert validate_directed(d).ok
    assert not is_tree_child(d)
    assert has_tree_child_forbidden_subgraph(d)


def test_two_leaf_tree_suppresses_to_single_edge():
    d = DirectedNetwork.build([("r", "x"), ("r", "y")], "r", {"x": "1", "y": "2"})
    assert suppress_root(d) == UndirectedNetwork.build([("x", "y")], {"x": "1", "y": "2"})


def test_suppression_fails_when_root_children_are_adjacent():
    arcs = [("r", "a"), ("r", "b"), ("a", "b"), ("a", "la"), ("b", "lb")]
    d = DirectedNetwork.build(arcs, "r", {"la": "1", "lb": "2"})
    with pytest.raises(SuppressionError):
        suppress_root(d)


def test_isomorphism_ignores_internal_ids_but_not_labels():
    a = with_leaves(TRIANGLE, "abc")
    renamed = UndirectedNetwork.build(
        [("p", "q"), ("q", "s"), ("p", "s"), ("p", "la"), ("q", "lb"), ("s", "lc")],
        {"la": "xa", "lb": "xb", "lc": "xc"},
    )
    assert isomorphic(a, renamed)
    relabelled = UndirectedNetwork.build(a.edges, {"la": "xa", "lb": "xb", "lc": "zz"})
    assert not isomorphic(a, relabelled)


configs = st.builds(
    GenConfig,
    n_leaves=st.integers(2, 9),
    p_r=st.sampled_from([0.0, 0.1, 0.2, 0.3]),
    seed=st.integers(0, 2**32),
)


@settings(max_examples=300, deadline=None)
@given(configs)
def test_degree_count_identities(cfg):
    n = generate(cfg).network
    x, r = n.n_leaves, reticulation_number(n)
    assert 2 * len(n.edges) == x + 3 * (len(n.vertices) - x)
    assert len(n.vertices) == 2 * x + 2 * r - 2
    assert len(n.edges) == 2 * x + 3 * r - 3


@settings(max_examples=1000, deadline=None)
@given(configs)
def test_tree_child_formulations_agree(cfg):
    d = generate(cfg).directed
    assert is_tree_child(d) == (not has_tree_child_forbidden_subgraph(d))
    if not d.reticulations:
        assert is_tree_child(d) and is_stack_free(d)
