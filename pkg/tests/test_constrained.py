import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phyorient.constrained import (
    MAX_ORACLE_EDGES,
    ROOT_ID,
    BudgetExceededError,
    OrientationConstraint,
    orient_constrained,
    orient_exhaustive_oracle,
)
from phyorient.genny import GenConfig, generate
from phyorient.netmodel import (
    UndirectedNetwork,
    is_acyclic,
    reticulation_number,
    suppress_root,
    validate_directed,
)

from helpers import desk_corpus, fixture, with_leaves

TRI = with_leaves([("a", "b"), ("b", "c"), ("a", "c")], "abc")


def test_triangle_unique_orientation():
    c = OrientationConstraint.of(("a", "la"), {"b"})
    res = orient_constrained(TRI, c)
    assert res.feasible
    want = {
        (ROOT_ID, "a"), (ROOT_ID, "la"), ("a", "b"), ("a", "c"),
        ("c", "b"), ("b", "lb"), ("c", "lc"),
    }
    assert set(res.network.arcs) == want
    oracle = orient_exhaustive_oracle(TRI, c)
    assert len(oracle) == 1 and oracle[0] == res.network
    assert orient_exhaustive_oracle(TRI, c, prune=False) == oracle


def test_triangle_reticulation_at_root_side_is_infeasible():
    c = OrientationConstraint.of(("a", "la"), {"a"})
    assert not orient_constrained(TRI, c).feasible
    assert orient_exhaustive_oracle(TRI, c) == []
    assert orient_exhaustive_oracle(TRI, c, prune=False) == []


def test_two_leaf_edge():
    n = UndirectedNetwork.build([("p", "q")], {"p": "x1", "q": "x2"})
    c = OrientationConstraint.of(("p", "q"), ())
    res = orient_constrained(n, c)
    assert set(res.network.arcs) == {(ROOT_ID, "p"), (ROOT_ID, "q")}
    assert orient_exhaustive_oracle(n, c) == [res.network]


def test_tree_orients_from_any_root_edge():
    n = generate(GenConfig(8, 0.0, 5)).network
    assert reticulation_number(n) == 0
    for e in n.edges:
        res = orient_constrained(n, OrientationConstraint.of(e, ()))
        assert res.feasible
        assert suppress_root(res.network) == n


@pytest.mark.parametrize(
    "root_edge, rets, needle",
    [
        (("a", "lb"), {"b"}, "not an edge"),
        (("a", "la"), {"la"}, "leaf"),
        (("a", "la"), {"a", "b"}, "need 1 reticulations"),
        (("a", "la"), {"zz"}, "unknown"),
    ],
)
def test_bad_constraints_raise(root_edge, rets, needle):
    with pytest.raises(ValueError, match=needle):
        orient_constrained(TRI, OrientationConstraint.of(root_edge, rets))


def test_oracle_refuses_large_networks():
    n = fixture("basis_dependent_r6")
    assert len(n.edges) > MAX_ORACLE_EDGES
    c = OrientationConstraint.of(n.edges[0], sorted(n.internal)[:6])
    with pytest.raises(BudgetExceededError):
        orient_exhaustive_oracle(n, c)


small_configs = st.builds(
    GenConfig,
    n_leaves=st.integers(2, 5),
    p_r=st.sampled_from([0.1, 0.3, 0.4]),
    seed=st.integers(0, 2**32),
)


@settings(max_examples=150, deadline=None)
@given(small_configs, st.randoms(use_true_random=False))
def test_pruning_does_not_change_the_oracle(cfg, rnd):
    n = generate(cfg).network
    if len(n.edges) > 14:
        return
    r = reticulation_number(n)
    c = OrientationConstraint.of(rnd.choice(n.edges), rnd.sample(n.internal, r))
    pruned = orient_exhaustive_oracle(n, c)
    assert pruned == orient_exhaustive_oracle(n, c, prune=False)
    assert len(pruned) <= 1
    res = orient_constrained(n, c)
    assert res.feasible == bool(pruned)
    if pruned:
        assert res.network == pruned[0]
        assert validate_directed(res.network).ok
        assert is_acyclic(res.network.arcs)


def test_propagation_work_is_linear():
    rnd = random.Random(7)
    worst = 0.0
    for _, n in desk_corpus()[:60]:
        r = reticulation_number(n)
        for _ in range(5):
            c = OrientationConstraint.of(rnd.choice(n.edges), rnd.sample(n.internal, r))
            res = orient_constrained(n, c)
            worst = max(worst, res.propagation_steps / len(n.edges))
            assert res.edges_oriented <= len(n.edges) + 1
    assert worst <= 4
