"""Samplers, the monotone edge coupling, and leaf removal."""

import pytest

from frozenrank.errors import ResourceCapError
from frozenrank.exactla import Matrix
from frozenrank.field import FieldSpec
from frozenrank.prf import Stream
from frozenrank.randgraph import (
    CouplingSource,
    Graph,
    WeightTemplate,
    format_graph,
    karp_sipser,
    nullity_invariance_check,
    parse_graph,
    sample_A,
    sample_T,
    sample_graph,
)

F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)
F5 = FieldSpec.prime(5)
Q = FieldSpec.rationals()


def triangle(field=F2, w=1):
    return Graph(3, field, ((0, 1, w), (0, 2, w), (1, 2, w)))


def path3(field=F2, w=1):
    return Graph(3, field, ((0, 1, w), (1, 2, w)))


# ----------------------------------------------------------------- sampling


def test_p_zero_gives_zero_matrix():
    A = sample_A(8, 0.0, WeightTemplate(F2, 8), CouplingSource(1))
    assert A == Matrix.zeros(F2, 8, 8)


def test_p_one_gives_complete_graph():
    A = sample_A(5, 1.0, WeightTemplate(F2, 5), CouplingSource(1))
    vals = A.to_values()
    assert all(vals[i][j] == (i != j) for i in range(5) for j in range(5))


def test_sampling_deterministic():
    tpl = WeightTemplate(F5, 50, "random", seed=3)
    cpl = CouplingSource(17)
    assert sample_A(50, 0.1, tpl, cpl) == sample_A(50, 0.1, tpl, cpl)
    assert sample_graph(50, 0.1, tpl, cpl) == sample_graph(50, 0.1, tpl, cpl)


def test_matrix_matches_graph_adjacency():
    tpl = WeightTemplate(F3, 40, "random", seed=5)
    cpl = CouplingSource(23)
    assert sample_A(40, 0.12, tpl, cpl) == sample_graph(40, 0.12, tpl, cpl).adjacency()


def test_monotone_coupling():
    tpl = WeightTemplate(F2, 80)
    cpl = CouplingSource(5)
    supports = []
    for p in (0.01, 0.05, 0.2, 0.8):
        G = sample_graph(80, p, tpl, cpl)
        supports.append({(i, j) for i, j, _ in G.edges})
    for small, large in zip(supports, supports[1:]):
        assert small <= large


def test_support_independent_of_field_and_weights():
    cpl = CouplingSource(77)
    base = {(i, j) for i, j, _ in sample_graph(60, 0.08, WeightTemplate(F2, 60), cpl).edges}
    for tpl in (WeightTemplate(F5, 60, "random", 9), WeightTemplate(Q, 60, "random", 9)):
        got = {(i, j) for i, j, _ in sample_graph(60, 0.08, tpl, cpl).edges}
        assert got == base


def test_sample_validation():
    tpl = WeightTemplate(F2, 5)
    with pytest.raises(ValueError):
        sample_A(6, 0.5, tpl, CouplingSource(0))  # template too small
    with pytest.raises(ValueError):
        sample_A(5, 1.5, tpl, CouplingSource(0))
    with pytest.raises(ValueError):
        WeightTemplate(F2, 5, "weird")


def test_template_entries_nonzero_and_symmetric():
    tpl = WeightTemplate(F5, 20, "random", seed=1)
    for i in range(5):
        for j in range(5):
            if i != j:
                w = tpl.entry(i, j)
                assert not w.is_zero()
                assert w == tpl.entry(j, i)
    with pytest.raises(ValueError):
        tpl.entry(2, 2)


# ----------------------------------------------------------- T-matrices


def test_T_identity_permutation_equals_A():
    tpl = WeightTemplate(F5, 30, "random", seed=2)
    cpl = CouplingSource(8)
    T = sample_T(30, 30, 0.1, tpl, cpl, perm=range(30))
    assert T == sample_A(30, 0.1, tpl, cpl)


def test_T_nested_in_n():
    tpl = WeightTemplate(F3, 25, "random", seed=4)
    cpl = CouplingSource(12)
    for n in (3, 9, 17):
        small = sample_T(n, 25, 0.15, tpl, cpl, perm_seed=6)
        bigger = sample_T(n + 1, 25, 0.15, tpl, cpl, perm_seed=6)
        assert bigger.remove(rows=[n], cols=[n]) == small


def test_T_full_size_rank_equals_A_rank():
    tpl = WeightTemplate(F2, 30)
    cpl = CouplingSource(3)
    A = sample_A(30, 0.1, tpl, cpl)
    for seed in range(20):
        T = sample_T(30, 30, 0.1, tpl, cpl, perm_seed=seed)
        assert T.rank() == A.rank()


def test_T_validation():
    tpl = WeightTemplate(F2, 10)
    with pytest.raises(ValueError):
        sample_T(11, 10, 0.5, tpl, CouplingSource(0))
    with pytest.raises(ValueError):
        sample_T(3, 10, 0.5, tpl, CouplingSource(0), perm=[0, 1])


def test_T_rational_matches_prime_support():
    cpl = CouplingSource(31)
    TQ = sample_T(12, 12, 0.3, WeightTemplate(Q, 12, "random", 5), cpl, perm_seed=2)
    T2 = sample_T(12, 12, 0.3, WeightTemplate(F2, 12), cpl, perm_seed=2)
    for i in range(12):
        for j in range(12):
            assert TQ.entry(i, j).is_zero() == T2.entry(i, j).is_zero()


# ------------------------------------------------------------ leaf removal


def test_ks_triangle():
    ks = karp_sipser(triangle())
    assert ks.isolated_count == 0
    assert ks.core_vertices == (0, 1, 2)
    assert ks.removed_pairs == ()


def test_ks_path3():
    ks = karp_sipser(path3())
    assert ks.isolated_count == 1
    assert ks.core_vertices == ()
    assert ks.removed_pairs == ((0, 1),)  # lowest-index leaf first


def test_ks_empty_graph():
    ks = karp_sipser(Graph(7, F2, ()))
    assert ks.isolated_count == 7 and ks.core_vertices == ()


def test_ks_accounting_invariant():
    stream = Stream(15)
    for trial in range(30):
        tpl = WeightTemplate(F2, 50)
        G = sample_graph(50, stream.randbelow(40) / 100, tpl, CouplingSource(trial))
        ks = karp_sipser(G)
        assert ks.isolated_count + len(ks.core_vertices) + 2 * len(ks.removed_pairs) == 50
        assert min(ks.core.degrees(), default=2) >= 2


def test_ks_order_independence():
    # randomized removal orders agree on the isolated count and core set
    for g_seed in range(50):
        G = sample_graph(60, 3 / 60, WeightTemplate(F2, 60), CouplingSource(1000 + g_seed))
        base = karp_sipser(G)
        for order_seed in range(20):
            ks = karp_sipser(G, order_seed=order_seed)
            assert ks.isolated_count == base.isolated_count
            assert ks.core_vertices == base.core_vertices


def test_two_leaves_one_neighbor():
    # star with two leaves: removing one pair isolates the other leaf
    star = Graph(3, F2, ((0, 1, 1), (0, 2, 1)))
    ks = karp_sipser(star)
    assert ks.isolated_count == 1
    assert ks.core_vertices == ()
    assert len(ks.removed_pairs) == 1


# ------------------------------------------------------- nullity invariance


@pytest.mark.parametrize("field,w", [(F2, 1), (F3, 2), (F5, 4), (Q, 1)])
def test_nullity_invariance_examples(field, w):
    assert nullity_invariance_check(path3(field, w))
    assert nullity_invariance_check(triangle(field, w))
    assert nullity_invariance_check(Graph(5, field, ()))


def test_nullity_invariance_random_graphs():
    for trial in range(25):
        for field, kind in ((F2, "allones"), (F5, "random")):
            tpl = WeightTemplate(field, 60, kind, seed=trial)
            G = sample_graph(60, 2.0 / 60, tpl, CouplingSource(500 + trial))
            assert nullity_invariance_check(G)


def test_leaf_removal_upper_bound():
    for trial in range(20):
        tpl = WeightTemplate(F3, 70, "random", seed=trial)
        G = sample_graph(70, 3.0 / 70, tpl, CouplingSource(900 + trial))
        assert G.adjacency().rank() <= 70 - karp_sipser(G).isolated_count


def test_nullity_invariance_cap():
    with pytest.raises(ResourceCapError):
        nullity_invariance_check(Graph(10, F2, ()), cap=5)


# ------------------------------------------------------------- text format


def test_graph_format_roundtrip():
    tpl = WeightTemplate(F5, 30, "random", seed=1)
    G = sample_graph(30, 0.1, tpl, CouplingSource(2))
    assert parse_graph(format_graph(G)) == G
    GQ = sample_graph(10, 0.4, WeightTemplate(Q, 10, "random", 2), CouplingSource(3))
    assert parse_graph(format_graph(GQ)) == GQ


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(3, F2, ((0, 0, 1),))  # self-loop
    with pytest.raises(ValueError):
        Graph(3, F2, ((0, 1, 1), (1, 0, 1)))  # duplicate
    with pytest.raises(ValueError):
        Graph(3, F2, ((0, 1, 0),))  # zero weight
    with pytest.raises(ValueError):
        parse_graph("2 1 F2\n0 1\n")
