import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperfactor.exact import PowerProduct
from hyperfactor.exceptions import GuardError, InvalidHypergraphError, UndefinedParameterError
from hyperfactor.hypergraph import Hypergraph, complete
from hyperfactor.pattern import (
    Pattern,
    alpha_is_zero,
    assemble_glued,
    d_star,
    glue_union,
    is_strictly_balanced,
    link_is_partite,
    phi,
    phi_exact,
    phi_union_bound_check,
    threshold_probability,
)

from oracles import (
    dstar_by_edge_subsets,
    link_partite_by_colourings,
    phi_by_edge_subsets,
    strictly_balanced_by_edge_subsets,
)
from strategies import patterns

K3 = Pattern.from_edges(2, 3, [(0, 1), (1, 2), (0, 2)])
K4_MINUS = Pattern.from_edges(3, 4, [(0, 1, 2), (0, 1, 3), (0, 2, 3)])
K5_3 = Pattern(complete(5, 3))
FANO = Pattern.from_edges(3, 7, [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6),
                                 (2, 3, 6), (2, 4, 5)])


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_single_edge_density(k):
    assert d_star(Pattern.single_edge(k)).value == Fraction(1, k - 1)


def test_known_densities():
    assert d_star(K3).value == Fraction(3, 2)
    ds = d_star(K4_MINUS)
    assert ds.value == 1 and ds.vertices == 4 and ds.edges == 3


def test_edgeless_pattern_is_rejected():
    F = Pattern(Hypergraph(3, 4, []))
    with pytest.raises(UndefinedParameterError):
        d_star(F)


def test_phi_of_triangle():
    value, minimiser = phi(K3, 100, math.log(0.1))
    assert value == pytest.approx(math.log(1000))
    exact, _ = phi_exact(K3, 100, PowerProduct.of(Fraction(1, 10)))
    assert exact == PowerProduct.of(1000)


def test_phi_single_edge_is_n_to_k_p():
    F = Pattern.single_edge(3)
    value, _ = phi(F, 40, math.log(0.3))
    assert value == pytest.approx(3 * math.log(40) + math.log(0.3))


@settings(max_examples=200, deadline=None)
@given(patterns())
def test_d_star_matches_edge_subset_oracle(F):
    ds = d_star(F)
    assert ds.value == dstar_by_edge_subsets(F.edges)
    assert ds.value >= Fraction(F.f, F.b - 1)
    # the reported J realises the value
    assert Fraction(ds.J.f, ds.J.b - 1) == ds.value
    assert ds.J.f == ds.edges and ds.J.b == ds.vertices


@settings(max_examples=150, deadline=None)
@given(patterns(max_b=5, max_edges=10), st.integers(5, 60),
       st.fractions(min_value=Fraction(1, 20), max_value=3, max_denominator=20))
def test_phi_matches_edge_subset_oracle(F, n, p):
    P = PowerProduct.of(p)
    exact, _ = phi_exact(F, n, P)
    assert exact == phi_by_edge_subsets(F.edges, n, P)
    if p > 1:
        return
    approx, _ = phi(F, n, math.log(p))
    assert approx == pytest.approx(exact.log(), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(patterns())
def test_strict_balance_matches_oracle(F):
    assert is_strictly_balanced(F) == strictly_balanced_by_edge_subsets(F.edges, F.b)


def test_balance_examples():
    assert is_strictly_balanced(Pattern.single_edge(3))
    assert is_strictly_balanced(K3)
    assert not is_strictly_balanced(Pattern.from_edges(2, 4, [(0, 1), (2, 3)]))


def test_links_of_k4_minus():
    assert [link_is_partite(K4_MINUS, v) for v in range(4)] == [False, True, True, True]
    assert alpha_is_zero(K4_MINUS)


def test_alpha_examples():
    assert not alpha_is_zero(K5_3)
    assert alpha_is_zero(FANO)
    assert alpha_is_zero(K3)
    assert alpha_is_zero(Pattern.from_edges(3, 6, [(0, 2, 4), (1, 3, 5), (0, 3, 4), (1, 2, 5)]))


@settings(max_examples=200, deadline=None)
@given(patterns(ks=(3, 4), max_b=6, max_edges=8), st.data())
def test_link_partiteness_matches_colouring_oracle(F, data):
    v = data.draw(st.integers(0, F.b - 1))
    assert link_is_partite(F, v) == link_partite_by_colourings(F.edges, v, F.k)


@settings(max_examples=100, deadline=None)
@given(patterns(max_b=6, max_edges=8), st.randoms(use_true_random=False))
def test_alpha_invariant_under_relabelling(F, rnd):
    perm = list(range(F.b))
    rnd.shuffle(perm)
    G = Pattern.from_edges(F.k, F.b, [tuple(sorted(perm[u] for u in e)) for e in F.edges])
    assert alpha_is_zero(F) == alpha_is_zero(G)


def test_glued_single_edge():
    for k in (2, 3, 4):
        F = Pattern.single_edge(k)
        member = assemble_glued(F, [(i, 0) for i in range(k)])
        assert member.graph.n == k * k
        assert member.graph.num_edges == k + 1


def test_glued_member_structure_and_repeats():
    member = assemble_glued(K3, [(0, 1), (1, 2), (2, 0)])
    member.check()
    assert member.graph.n == 9
    # two petals on one centre vertex would meet each other
    with pytest.raises(InvalidHypergraphError):
        assemble_glued(K3, [(0, 1), (0, 2), (2, 0)])
    with pytest.raises(InvalidHypergraphError):
        assemble_glued(K3, [(0, 0), (1, 0)])
    with pytest.raises(InvalidHypergraphError):
        assemble_glued(K3, [(0, 0), (1, 0), (3, 0)])


def test_glue_union_requires_one_shared_vertex():
    E = Pattern.single_edge(3)
    with pytest.raises(InvalidHypergraphError):
        glue_union(E, E, [(0, 0), (1, 1)])
    with pytest.raises(InvalidHypergraphError):
        glue_union(E, E, [])
    assert glue_union(E, E, [(0, 0)]).b == 5


def test_union_bound_examples():
    E = Pattern.single_edge(3)
    assert phi_union_bound_check(E, E, [(0, 0)], 50, 0.2)
    for n in (10, 30, 100):
        for p in (0.01, 0.1, 0.5, 0.9):
            assert phi_union_bound_check(K3, K3, [(1, 2)], n, p)
    with pytest.raises(UndefinedParameterError):
        phi_union_bound_check(E, Pattern(Hypergraph(3, 3, [])), [(0, 0)], 10, 0.5)


@settings(max_examples=100, deadline=None)
@given(patterns(max_b=5, max_edges=8), st.sampled_from([1, 2, 5]), st.integers(2, 200))
def test_threshold_probability_gives_phi_at_least_cn(F, c, n):
    p = threshold_probability(F, n, c)
    assert phi_exact(F, n, p)[0] >= PowerProduct.of(c * n)


def test_pattern_vertex_guard():
    F = Pattern(Hypergraph(2, 21, [(0, 1)]))
    with pytest.raises(GuardError):
        d_star(F)
