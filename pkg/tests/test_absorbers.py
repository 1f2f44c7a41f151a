import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperfactor.absorbers import (
    AbsorberStructure,
    AbsorbingConstants,
    TemplateGraph,
    absorb,
    bipartite_matching,
    build_absorbing_set,
    choose_root_vertex,
    compact_template,
    complete_template,
    find_absorber,
    find_simple_absorber,
    find_simple_labelling,
    is_absorber,
    is_simple_absorber,
    template_search,
    template_verify,
)
from hyperfactor.exceptions import (
    AbsorberBuildError,
    AbsorptionError,
    GuardError,
    InvalidHypergraphError,
)
from hyperfactor.factor import verify_tiling
from hyperfactor.hypergraph import Hypergraph, complete, empty
from hyperfactor.pattern import Pattern
from hyperfactor.random_models import SeededSampler, perturb

from oracles import template_ok_by_permanent

EDGE3 = Pattern.single_edge(3)
K3 = Pattern.from_edges(2, 3, [(0, 1), (1, 2), (0, 2)])
TOY = AbsorbingConstants.of(2, Fraction(1, 4), 12, Fraction(1, 12))


def thin(H, keep, seed):
    rng = random.Random(seed)
    return Hypergraph(H.k, H.n, [e for e in H.edges if rng.random() < keep])


# --- predicates ---------------------------------------------------------------------


def test_is_absorber_examples():
    H = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5)])
    assert is_absorber(H, (0, 1, 2), (3, 4, 5), EDGE3)
    H2 = Hypergraph(3, 6, [(3, 4, 5)])
    assert not is_absorber(H2, (0, 1, 2), (3, 4, 5), EDGE3)


def test_is_absorber_preconditions():
    H = complete(9, 3)
    with pytest.raises(InvalidHypergraphError):
        is_absorber(H, (0, 1), (3, 4, 5), EDGE3)
    with pytest.raises(InvalidHypergraphError):
        is_absorber(H, (0, 1, 2), (3, 4), EDGE3)
    with pytest.raises(InvalidHypergraphError):
        is_absorber(H, (0, 1, 2), (2, 4, 5), EDGE3)


def structure_on(n_start, b, labelling):
    vs = iter(range(n_start, n_start + b * b))
    return AbsorberStructure(tuple(tuple(next(vs) for _ in range(b)) for _ in range(b)), labelling)


def test_simple_absorber_in_complete_host():
    s = structure_on(3, 3, (0, 1, 2))
    H = complete(12, 3)
    assert is_simple_absorber(H, (0, 1, 2), s, EDGE3)
    assert is_absorber(H, (0, 1, 2), s.vertices, EDGE3)


def test_simple_absorber_fails_without_diagonal():
    s = structure_on(3, 3, (0, 1, 2))
    H = complete(12, 3)
    H = Hypergraph(3, 12, [e for e in H.edges if not set(e) <= set(s.diagonal)])
    assert not is_simple_absorber(H, (0, 1, 2), s, EDGE3)


def test_structure_validation():
    with pytest.raises(InvalidHypergraphError):
        AbsorberStructure(((3, 4, 5), (5, 6, 7), (8, 9, 10)), (0, 1, 2)).check(3)
    with pytest.raises(InvalidHypergraphError):
        AbsorberStructure(((0, 4, 5), (6, 7, 8), (9, 10, 11)), (0, 1, 2)).check(3)
    with pytest.raises(InvalidHypergraphError):
        is_simple_absorber(complete(12, 3), (0, 1, 3), structure_on(3, 3, (0, 1, 2)), EDGE3)


def test_labelling_wrapper():
    # only s_1 = 2 works for the first block
    blocks = ((3, 4, 5), (6, 7, 8), (9, 10, 11))
    edges = [(3, 4, 5), (6, 7, 8), (9, 10, 11), (5, 8, 11),
             (2, 3, 4), (0, 6, 7), (1, 9, 10)]
    H = Hypergraph(3, 12, edges)
    assert not is_simple_absorber(H, (0, 1, 2), AbsorberStructure(blocks, (0, 1, 2)), EDGE3)
    assert find_simple_labelling(H, (0, 1, 2), blocks, EDGE3) == (2, 0, 1)


# --- simple absorber search ---------------------------------------------------------


def test_found_with_full_random_part():
    host = complete(15, 3)
    inst = perturb(host, 1.0, SeededSampler(0))
    s = find_simple_absorber(inst, (0, 1, 2), EDGE3)
    assert s is not None
    assert is_simple_absorber(inst.union, (0, 1, 2), s, EDGE3)


def test_none_without_random_edges():
    # host edges all meet vertex 0..2 region; no diagonal copy avoiding them
    host = Hypergraph(3, 15, [e for e in complete(15, 3).edges if e[0] < 3])
    inst = perturb(host, 0.0, SeededSampler(0))
    assert find_simple_absorber(inst, (0, 1, 2), EDGE3) is None


def test_found_when_host_alone_suffices():
    inst = perturb(complete(14, 2), 0.0, SeededSampler(0))
    s = find_simple_absorber(inst, (0, 1, 2), K3)
    assert s is not None and is_simple_absorber(inst.union, (0, 1, 2), s, K3)


def test_forbidden_vertices_avoided():
    inst = perturb(complete(20, 3), 0.5, SeededSampler(3))
    forbidden = set(range(3, 9))
    s = find_simple_absorber(inst, (0, 1, 2), EDGE3, forbidden)
    assert s is not None and not forbidden & set(s.vertices)
    with pytest.raises(InvalidHypergraphError):
        find_simple_absorber(inst, (0, 1, 2), EDGE3, {0})


def test_root_vertex_prefers_partite_links():
    K4m = Pattern.from_edges(3, 4, [(0, 1, 2), (0, 1, 3), (0, 2, 3)])
    assert choose_root_vertex(K4m, complete(10, 3), (0, 1, 2, 3)) != 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([0.3, 1.0]))
def test_simple_implies_absorber(seed, p):
    host = thin(complete(16, 3), 0.8, seed)
    inst = perturb(host, p, SeededSampler(seed))
    S = tuple(sorted(random.Random(seed).sample(range(16), 3)))
    s = find_simple_absorber(inst, S, EDGE3)
    if s is not None:
        assert is_simple_absorber(inst.union, S, s, EDGE3)
        assert is_absorber(inst.union, S, s.vertices, EDGE3)


def test_generic_absorber_search():
    H = complete(12, 3)
    record = find_absorber(H, (0, 1, 2), EDGE3, forbidden=(3,))
    assert record is not None and len(record.vertices) == 3 and 3 not in record.vertices
    assert verify_tiling(EDGE3, H, record.alone, record.vertices)
    assert verify_tiling(EDGE3, H, record.with_s, set(record.vertices) | {0, 1, 2})
    assert find_absorber(empty(12, 3), (0, 1, 2), EDGE3) is None


# --- templates ----------------------------------------------------------------------


@pytest.mark.parametrize("m,beta", [(1, 1), (2, Fraction(1, 2)), (4, Fraction(1, 4)), (2, 2)])
def test_complete_and_compact_templates_verify(m, beta):
    assert template_verify(complete_template(m, beta), m, beta)
    assert template_verify(compact_template(m, beta), m, beta)
    B = compact_template(m, beta)
    assert B.x_size == m + beta * m and B.y_size == 2 * m and B.z_size == 3 * m


def test_isolated_z_vertex_fails():
    B = complete_template(2, Fraction(1, 2))
    B = TemplateGraph(2, Fraction(1, 2), frozenset(e for e in B.edges if e[1] != 0))
    assert not template_verify(B, 2, Fraction(1, 2))


def test_template_guard_and_shape():
    with pytest.raises(GuardError):
        template_verify(complete_template(9, 1), 9, 1)
    with pytest.raises(ValueError):
        template_verify(complete_template(2, 1), 3, 1)
    with pytest.raises(ValueError):
        complete_template(3, Fraction(1, 2))


def test_random_templates_match_permanent_oracle():
    m, beta = 2, Fraction(1, 2)
    rng = random.Random(11)
    pairs = list(itertools.product(range(7), range(6)))
    verdicts = set()
    for _ in range(150):
        edges = frozenset(e for e in pairs if rng.random() < rng.uniform(0.3, 0.8))
        B = TemplateGraph(m, beta, edges)
        ours = template_verify(B, m, beta)
        assert ours == template_ok_by_permanent(edges, m, 1)
        verdicts.add(ours)
    assert verdicts == {True, False}


def test_template_search():
    B, attempts = template_search(2, Fraction(1, 2), 10, SeededSampler(0), 5)
    assert B is not None and attempts == 1
    B, attempts = template_search(2, Fraction(1, 2), 0, SeededSampler(0), 5)
    assert B is None and attempts == 5
    B, attempts = template_search(2, Fraction(1, 2), 6, SeededSampler(1), 10**4)
    assert B is not None and B.max_degree <= 6 and template_verify(B, 2, Fraction(1, 2))


def test_matching_helper():
    adj = {0: [0, 1], 1: [0], 2: [2]}
    match = bipartite_matching([0, 1, 2], adj)
    assert match == {0: 1, 1: 0, 2: 2}


# --- absorbing set ------------------------------------------------------------------


def test_constants_from_rho():
    c = AbsorbingConstants.from_rho(Fraction(1, 2), 3)
    assert c.q == Fraction(1, 2) / (1300 * 9)
    assert c.beta == c.q ** 2 * Fraction(1, 2) / 8
    assert c.xi == c.beta * c.q / (2 * (1 + c.beta) * 2)


@pytest.fixture(scope="module")
def toy_state():
    return build_absorbing_set(complete(72, 3), EDGE3, TOY, sampler=SeededSampler(0),
                               template=compact_template(1, 12), absorber_size=3)


def test_toy_build(toy_state):
    st_ = toy_state
    assert len(st_.X) == 13 and len(st_.Y) == 2 and len(st_.Z) == 6
    assert len(st_.vertices) <= TOY.rho * 72 / 2
    assert st_.trace["footprint"] <= TOY.rho * 72 / 2


@pytest.mark.parametrize("size", [0, 3, 6])
def test_toy_absorb(toy_state, size):
    free = [v for v in range(72) if v not in toy_state.vertices]
    rng = random.Random(size)
    for _ in range(3):
        R = sorted(rng.sample(free, size))
        tiling = absorb(toy_state, R)
        assert verify_tiling(EDGE3, toy_state.H, tiling, set(toy_state.vertices) | set(R))


def test_absorb_errors(toy_state):
    free = [v for v in range(72) if v not in toy_state.vertices]
    with pytest.raises(AbsorptionError, match="divisibility"):
        absorb(toy_state, free[:1])
    roomy = build_absorbing_set(complete(81, 3), EDGE3, TOY, sampler=SeededSampler(0),
                                template=compact_template(1, 12), absorber_size=3)
    spare = [v for v in range(81) if v not in roomy.vertices]
    with pytest.raises(AbsorptionError, match="xi"):
        absorb(roomy, spare[:9])
    with pytest.raises(AbsorptionError):
        absorb(toy_state, [toy_state.X[0], free[0], free[1]])


def test_edgeless_host_fails_at_allocation():
    with pytest.raises(AbsorberBuildError) as err:
        build_absorbing_set(empty(72, 3), EDGE3, TOY, sampler=SeededSampler(0),
                            template=compact_template(1, 12), absorber_size=3)
    assert err.value.stage == "allocation"


def test_paper_constants_fail_at_small_n():
    with pytest.raises(AbsorberBuildError) as err:
        build_absorbing_set(complete(27, 3), EDGE3, AbsorbingConstants.from_rho(1, 3))
    assert err.value.stage == "X-concentration"


def test_footprint_check():
    small = AbsorbingConstants.of(Fraction(1, 2), Fraction(1, 4), 12, Fraction(1, 12))
    with pytest.raises(AbsorberBuildError) as err:
        build_absorbing_set(complete(72, 3), EDGE3, small, sampler=SeededSampler(0),
                            template=compact_template(1, 12), absorber_size=3)
    assert err.value.stage == "constants-too-large"


def test_wrong_template_shape():
    with pytest.raises(AbsorberBuildError) as err:
        build_absorbing_set(complete(72, 3), EDGE3, TOY, sampler=SeededSampler(0),
                            template=compact_template(2, 12), absorber_size=3)
    assert err.value.stage == "template"


def test_complete_template_default():
    consts = AbsorbingConstants.of(2, Fraction(1, 12), 3, Fraction(1, 30))
    state = None
    for seed in range(20):
        try:
            state = build_absorbing_set(complete(72, 3), EDGE3, consts,
                                        sampler=SeededSampler(seed), absorber_size=3)
            break
        except AbsorberBuildError as err:
            assert err.stage == "constants-too-large"
    assert state is not None and state.m == 1
    assert len(state.template.edges) == 6 * 3
    tiling = absorb(state, [])
    assert verify_tiling(EDGE3, state.H, tiling, state.vertices)


def test_family_shortfall():
    # X sits inside a region with no edges through some vertex
    H = Hypergraph(3, 72, [e for e in complete(72, 3).edges if 71 not in e])
    with pytest.raises(AbsorberBuildError) as err:
        build_absorbing_set(H, EDGE3, TOY, sampler=SeededSampler(0),
                            template=compact_template(1, 12), absorber_size=3)
    assert err.value.stage == "family shortfall"
