import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from johnson_h2.derivations import spider_tensor
from johnson_h2.exact import multi_contraction, wedge_projection
from johnson_h2.homology import (
    BudgetExceeded,
    ChainShape,
    ChainSlice,
    ChainVector,
    HomologyError,
    ShapeMismatch,
    boundary2,
    boundary3,
    cycle_multiplicity,
    cycles,
    estimate_slice,
    h2_component,
    raise_chain,
    surjectivity_certificate,
)
from johnson_h2.sprep import Detector, RaisingOperator, YoungDiagram, dominant_weights, weyl_dimension

G = 3
D = YoungDiagram.parse


def random_spider(rng, genus, k):
    while True:
        t = spider_tensor(genus, [rng.randrange(2 * genus) for _ in range(k + 2)])
        if not t.is_zero():
            return t


def random_chain(rng, weight, degree, genus=G, terms=2):
    summands = ChainShape.of(weight, degree).summands
    acc = ChainVector.zero(weight, degree, genus)
    for _ in range(terms):
        ks = list(rng.choice(summands))
        rng.shuffle(ks)
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        acc = acc + ChainVector.from_wedge([random_spider(rng, genus, k) for k in ks], c)
    return acc


def nontrivial_chain(rng, weight, genus, terms):
    """A random 3-chain whose boundary is not zero."""
    while True:
        v = random_chain(rng, weight, 3, genus, terms)
        b = boundary3(v)
        if not b.is_zero():
            return v, b


def test_no_three_chains_in_weight_two():
    assert ChainShape.of(2, 3).summands == ()
    assert ChainShape.of(2, 2).summands == ((1, 1),)


# 100 random 3-chains spread over weights 3..6 (weight 2 has none)
@pytest.mark.parametrize("weight", [3, 4, 5, 6])
@pytest.mark.parametrize("seed", range(25))
def test_boundary_squares_to_zero(weight, seed):
    rng = random.Random(1000 * weight + seed)
    _, b = nontrivial_chain(rng, weight, 2 if weight == 6 else G, 1 if weight == 6 else 2)
    assert boundary2(b).is_zero()


def test_boundary2_is_bracket():
    from johnson_h2.derivations import Derivation, derivation_bracket
    x, y = spider_tensor(G, [0, 1, 2]), spider_tensor(G, [2, 3, 4, 5])
    v = ChainVector.from_wedge([x, y])
    assert boundary2(v) == derivation_bracket(Derivation(x), Derivation(y)).tensor
    # equal degrees, and the order of factors only flips the sign
    z = spider_tensor(G, [1, 3, 5])
    assert boundary2(ChainVector.from_wedge([x, z])) == -boundary2(ChainVector.from_wedge([z, x]))
    assert ChainVector.from_wedge([x, x]).is_zero()


@pytest.mark.parametrize("w,lam", [(3, (1, 1, 1)), (3, (2, 1, 0)), (4, (2, 2, 0)), (4, (1, 1, 0))])
def test_coordinate_complex(alg3, w, lam):
    # d2 o d3 = 0 on coordinates, and d3 agrees with the tensor-level boundary
    cs = ChainSlice(alg3, w, lam)
    triples = list(cs.iter_basis3())
    assert triples
    rng = random.Random(3)
    nonzero = 0
    for tr in rng.sample(triples, min(25, len(triples))):
        col = cs.d3(tr)
        nonzero += bool(col)
        total = {}
        for b, c in col.items():
            for t, d in cs.d2(cs.basis2[b]).items():
                total[t] = total.get(t, 0) + c * d
        assert not any(total.values())
        tensors = [alg3.m(x[0]).slice(x[1]).rows[x[2]] for x in tr]
        assert cs.to_chain_vector(col) == boundary3(ChainVector.from_wedge(tensors))
    assert nonzero


def test_cycle_basis_is_closed(alg3):
    cs = ChainSlice(alg3, 3, (1, 1, 1))
    for z in cs.cycles():
        assert boundary2(cs.to_chain_vector(z)).is_zero()
    assert len(cs.cycles()) == cs.cycle_dimension()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, G))
def test_equivariance_of_boundaries(seed, r):
    rng = random.Random(seed)
    e = RaisingOperator(r, G)
    v3, _ = nontrivial_chain(rng, 3, G, 2)
    v2 = random_chain(rng, 3, 2)
    assert boundary3(raise_chain(v3, e)) == raise_chain(boundary3(v3), e)
    assert boundary2(raise_chain(v2, e)) == e(boundary2(v2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, G))
def test_equivariance_of_contraction_and_projection(seed, r):
    rng = random.Random(seed)
    e = RaisingOperator(r, G)
    t = random_spider(rng, G, 1).tensor(random_spider(rng, G, 2))
    pairs = [(1, 4), (2, 6)]
    assert multi_contraction(pairs, e(t)) == e(multi_contraction(pairs, t))
    blocks = [(1, 2, 3), (4, 5, 6, 7)]
    assert wedge_projection(blocks, e(t)) == e(wedge_projection(blocks, t))
    d = Detector((1, 2), ((1, 5),), ((1, 2), (3, 4, 5)))
    v = ChainVector.from_wedge([random_spider(rng, G, 1), random_spider(rng, G, 2)])
    from johnson_h2.sprep import apply_detector
    assert apply_detector(d, raise_chain(v, e)) == e(apply_detector(d, v))


def test_cycle_decomposition_is_consistent(alg3):
    z = cycles(2, 3, alg3)
    comp = z.decompose()
    assert sum(m * weyl_dimension(l, 3) for l, m in comp.items()) == z.dimension()
    assert z.dimension() <= z.chain_dimension()


def test_chain_dimension_counts(alg3):
    # wedge^2 m(1): C(20, 2) = 190 in total
    z = cycles(2, 3, alg3)
    assert z.chain_dimension() == 190
    cs = ChainSlice(alg3, 3, (1, 1, 1))
    assert cs.count2() == len(cs.basis2)


def test_weight_two_at_genus_three(alg3):
    # H_1 has no weight-2 part, so wedge^2 m(1) -> m(2) is onto
    z = cycles(2, 3, alg3)
    assert z.dimension() == 190 - alg3.m(2).dimension()


def test_h2_weight_three_vanishes_at_small_genus(alg5):
    for lam in ["[1^3]", "[21]", "[1]"]:
        res = h2_component(3, D(lam), 5, alg5)
        assert res.multiplicity == 0
        assert res.boundary_slice_rank == res.cycle_slice_dimension


def test_budget_refusal(alg3):
    with pytest.raises(BudgetExceeded) as info:
        cycle_multiplicity(4, D("[1^2]"), 3, alg3, budget=10)
    assert info.value.estimate > 10
    assert estimate_slice(alg3, 3, (1, 0, 0)) > 0


def test_shape_errors(alg3):
    with pytest.raises(ShapeMismatch):
        ChainShape.of(4, 4)
    with pytest.raises(ShapeMismatch):
        boundary3(random_chain(random.Random(0), 3, 2))
    with pytest.raises(ShapeMismatch):
        ChainSlice(alg3, 3, (1, 1))
    with pytest.raises(HomologyError):
        cycles(1, 3)
    with pytest.raises(ShapeMismatch):
        random_chain(random.Random(0), 3, 3) + random_chain(random.Random(0), 4, 3)


def test_certificate_edge_cases(alg5):
    lam = D("[1^3]")
    lw = lam.weight(5)
    m = len(ChainSlice(alg5, 3, lw).highest_weight_cycles())
    assert m >= 1
    dets = [Detector((1, 2), ((1, 4),), ((1, 2, 3, 4, 5),))] * m
    cert = surjectivity_certificate(3, lam, [], dets, 5, alg5, check_soundness=False)
    assert cert.rank == 0 and not cert.passed
    with pytest.raises(HomologyError):
        surjectivity_certificate(3, lam, [], dets + dets[:1], 5, alg5)
    with pytest.raises(ShapeMismatch):
        surjectivity_certificate(3, lam, [random_chain(random.Random(0), 3, 2, genus=5)], dets, 5, alg5,
                                 check_soundness=False)


def test_component_weights_are_dominant():
    assert all(list(w) == sorted(w, reverse=True) for w in dominant_weights(7, 3))
