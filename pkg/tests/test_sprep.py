import itertools
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from johnson_h2.exact import EchelonBasis, SparseTensor
from johnson_h2.sprep import (
    Detector,
    InconsistentDecomposition,
    RaisingOperator,
    RepresentationError,
    YoungDiagram,
    apply_detector,
    candidate_diagrams,
    decompose,
    dominant,
    format_multiset,
    orbit,
    orbit_size,
    parse_multiset,
    transport,
    weyl_dimension,
)

D = YoungDiagram.parse


def full_power(genus, n):
    eb = EchelonBasis(genus, n)
    for w in itertools.product(range(2 * genus), repeat=n):
        eb.add(SparseTensor.from_word(genus, w))
    return eb


@given(st.integers(1, 6), st.integers(0, 6))
def test_weyl_exterior_and_symmetric(g, k):
    sym = YoungDiagram((k,))
    assert weyl_dimension(sym, g) == comb(2 * g + k - 1, k)
    ext = YoungDiagram((1,) * k)
    expected = comb(2 * g, k) - (comb(2 * g, k - 2) if k >= 2 else 0) if k <= g else 0
    assert weyl_dimension(ext, g) == expected


# H^(x)2 and H^(x)3 by classical branching; frozen values
@pytest.mark.parametrize("g,n,expected", [
    (2, 2, "[2] [1^2] [0]"),
    (3, 2, "[2] [1^2] [0]"),
    (2, 3, "[3] 2[21] 3[1]"),
    (3, 3, "[3] 2[21] [1^3] 3[1]"),
])
def test_tensor_powers(g, n, expected):
    assert decompose(full_power(g, n)) == parse_multiset(expected)


def test_dimension_sum_is_enforced():
    class Fake:
        genus = 2
        tensor_degree = 2

        def __init__(self, eb, extra):
            self.eb, self.extra = eb, extra

        def weight_slice(self, w):
            from johnson_h2.sprep import weight_slice_of_basis
            return weight_slice_of_basis(self.eb.rows, w)

        def dimension(self):
            return self.eb.rank + self.extra

    eb = full_power(2, 2)
    assert sum(m * weyl_dimension(l, 2) for l, m in decompose(Fake(eb, 0)).items()) == 16
    with pytest.raises(InconsistentDecomposition):
        decompose(Fake(eb, 1))


@pytest.mark.parametrize("text", ["[0]", "[1]", "[21^2]", "[2^2]", "[31^3]", "[3^21]", "[2^21^3]"])
def test_diagram_round_trip(text):
    assert str(D(text)) == text


@pytest.mark.parametrize("bad", ["21", "[2a]", "[]", "[12]", "[2^0]"])
def test_diagram_rejects(bad):
    with pytest.raises(RepresentationError):
        D(bad)


def test_multiset_round_trip():
    ms = parse_multiset("[42][31^3][2^3] 2[31][21^2] 2[2]")
    assert ms[D("[31]")] == 2 and sum(ms.values()) == 8
    assert parse_multiset(format_multiset(ms)) == ms


def test_candidates_have_right_parity():
    for lam in candidate_diagrams(5, 4):
        assert lam.size % 2 == 1 and lam.size <= 5 and len(lam) <= 4
    assert D("[0]") in candidate_diagrams(4, 3)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_weyl_orbits(w):
    d = dominant(w)
    assert list(d) == sorted((abs(x) for x in w), reverse=True)
    orb = orbit(d)
    assert len(orb) == orbit_size(d) == len(set(orb))
    assert tuple(w) in orb


def test_transport_moves_weights():
    t = SparseTensor.from_terms(3, 3, {(0, 0, 2): 1, (0, 2, 0): -2})
    for nu in orbit(t.weight()):
        moved = transport(t, nu)
        assert moved.weight() == tuple(nu)
        assert moved.nnz == t.nnz


def test_raising_operator_raises_weight():
    g = 3
    t = SparseTensor.from_word(g, [2, 5])  # a2 b3
    hits = 0
    for r in range(1, g + 1):
        out = RaisingOperator(r, g)(t)
        if not out.is_zero():
            hits += 1
            root = [0] * g
            if r < g:
                root[r - 1], root[r] = 1, -1
            else:
                root[g - 1] = 2
            assert out.weight() == tuple(a + b for a, b in zip(t.weight(), root))
    assert hits == 2  # e_1 moves a2, e_3 moves b3, e_2 kills both


def test_detector_validation():
    Detector((1, 3), ((1, 2), (3, 4)), ((1, 2, 3), (4,)))
    with pytest.raises(RepresentationError):
        Detector((1, 3), ((1, 2), (2, 4)), ((1, 2, 3), (4,)))
    with pytest.raises(RepresentationError):
        Detector((1, 3), ((1, 2),), ((1, 2, 3), (4,)))
    with pytest.raises(RepresentationError):
        Detector((1, 1), ((1, 9),), ((1, 2, 3, 4),))


def test_detector_on_missing_summand():
    from johnson_h2.homology import ChainVector
    from johnson_h2.derivations import spider_tensor
    v = ChainVector.from_wedge([spider_tensor(4, [0, 2, 4]), spider_tensor(4, [1, 3, 5, 6, 7])])
    d = Detector((2, 2), ((1, 2),), ((1, 2, 3, 4, 5, 6),))
    assert apply_detector(d, v).is_zero()
