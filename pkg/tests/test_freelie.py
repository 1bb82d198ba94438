import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from johnson_h2.derivations import is_lie_element
from johnson_h2.exact import EchelonBasis, SparseTensor
from johnson_h2.freelie import (
    FreeLieError,
    HallWord,
    LieElement,
    expand_to_tensor,
    expand_word,
    hall_basis,
    lie_bracket,
    nested,
    random_lie_element,
    witt_dimension,
)


def lyndon_count(k, n):
    """Brute-force count of Lyndon words of length k over n letters."""
    count = 0
    for w in itertools.product(range(n), repeat=k):
        if all(w < w[i:] + w[:i] for i in range(1, k)):
            count += 1
    return count


@pytest.mark.parametrize("k,n", [(k, n) for k in range(1, 7) for n in (2, 4) if n ** k <= 5000])
def test_witt_formula_against_lyndon_words(k, n):
    assert witt_dimension(k, n) == lyndon_count(k, n)


@pytest.mark.parametrize("g", [1, 2, 3, 4])
@pytest.mark.parametrize("k", range(1, 7))
def test_hall_basis_has_witt_size(k, g):
    basis = hall_basis(k, g)
    assert len(basis) == witt_dimension(k, 2 * g)
    assert all(w.is_hall() for w in basis)
    assert len(set(basis)) == len(basis)


@pytest.mark.parametrize("k,g", [(3, 2), (4, 2), (5, 1), (3, 3)])
def test_hall_words_are_independent(k, g):
    eb = EchelonBasis(g, k)
    for w in hall_basis(k, g):
        assert eb.add(expand_word(g, w))
    assert eb.rank == witt_dimension(k, 2 * g)


def test_parse_and_print():
    w = HallWord.parse("[[a1,a2],b3]")
    assert str(w) == "[[a1,a2],b3]"
    assert w.letters() == [0, 2, 5]
    with pytest.raises(FreeLieError):
        HallWord.parse("[a1,a2")
    with pytest.raises(FreeLieError):
        HallWord.parse("[a1,a2]x")


def test_symplectic_class_in_normal_form():
    omega = lie_bracket(LieElement.letter(1, 0), LieElement.letter(1, 1))
    assert omega.terms == {HallWord.parse("[a1,b1]"): 1}
    assert lie_bracket(LieElement.letter(1, 1), LieElement.letter(1, 0)) == omega.scale(-1)


def _elements(draw, genus, degree):
    seed = draw(st.integers(0, 10 ** 6))
    return random_lie_element(genus, degree, random.Random(seed))


@st.composite
def triple(draw):
    g = draw(st.integers(1, 2))
    ds = [draw(st.integers(1, 2)) for _ in range(3)]
    return [_elements(draw, g, d) for d in ds]


@settings(max_examples=40, deadline=None)
@given(triple())
def test_bracket_matches_tensor_commutator(xyz):
    x, y, _ = xyz
    ex, ey = expand_to_tensor(x), expand_to_tensor(y)
    assert expand_to_tensor(lie_bracket(x, y)) == ex.tensor(ey) - ey.tensor(ex)


@settings(max_examples=40, deadline=None)
@given(triple())
def test_jacobi_and_antisymmetry(xyz):
    x, y, z = xyz
    assert lie_bracket(x, y) == lie_bracket(y, x).scale(-1)
    total = (lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x))
             + lie_bracket(z, lie_bracket(x, y)))
    assert total.is_zero()


def test_nested_brackets_are_lie():
    t = expand_to_tensor(nested(2, [0, 1, 2, 3]))
    assert is_lie_element(t)
    assert not is_lie_element(SparseTensor.from_word(2, [0, 2]))
    left = expand_to_tensor(nested(2, [0, 1, 2], right=False))
    right = expand_to_tensor(nested(2, [0, 1, 2]))
    assert left != right
