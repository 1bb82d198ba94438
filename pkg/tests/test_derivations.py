from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from johnson_h2.derivations import (
    Derivation,
    DerivationError,
    derivation_bracket,
    derivation_from_values,
    h_basis,
    is_lie_element,
    spider_tensor,
    spider_to_derivation,
)
from johnson_h2.exact import SparseTensor, tensor_sum

G = 2


def omega(genus):
    parts = [SparseTensor.from_terms(genus, 2, {(2 * i, 2 * i + 1): 1, (2 * i + 1, 2 * i): -1})
             for i in range(genus)]
    return tensor_sum(parts, genus, 2)


@st.composite
def derivations(draw, genus=G, degrees=(1, 2)):
    k = draw(st.sampled_from(degrees))
    n_sp = draw(st.integers(1, 2))
    acc = None
    for _ in range(n_sp):
        legs = draw(st.lists(st.integers(0, 2 * genus - 1), min_size=k + 2, max_size=k + 2))
        c = draw(st.integers(-2, 2).filter(bool))
        t = spider_tensor(genus, legs).scale(c)
        acc = t if acc is None else acc + t
    return Derivation(acc)


def nonzero(*ds):
    return all(not d.tensor.is_zero() for d in ds)


@settings(max_examples=40, deadline=None)
@given(derivations())
def test_spiders_are_symplectic_lie_valued(d):
    assert d.is_symplectic()
    for code in range(2 * G):
        assert is_lie_element(d.value(code))
    assert d.act(omega(G)).is_zero()


@settings(max_examples=40, deadline=None)
@given(derivations(), derivations())
def test_bracket_preserves_symplectic_condition(d, e):
    b = derivation_bracket(d, e)
    assert b.degree == d.degree + e.degree
    assert b.is_symplectic()
    assert b.act(omega(G)).is_zero()
    assert derivation_bracket(e, d) == b.scale(-1)


@settings(max_examples=25, deadline=None)
@given(derivations(degrees=(1,)), derivations(degrees=(1,)), derivations(degrees=(1, 2)))
def test_jacobi(d, e, f):
    total = (derivation_bracket(d, derivation_bracket(e, f)).tensor
             + derivation_bracket(e, derivation_bracket(f, d)).tensor
             + derivation_bracket(f, derivation_bracket(d, e)).tensor)
    assert total.is_zero()


@settings(max_examples=25, deadline=None)
@given(derivations(), derivations())
def test_bracket_is_commutator_of_actions(d, e):
    b = derivation_bracket(d, e)
    for code in range(2 * G):
        x = SparseTensor.letter(G, code)
        assert b.act(x) == d.act(e.act(x)) - e.act(d.act(x))


@settings(max_examples=25, deadline=None)
@given(derivations(), st.lists(st.integers(0, 2 * G - 1), min_size=1, max_size=3),
       st.lists(st.integers(0, 2 * G - 1), min_size=1, max_size=3))
def test_leibniz_rule(d, u, v):
    x, y = SparseTensor.from_word(G, u), SparseTensor.from_word(G, v)
    assert d.act(x.tensor(y)) == d.act(x).tensor(y) + x.tensor(d.act(y))


def test_values_round_trip():
    d = spider_to_derivation(G, [0, 1, 2])
    again = derivation_from_values(G, {c: d.value(c) for c in range(2 * G) if not d.value(c).is_zero()})
    assert again == d


def test_degree_one_piece_is_wedge3():
    for g in (2, 3):
        assert h_basis(1, g).rank == comb(2 * g, 3)


def test_small_degree_rejected():
    with pytest.raises(DerivationError):
        Derivation(SparseTensor.from_word(G, [0, 1]))
    with pytest.raises(DerivationError):
        spider_tensor(G, [0, 1])
