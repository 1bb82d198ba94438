from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from johnson_h2 import kernels as K
from johnson_h2.exact import (
    MU_TABLE,
    EchelonBasis,
    ExactCoreError,
    RowReducer,
    SparseTensor,
    format_tensor,
    multi_contraction,
    mu_form,
    nullspace,
    parse_letter,
    parse_tensor,
    parse_tensors,
    rank_of_matrix,
    wedge_projection,
)

G = 3


def tensors(degree, genus=G, max_terms=8, coef=st.integers(-5, 5)):
    word = st.tuples(*[st.integers(0, 2 * genus - 1)] * degree)
    return st.dictionaries(word, coef, max_size=max_terms).map(
        lambda d: SparseTensor.from_terms(genus, degree, d))


small_matrix = st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=1, max_size=6))


def test_letters():
    assert parse_letter("a1") == 0 and parse_letter("b1") == 1 and parse_letter("b3") == 5
    assert mu_form(0, 1) == 1 and mu_form(1, 0) == -1 and mu_form(0, 3) == 0
    with pytest.raises(ExactCoreError):
        parse_letter("c1")


@given(small_matrix)
def test_rank_matches_sympy(m):
    assert rank_of_matrix(m) == sympy.Matrix(m).rank()


@given(small_matrix)
def test_nullspace(m):
    ncols = len(m[0])
    rows = [{j: c for j, c in enumerate(r) if c} for r in m]
    ns = nullspace(rows, ncols)
    assert len(ns) == ncols - sympy.Matrix(m).rank()
    for x in ns:
        for r in rows:
            assert sum(c * x.get(j, 0) for j, c in r.items()) == 0
    assert rank_of_matrix([[x.get(j, 0) for j in range(ncols)] for x in ns] or [[0] * ncols]) == len(ns)


@given(small_matrix)
def test_row_reducer_coordinates(m):
    red = RowReducer()
    for r in m:
        red.add({j: c for j, c in enumerate(r) if c})
    assert red.rank == sympy.Matrix(m).rank()
    for r in m:
        assert red.coordinates({j: c for j, c in enumerate(r) if c}) is not None


@given(tensors(3), tensors(3), st.integers(-4, 4))
def test_linear_structure(x, y, c):
    assert x + y == y + x
    assert (x + y).scale(c) == x.scale(c) + y.scale(c)
    assert (x - x).is_zero()


@given(tensors(2), tensors(1), tensors(2))
def test_tensor_product_bilinear(x, y, z):
    assert (x + z).tensor(y) == x.tensor(y) + z.tensor(y)


def test_big_coefficients_promote():
    t = SparseTensor.from_terms(2, 2, {(0, 1): 1})
    big = t.scale(2 ** 62)
    s = big + big + big
    assert s.coefficient((0, 1)) == 3 * 2 ** 62
    assert (s - big.scale(3)).is_zero()
    assert s.scale(Fraction(1, 3 * 2 ** 62)) == t


def test_contraction_by_hand():
    # mu(a1,b1) + mu(b1,a1) = 0, and a1 is orthogonal to a2
    t = SparseTensor.from_terms(2, 3, {(0, 1, 2): 1, (1, 0, 2): 1, (0, 2, 3): 5})
    out = multi_contraction([(1, 2)], t)
    assert out.is_zero()
    t = SparseTensor.from_terms(2, 3, {(0, 1, 2): 2, (2, 3, 0): 1})
    assert multi_contraction([(1, 2)], t) == SparseTensor.from_terms(2, 1, {(2,): 2, (0,): 1})


@given(tensors(4))
def test_wedge_projection_idempotent(t):
    # the image lives on block-sorted keys, where only the identity term survives
    p = wedge_projection([(1, 2), (3, 4)], t)
    assert wedge_projection([(1, 2), (3, 4)], p) == p
    swapped = SparseTensor.from_terms(G, 4, {(w[1], w[0], w[2], w[3]): c for w, c in t.items()})
    assert wedge_projection([(1, 2), (3, 4)], swapped) == -p


@given(tensors(4))
def test_text_round_trip(t):
    assert parse_tensor(format_tensor(t)) == t


def test_parse_errors():
    with pytest.raises(ExactCoreError):
        parse_tensor("tensor genus=2 degree=2\n1/1 a1\n")
    with pytest.raises(ExactCoreError):
        parse_tensor("tensor genus=2 degree=1\n1/1 a3\n")
    with pytest.raises(ExactCoreError):
        parse_tensor("tensor genus=2 degree=1\n1/1 a1\n2/1 a1\n")
    with pytest.raises(ExactCoreError):
        parse_tensor("1/1 a1\n")
    blocks = parse_tensors("tensor genus=2 degree=1\n1/2 a1\nderivation genus=2 degree=1\n1/1 a1 a2 b2\n")
    assert [b[0] for b in blocks] == ["tensor", "derivation"]
    assert blocks[1][2].degree == 3


def test_echelon_basis():
    a = SparseTensor.from_terms(G, 2, {(0, 1): 1, (1, 0): -1})
    b = SparseTensor.from_terms(G, 2, {(2, 3): 1})
    eb = EchelonBasis(G, 2, [a, b])
    assert eb.rank == 2
    assert not eb.add(a.scale(3) - b)
    assert eb.contains(a + b)
    assert not eb.contains(SparseTensor.from_terms(G, 2, {(4, 5): 1}))
    coords = eb.coordinates(a.scale(2) + b)
    assert sorted(coords) == [1, 2]


@settings(max_examples=30)
@given(tensors(5, max_terms=20, coef=st.integers(-50, 50)))
def test_backends_agree(t):
    if not K.HAVE_NUMBA:
        pytest.skip("numba not installed")
    args = [(1, 3)]
    blocks = [[0, 1, 2], [3, 4]]
    out = {}
    for name in ("numba", "numpy"):
        K.set_backend(name)
        try:
            c = K.contract(t.keys, t.coefs, t.degree, args, MU_TABLE)
            a = K.antisymmetrize(t.keys, t.coefs, t.degree, blocks)
            i = K.insert_contract(t.keys, t.coefs, t.degree, 3, 2, MU_TABLE)
            out[name] = [SparseTensor(G, d, *kc) for d, kc in ((3, c), (5, a), (3, i))]
        finally:
            K.set_backend("numba")
    assert out["numba"] == out["numpy"]

