"""Symplectic derivations of the free Lie algebra, in the tensor model.

A degree-k derivation D is stored as its embedding

    T(D) = sum_x x* (x) D(x)  in  H (x) L_{k+1}  inside  H^{(x)(k+2)},

with x* the mu-dual letter (b_i* = a_i, a_i* = -b_i), which inverts the
identification u (x) xi -> (x -> mu(u, x) xi).  The symplectic condition is
then cyclic invariance of T.  Brackets are computed by letting D act on the
expanded values of E as a derivation of the tensor algebra; this agrees with
the Lie bracket because L(H) -> T(H) is a Lie map and derivations of L(H)
extend uniquely.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from . import kernels as K
from .exact import ExactCoreError, EchelonBasis, SparseTensor, tensor_sum


class DerivationError(ExactCoreError):
    pass


def commutator(x: SparseTensor, y: SparseTensor) -> SparseTensor:
    """[x, y] = x (x) y - y (x) x in the tensor algebra."""
    return x.tensor(y) - y.tensor(x)


def _as_leg(genus: int, u) -> SparseTensor:
    if isinstance(u, SparseTensor):
        if u.degree != 1 or u.genus != genus:
            raise DerivationError("spider legs must be degree-1 tensors of a common genus")
        return u
    return SparseTensor.letter(genus, int(u))


def right_nested(legs: Sequence[SparseTensor]) -> SparseTensor:
    acc = legs[-1]
    for u in reversed(legs[:-1]):
        acc = commutator(u, acc)
    return acc


def left_nested(legs: Sequence[SparseTensor]) -> SparseTensor:
    acc = legs[0]
    for u in legs[1:]:
        acc = commutator(acc, u)
    return acc


class Derivation:
    """A degree-k element of h_{g,1}, held as its embedded tensor."""

    __slots__ = ("tensor", "_table")

    def __init__(self, tensor: SparseTensor):
        if tensor.degree < 3:
            raise DerivationError("a derivation tensor has degree >= 3")
        self.tensor = tensor
        self._table = None

    @property
    def genus(self) -> int:
        return self.tensor.genus

    @property
    def degree(self) -> int:
        return self.tensor.degree - 2

    def value(self, code: int) -> SparseTensor:
        """D(x) for the letter x, as an expanded element of L_{k+1}."""
        if code & 1:
            return self.tensor.first_letter_part(code - 1)
        return -self.tensor.first_letter_part(code + 1)

    def table(self):
        """Per-letter images packed for :func:`kernels.substitute`."""
        if self._table is None:
            starts = np.zeros(32, np.int64)
            lens = np.zeros(32, np.int64)
            keys, coefs = [], []
            pos = 0
            for code in range(2 * self.genus):
                v = self.value(code)
                starts[code] = pos
                lens[code] = v.nnz
                pos += v.nnz
                keys.append(v.keys)
                coefs.append(v.coefs)
            if any(c.dtype == object for c in coefs):
                coefs = [c.astype(object) for c in coefs]
            self._table = (starts, lens, np.concatenate(keys), np.concatenate(coefs))
        return self._table

    def act(self, t: SparseTensor, first_slot: int = 0) -> SparseTensor:
        """Apply D as a derivation of the tensor algebra to slots >= first_slot."""
        if t.genus != self.genus:
            raise DerivationError("genus mismatch")
        starts, lens, tk, tc = self.table()
        keys, coefs = K.substitute(t.keys, t.coefs, t.degree, first_slot, starts, lens, tk, tc,
                                   self.degree + 1)
        return SparseTensor(t.genus, t.degree + self.degree, keys, coefs)

    def is_symplectic(self) -> bool:
        return self.tensor.rotate() == self.tensor

    def __eq__(self, other) -> bool:
        return isinstance(other, Derivation) and self.tensor == other.tensor

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.tensor + other.tensor)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.tensor - other.tensor)

    def scale(self, c) -> "Derivation":
        return Derivation(self.tensor.scale(c))

    def __repr__(self) -> str:
        return f"Derivation(k={self.degree}, g={self.genus}, nnz={self.tensor.nnz})"


def embed_derivation(d: Derivation) -> SparseTensor:
    return d.tensor


def derivation_from_values(genus: int, values: dict[int, SparseTensor]) -> Derivation:
    """Build D from its values on letters (missing letters map to 0)."""
    degs = {v.degree for v in values.values()}
    if len(degs) != 1:
        raise DerivationError("values must share one degree")
    (m,) = degs
    parts = []
    for code, v in values.items():
        sign, dual = (1, code - 1) if code & 1 else (-1, code + 1)
        parts.append(SparseTensor.letter(genus, dual).tensor(v).scale(sign))
    return Derivation(tensor_sum(parts, genus, m + 1))


def spider_tensor(genus: int, legs: Sequence) -> SparseTensor:
    """S(u_1, ..., u_n) = sum_j u_j (x) [R_j, L_j] with R_j the right-nested
    bracket of u_{j+1..n} and L_j the left-nested bracket of u_{1..j-1}."""
    if len(legs) < 3:
        raise DerivationError("a spider needs at least 3 legs")
    us = [_as_leg(genus, u) for u in legs]
    n = len(us)
    parts = []
    for j in range(n):
        right = us[j + 1:]
        left = us[:j]
        if not left:
            tail = right_nested(right)
        elif not right:
            tail = left_nested(left)
        else:
            tail = commutator(right_nested(right), left_nested(left))
        parts.append(us[j].tensor(tail))
    return tensor_sum(parts, genus, n)


def spider_to_derivation(genus: int, legs: Sequence) -> Derivation:
    return Derivation(spider_tensor(genus, legs))


def derivation_bracket(d: Derivation, e: Derivation) -> Derivation:
    """[D, E](x) = D(E(x)) - E(D(x))."""
    if d.genus != e.genus:
        raise DerivationError("genus mismatch")
    return Derivation(d.act(e.tensor, 1) - e.act(d.tensor, 1))


def bracket_closure(t: SparseTensor) -> SparseTensor:
    """u (x) xi -> [u, xi]; vanishes exactly on the symplectic derivations."""
    return t - t.rotate()


def is_lie_element(t: SparseTensor) -> bool:
    """Dynkin-Specht-Wever test: r(x) = n x with r the left-normed bracketing."""
    n = t.degree
    if n <= 1 or t.is_zero():
        return True
    acc = None
    for word, c in t.items():
        legs = [SparseTensor.letter(t.genus, x) for x in word]
        term = left_nested(legs).scale(c)
        acc = term if acc is None else acc + term
    return acc == t.scale(n)


def h_basis(k: int, genus: int, weight: Sequence[int] | None = None) -> EchelonBasis:
    """Echelon span of every spider with k+2 basis-letter legs (small cases)."""
    if k < 1:
        raise DerivationError("degree must be >= 1")
    eb = EchelonBasis(genus, k + 2)
    letters = range(2 * genus)
    target = None if weight is None else np.asarray(weight)
    for legs in itertools.product(letters, repeat=k + 2):
        if k == 1 and not legs[0] < legs[1] < legs[2]:
            continue
        if target is not None:
            w = np.zeros(genus, np.int64)
            for x in legs:
                w[x >> 1] += -1 if x & 1 else 1
            if np.any(w != target):
                continue
        eb.add(spider_tensor(genus, legs))
    return eb
