"""Graded pieces m_{g,1}(k) of the Lie subalgebra of h_{g,1} generated in degree 1.

Each piece is stored weight by weight.  Only dominant weights are computed;
any other slice is the image of its dominant representative under a signed
permutation of the symplectic basis, which preserves every m(k) because m(k)
is Sp-invariant.  Dominant slices are canonical reduced echelon bases, so a
coordinate is read off as (coefficient at pivot key) / (pivot coefficient).
"""

from __future__ import annotations

import itertools
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels as K
from .derivations import Derivation, derivation_bracket, spider_tensor
from .exact import EchelonBasis, ExactCoreError, SparseTensor
from .sprep import (
    RaisingOperator,
    Weight,
    add_weights,
    decompose,
    dominant,
    dominant_weights,
    orbit,
    orbit_size,
    parse_multiset,
    sub_weights,
    weyl_dimension,
    weyl_letter_map,
)

log = logging.getLogger(__name__)

# reference decompositions of m(k) in the stable range, keyed by k
TABLE1 = {
    1: "[1^3] [1]",
    2: "[2^2] [1^2] [0]",
    3: "[31^2] [21]",
    4: "[42][31^3][2^3] 2[31][21^2] 2[2]",
    5: "[51^2][421][3^21][321^2][2^21^3] 2[41]2[32]2[31^2]2[2^21]2[21^3] [3]3[21]2[1^3] [1]",
}


class StabilityError(ExactCoreError):
    pass


def stable_genus(k: int) -> int:
    """Smallest genus treated as stable for m(k) (tensor degree k+2)."""
    return k + 2


class WeightSlice:
    """Basis of one weight space with pivot keys for coordinate reads."""

    __slots__ = ("weight", "rows", "pivot_keys", "pivot_coefs", "_order")

    def __init__(self, weight: Weight, rows: list[SparseTensor], pivot_keys: Sequence[int],
                 pivot_coefs: Sequence[int]):
        self.weight = weight
        self.rows = rows
        self.pivot_keys = np.asarray(pivot_keys, dtype=np.int64)
        self.pivot_coefs = [int(c) for c in pivot_coefs]
        self._order = np.argsort(self.pivot_keys)

    def __len__(self) -> int:
        return len(self.rows)

    def coordinates(self, t: SparseTensor) -> dict[int, Fraction]:
        """Coordinates of an element known to lie in the span."""
        if not self.rows or t.nnz == 0:
            return {}
        sk = self.pivot_keys[self._order]
        pos = np.searchsorted(t.keys, sk)
        pos = np.minimum(pos, t.nnz - 1)
        hit = t.keys[pos] == sk
        out = {}
        for o, p in zip(self._order[hit].tolist(), pos[hit].tolist()):
            c = t.coefs[p]
            c = c if isinstance(c, Fraction) else int(c)
            out[o] = Fraction(c, self.pivot_coefs[o]) if not isinstance(c, Fraction) \
                else c / self.pivot_coefs[o]
        return out

    def combination(self, coords: dict[int, Fraction], genus: int, degree: int) -> SparseTensor:
        acc = SparseTensor(genus, degree)
        for i, c in coords.items():
            acc = acc + self.rows[i].scale(c)
        return acc

    def contains(self, t: SparseTensor) -> bool:
        if t.nnz == 0:
            return True
        g, n = t.genus, t.degree
        return self.combination(self.coordinates(t), g, n) == t


@dataclass
class GradedBasis:
    """Weight-graded basis of m_{g,1}(k) (label 'm') or h_{g,1}(k) (label 'h')."""

    genus: int
    degree: int
    label: str = "m"
    dominant_rows: dict[Weight, list[SparseTensor]] = field(default_factory=dict)
    generators: dict[Weight, list[tuple]] = field(default_factory=dict)
    _slices: dict[Weight, WeightSlice] = field(default_factory=dict, repr=False)

    @property
    def tensor_degree(self) -> int:
        return self.degree + 2

    def slice(self, nu: Sequence[int]) -> WeightSlice:
        nu = tuple(int(x) for x in nu)
        s = self._slices.get(nu)
        if s is not None:
            return s
        d = dominant(nu)
        base = self.dominant_rows.get(d, [])
        if d == nu:
            pk = [int(r.keys[0]) for r in base]
            pc = [int(r.coefs[0]) for r in base]
            s = WeightSlice(nu, base, pk, pc)
        else:
            cm, sm = weyl_letter_map(nu)
            rows = []
            pk, pc = [], []
            for r in base:
                keys, coefs = K.letter_map(r.keys, r.coefs, r.degree, cm, sm)
                pk.append(int(keys[0]))
                pc.append(int(coefs[0]))
                rows.append(SparseTensor(r.genus, r.degree, keys, coefs))
            s = WeightSlice(nu, rows, pk, pc)
        if len(self._slices) > 50000:
            self._slices.clear()
        self._slices[nu] = s
        return s

    def weight_slice(self, nu: Sequence[int]) -> list[SparseTensor]:
        return self.slice(nu).rows

    def slice_dim(self, nu: Sequence[int]) -> int:
        return len(self.dominant_rows.get(dominant(nu), ()))

    def weights(self) -> list[Weight]:
        out = []
        for d, rows in self.dominant_rows.items():
            if rows:
                out.extend(orbit(d))
        return sorted(out, reverse=True)

    def dimension(self) -> int:
        return sum(orbit_size(d) * len(rows) for d, rows in self.dominant_rows.items())

    def all_rows(self) -> list[SparseTensor]:
        return [r for w in self.weights() for r in self.weight_slice(w)]

    def echelon(self) -> EchelonBasis:
        eb = EchelonBasis(self.genus, self.tensor_degree)
        for r in self.all_rows():
            eb.add(r)
        return eb


def _triples_by_weight(genus: int) -> dict[Weight, list[tuple[int, int, int]]]:
    out: dict[Weight, list] = {}
    for t in itertools.combinations(range(2 * genus), 3):
        w = [0] * genus
        for x in t:
            w[x >> 1] += -1 if x & 1 else 1
        out.setdefault(tuple(w), []).append(t)
    return out


class JohnsonAlgebra:
    """m_{g,1} truncated at a given degree, with memoised structure constants."""

    def __init__(self, genus: int):
        if not 1 <= genus <= 16:
            raise ExactCoreError(f"invalid genus {genus}")
        self.genus = genus
        self._pieces: dict[int, GradedBasis] = {}
        self._deriv_cache: dict[tuple, Derivation] = {}
        self._bracket_cache: dict[tuple, dict[int, Fraction]] = {}
        self._raise_cache: dict[tuple, dict[int, Fraction]] = {}
        self._ops = [RaisingOperator(r, genus) for r in range(1, genus + 1)]
        self.cache = None  # optional BasisCache, set by the CLI
        self.stats = Counter()

    # pieces ---------------------------------------------------------------
    def m(self, k: int) -> GradedBasis:
        if k < 1:
            raise ExactCoreError("degree must be >= 1")
        if k not in self._pieces:
            gb = None
            if self.cache is not None:
                gb = self.cache.get("m", self.genus, k)
            if gb is None:
                gb = self._build(k)
                if self.cache is not None:
                    self.cache.put(gb)
            self._pieces[k] = gb
        return self._pieces[k]

    def install(self, gb: GradedBasis) -> None:
        self._pieces[gb.degree] = gb

    def _build(self, k: int) -> GradedBasis:
        g = self.genus
        gb = GradedBasis(g, k, "m")
        t0 = time.perf_counter()
        if k == 1:
            for w, triples in _triples_by_weight(g).items():
                if dominant(w) == w:
                    gb.dominant_rows[w] = [spider_tensor(g, t) for t in triples]
                    gb.generators[w] = [("spider",) + t for t in triples]
            return gb
        one = self.m(1)
        prev = self.m(k - 1)
        one_weights = one.weights()
        for lam in dominant_weights(k + 2, g):
            eb = EchelonBasis(g, k + 2)
            gens = []
            for mu in one_weights:
                rest = sub_weights(lam, mu)
                if prev.slice_dim(rest) == 0:
                    continue
                for i in range(one.slice_dim(mu)):
                    x = self.derivation(1, mu, i)
                    for j in range(prev.slice_dim(rest)):
                        y = self.derivation(k - 1, rest, j)
                        if eb.add(derivation_bracket(x, y).tensor):
                            gens.append(("bracket", mu, i, rest, j))
            if eb.rank:
                gb.dominant_rows[lam] = eb.rows
                gb.generators[lam] = gens
        log.info("m(%d) at g=%d: dim %d in %.1fs", k, g, gb.dimension(), time.perf_counter() - t0)
        return gb

    # elements -------------------------------------------------------------
    def derivation(self, k: int, nu: Weight, i: int) -> Derivation:
        key = (k, nu, i)
        d = self._deriv_cache.get(key)
        if d is None:
            d = Derivation(self.m(k).slice(nu).rows[i])
            if len(self._deriv_cache) > 200000:
                self._deriv_cache.clear()
            self._deriv_cache[key] = d
        return d

    def element(self, k: int, nu: Weight, coords: dict[int, Fraction]) -> SparseTensor:
        return self.m(k).slice(nu).combination(coords, self.genus, k + 2)

    # structure constants --------------------------------------------------
    def bracket(self, x: tuple, y: tuple) -> dict[int, Fraction]:
        """[x, y] for basis elements x = (k, nu, i), in coordinates of m(k+l)."""
        key = (x, y)
        c = self._bracket_cache.get(key)
        if c is None:
            (k1, nu1, i), (k2, nu2, j) = x, y
            t = derivation_bracket(self.derivation(k1, nu1, i), self.derivation(k2, nu2, j)).tensor
            target = add_weights(nu1, nu2)
            c = self.m(k1 + k2).slice(target).coordinates(t)
            self.stats["brackets"] += 1
            self._bracket_cache[key] = c
        return c

    def raise_element(self, x: tuple, r: int) -> dict[int, Fraction]:
        """e_r applied to the basis element x = (k, nu, i), in coordinates."""
        key = (x, r)
        c = self._raise_cache.get(key)
        if c is None:
            k, nu, i = x
            op = self._ops[r - 1]
            t = op(self.m(k).slice(nu).rows[i])
            target = add_weights(nu, op.root)
            c = self.m(k).slice(target).coordinates(t) if t.nnz else {}
            self.stats["raisings"] += 1
            self._raise_cache[key] = c
        return c


def m_basis(k: int, genus: int, algebra: JohnsonAlgebra | None = None) -> GradedBasis:
    alg = algebra or JohnsonAlgebra(genus)
    return alg.m(k)


@dataclass
class Table1Report:
    degree: int
    genus: int
    computed: Counter
    expected: Counter
    dimension: int
    weyl_sum: int

    @property
    def match(self) -> bool:
        return self.computed == self.expected and self.dimension == self.weyl_sum


def verify_table1(k: int, genus: int, algebra: JohnsonAlgebra | None = None,
                  min_genus: int | None = None) -> Table1Report:
    if k not in TABLE1:
        raise ExactCoreError(f"no reference row for k={k}")
    bound = stable_genus(k) if min_genus is None else min_genus
    if genus < bound:
        raise StabilityError(
            f"genus {genus} is below the stable range for m({k}) (tensor degree {k + 2}); "
            f"use genus >= {bound}")
    gb = m_basis(k, genus, algebra)
    comp = decompose(gb)
    expected = parse_multiset(TABLE1[k])
    dim = gb.dimension()
    wsum = sum(m * weyl_dimension(lam, genus) for lam, m in comp.items())
    return Table1Report(k, genus, comp, expected, dim, wsum)
