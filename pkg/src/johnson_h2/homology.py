"""Chevalley-Eilenberg chains of m_{g,1} in low homological degree.

Two representations are kept side by side.

* Coordinates.  For a weight vector lam, the lam-weight space of the 2-chains
  (resp. 3-chains) has a basis of sorted wedges x<y (x<y<z) of basis elements
  x = (k, nu, i) of the graded pieces m(k), see :class:`JohnsonAlgebra`.
  Boundaries and raising operators become sparse integer/rational maps
  between such bases through memoised structure constants.
* Tensors.  A :class:`ChainVector` stores each summand m(i1) (x) ... of a
  chain space as one SparseTensor in H^{(x) sum(i+2)}; wedges of equal-degree
  factors are antisymmetrised (x (x) y - y (x) x).  Detectors act here.

Sign conventions: d(x ^ y) = [x, y] and
d(x1 ^ x2 ^ x3) = -[x1,x2] ^ x3 + [x1,x3] ^ x2 - [x2,x3] ^ x1.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels as K
from .exact import (
    MU_TABLE,
    ExactCoreError,
    RowReducer,
    SparseTensor,
    nullspace,
    rank_of_matrix,
    sparse_rank,
)
from .johnson import JohnsonAlgebra
from .sprep import (
    Detector,
    InconsistentDecomposition,
    YoungDiagram,
    add_weights,
    candidate_diagrams,
    detector_readout,
    dominant,
    dominant_weights,
    orbit_size,
    simple_root,
    sub_weights,
    weyl_dimension,
)

log = logging.getLogger(__name__)

Gen = tuple  # (k, nu, i)

DEFAULT_BUDGET = 3_000_000


class HomologyError(ExactCoreError):
    pass


class ShapeMismatch(HomologyError):
    pass


class BudgetExceeded(HomologyError):
    def __init__(self, message: str, estimate: int, budget: int):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class SoundnessFailure(HomologyError):
    """Detectors do not separate the copies of the target component."""


def default_genus(weight: int) -> int:
    return 6 if weight == 4 else weight + 4


# ---------------------------------------------------------------------------
# shapes and tensor-level chain vectors


def _compositions(total: int, parts: int, lo: int = 1) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= lo:
            yield (total,)
        return
    for first in range(lo, total // parts + 1):
        for rest in _compositions(total - first, parts - 1, first):
            yield (first,) + rest


@dataclass(frozen=True)
class ChainShape:
    """Summands of (wedge^d m)_w, as nondecreasing degree tuples."""

    weight: int
    degree: int
    summands: tuple[tuple[int, ...], ...] = field(default=())

    @classmethod
    def of(cls, weight: int, degree: int) -> "ChainShape":
        if degree not in (1, 2, 3):
            raise ShapeMismatch(f"homological degree {degree} is not supported")
        return cls(weight, degree, tuple(_compositions(weight, degree)))

    @staticmethod
    def symmetry(summand: Sequence[int]) -> list[list[int]]:
        """Groups of block positions with equal degree (antisymmetrised)."""
        groups: dict[int, list[int]] = {}
        for pos, d in enumerate(summand):
            groups.setdefault(d, []).append(pos)
        return [g for g in groups.values() if len(g) > 1]

    @staticmethod
    def stabilizer_order(summand: Sequence[int]) -> int:
        return math.prod(math.factorial(c) for c in Counter(summand).values())

    def tensor_degree(self, summand: Sequence[int]) -> int:
        return sum(k + 2 for k in summand)


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _block_perm(sizes: Sequence[int], order: Sequence[int]) -> list[int]:
    starts = np.cumsum([0] + list(sizes))
    return [s for b in order for s in range(starts[b], starts[b] + sizes[b])]


def permute_blocks(t: SparseTensor, sizes: Sequence[int], order: Sequence[int]) -> SparseTensor:
    """Reorder consecutive slot blocks: new block j is old block order[j]."""
    if list(order) == list(range(len(order))) or t.nnz == 0:
        return t
    keys = K.permute_slots(t.keys, t.degree, _block_perm(sizes, order))
    keys, coefs = K.combine(keys, t.coefs)
    return SparseTensor(t.genus, t.degree, keys, coefs, normalized=True)


def antisymmetrize_blocks(t: SparseTensor, sizes: Sequence[int], groups: Sequence[Sequence[int]]) -> SparseTensor:
    """Sum over permutations of equal-size blocks inside each group, with sign."""
    if not groups:
        return t
    nb = len(sizes)
    acc = []
    per_group = [list(itertools.permutations(g)) for g in groups]
    for choice in itertools.product(*per_group):
        order = list(range(nb))
        sign = 1
        for g, p in zip(groups, choice):
            for src, dst in zip(g, p):
                order[src] = dst
            sign *= _perm_sign([g.index(x) for x in p])
        part = permute_blocks(t, sizes, order)
        acc.append(part if sign > 0 else -part)
    out = acc[0]
    for a in acc[1:]:
        out = out + a
    return out


class ChainVector:
    """Element of (wedge^d m)_w held summand by summand as tensors."""

    __slots__ = ("shape", "genus", "components")

    def __init__(self, shape: ChainShape, genus: int, components: dict | None = None):
        self.shape = shape
        self.genus = genus
        self.components: dict[tuple[int, ...], SparseTensor] = {}
        for s, t in (components or {}).items():
            s = tuple(s)
            if s not in shape.summands:
                raise ShapeMismatch(f"summand {s} is not part of weight {shape.weight} "
                                    f"degree-{shape.degree} chains")
            if t.degree != shape.tensor_degree(s):
                raise ShapeMismatch(f"summand {s} needs tensor degree {shape.tensor_degree(s)}")
            if t.nnz:
                self.components[s] = t

    @classmethod
    def zero(cls, weight: int, degree: int, genus: int) -> "ChainVector":
        return cls(ChainShape.of(weight, degree), genus)

    @classmethod
    def from_wedge(cls, factors: Sequence[SparseTensor], coef=1) -> "ChainVector":
        """Canonical embedding of x_1 ^ ... ^ x_d for derivation tensors x_i."""
        if not factors:
            raise ShapeMismatch("empty wedge")
        genus = factors[0].genus
        degs = [f.degree - 2 for f in factors]
        order = sorted(range(len(factors)), key=lambda i: degs[i])
        sign = _perm_sign(order)
        summand = tuple(degs[i] for i in order)
        t = factors[order[0]]
        for i in order[1:]:
            t = t.tensor(factors[i])
        sizes = [d + 2 for d in summand]
        t = antisymmetrize_blocks(t, sizes, ChainShape.symmetry(summand))
        t = t.scale(sign * coef) if sign * coef != 1 else t
        shape = ChainShape.of(sum(degs), len(factors))
        return cls(shape, genus, {summand: t})

    def component(self, selector: Sequence[int]) -> SparseTensor | None:
        return self.components.get(tuple(selector))

    def _check(self, other: "ChainVector") -> None:
        if self.shape != other.shape or self.genus != other.genus:
            raise ShapeMismatch("chain vectors of different shape")

    def __add__(self, other: "ChainVector") -> "ChainVector":
        self._check(other)
        comps = dict(self.components)
        for s, t in other.components.items():
            comps[s] = comps[s] + t if s in comps else t
        return ChainVector(self.shape, self.genus, comps)

    def __neg__(self) -> "ChainVector":
        return ChainVector(self.shape, self.genus, {s: -t for s, t in self.components.items()})

    def __sub__(self, other: "ChainVector") -> "ChainVector":
        return self + (-other)

    def scale(self, c) -> "ChainVector":
        return ChainVector(self.shape, self.genus, {s: t.scale(c) for s, t in self.components.items()})

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        return (isinstance(other, ChainVector) and self.shape == other.shape
                and self.components == other.components)

    def map_tensors(self, f) -> "ChainVector":
        return ChainVector(self.shape, self.genus, {s: f(t) for s, t in self.components.items()})

    def __repr__(self) -> str:
        parts = ", ".join(f"{s}: nnz={t.nnz}" for s, t in sorted(self.components.items()))
        return f"ChainVector(w={self.shape.weight}, d={self.shape.degree}, {{{parts}}})"


def bracket_front(t: SparseTensor, n1: int, n2: int) -> SparseTensor:
    """Bracket of the first two blocks (derivation tensors of degree n1, n2)."""
    n = t.degree
    if t.nnz == 0:
        return SparseTensor(t.genus, n - 2)
    k1, c1 = K.insert_contract(t.keys, t.coefs, n, n1, n2, MU_TABLE)
    swapped = K.permute_slots(t.keys, n, list(range(n1, n1 + n2)) + list(range(n1)) + list(range(n1 + n2, n)))
    k2, c2 = K.insert_contract(swapped, t.coefs, n, n2, n1, MU_TABLE)
    keys, coefs = K.combine(np.concatenate([k1, k2]), np.concatenate([c1, -c2]))
    return SparseTensor(t.genus, n - 2, keys, coefs, normalized=True)


def boundary2(v: ChainVector) -> SparseTensor:
    """d(x ^ y) = [x, y], landing in m(w) inside H^{(x)(w+2)}."""
    if v.shape.degree != 2:
        raise ShapeMismatch("boundary2 needs a 2-chain")
    w = v.shape.weight
    out = SparseTensor(v.genus, w + 2)
    for (i, j), t in v.components.items():
        b = bracket_front(t, i + 2, j + 2)
        if i == j:
            b = b.scale(Fraction(1, 2))
        out = out + b
    return out


_D3_TERMS = ((0, 1, 2, -1), (0, 2, 1, 1), (1, 2, 0, -1))


def _wedge_pair(t: SparseTensor, da: int, db: int) -> tuple[tuple[int, int], SparseTensor]:
    """Read a tensor with blocks (da, db) as a ^ b and embed canonically."""
    sa, sb = da + 2, db + 2
    if da < db:
        return (da, db), t
    if da > db:
        return (db, da), -permute_blocks(t, [sa, sb], [1, 0])
    return (da, db), t - permute_blocks(t, [sa, sb], [1, 0])


def boundary3(v: ChainVector) -> ChainVector:
    if v.shape.degree != 3:
        raise ShapeMismatch("boundary3 needs a 3-chain")
    w = v.shape.weight
    shape2 = ChainShape.of(w, 2)
    comps: dict[tuple[int, int], SparseTensor] = {}
    for summand, t in v.components.items():
        sizes = [d + 2 for d in summand]
        stab = ChainShape.stabilizer_order(summand)
        for p, q, r, sign in _D3_TERMS:
            moved = permute_blocks(t, sizes, [p, q, r])
            b = bracket_front(moved, sizes[p], sizes[q])
            key, e = _wedge_pair(b, summand[p] + summand[q], summand[r])
            e = e.scale(Fraction(sign, stab)) if stab > 1 else (e if sign > 0 else -e)
            comps[key] = comps[key] + e if key in comps else e
    return ChainVector(shape2, v.genus, comps)


def raise_chain(v: ChainVector, op) -> ChainVector:
    """A raising operator acts letterwise on every slot, so on each summand."""
    return v.map_tensors(op)


# ---------------------------------------------------------------------------
# coordinate complex on one weight slice


def _canonical(items: Sequence[Gen]) -> tuple[int, tuple | None]:
    order = sorted(range(len(items)), key=lambda i: items[i])
    out = tuple(items[i] for i in order)
    for a, b in zip(out, out[1:]):
        if a == b:
            return 0, None
    return _perm_sign(order), out


class ChainSlice:
    """Weight-lam parts of the 2- and 3-chains of m_{g,1} in weight w."""

    def __init__(self, algebra: JohnsonAlgebra, weight: int, lam: Sequence[int]):
        self.alg = algebra
        self.genus = algebra.genus
        self.weight = weight
        self.lam = tuple(int(x) for x in lam)
        if len(self.lam) != self.genus:
            raise ShapeMismatch("weight vector length must equal the genus")
        self._basis2: list[tuple[Gen, Gen]] | None = None
        self._index2: dict | None = None

    # enumeration --------------------------------------------------------
    def _gens(self, k: int, nu) -> range:
        return range(self.alg.m(k).slice_dim(nu))

    def _weights(self, k: int) -> list:
        return self.alg.m(k).weights()

    def _iter_pairs(self, lam, w) -> Iterator[tuple[Gen, Gen]]:
        for k1 in range(1, w // 2 + 1):
            k2 = w - k1
            m2 = self.alg.m(k2)
            for nu1 in self._weights(k1):
                nu2 = sub_weights(lam, nu1)
                d2 = m2.slice_dim(nu2)
                if not d2:
                    continue
                for i in self._gens(k1, nu1):
                    x = (k1, nu1, i)
                    for j in range(d2):
                        y = (k2, nu2, j)
                        if k1 < k2 or x < y:
                            yield x, y

    def count2(self, pieces=None) -> int:
        """dim of the 2-chains of this weight; ``pieces`` maps k to an object
        with ``weights()`` and ``slice_dim()`` (default: the exact m(k))."""
        piece = pieces or self.alg.m
        n = 0
        for k1 in range(1, self.weight // 2 + 1):
            k2 = self.weight - k1
            m1, m2 = piece(k1), piece(k2)
            tot = diag = 0
            for nu1 in m1.weights():
                a = m1.slice_dim(nu1)
                nu2 = sub_weights(self.lam, nu1)
                tot += a * m2.slice_dim(nu2)
                if nu2 == nu1:
                    diag += a
            # wedge^2 of one piece: unordered pairs of distinct elements
            n += tot if k1 < k2 else (tot - diag) // 2
        return n

    def count3(self, pieces=None) -> int:
        """Ordered-triple count divided by the symmetry order (an estimate
        of the 3-chain dimension when degrees repeat)."""
        piece = pieces or self.alg.m
        n = 0
        for ks in _compositions(self.weight, 3):
            ms = [piece(k) for k in ks]
            sub = 0
            for nu1 in ms[0].weights():
                a = ms[0].slice_dim(nu1)
                rest = sub_weights(self.lam, nu1)
                for nu2 in ms[1].weights():
                    b = ms[1].slice_dim(nu2)
                    if b:
                        sub += a * b * ms[2].slice_dim(sub_weights(rest, nu2))
            n += sub // ChainShape.stabilizer_order(ks)
        return n

    @property
    def basis2(self) -> list[tuple[Gen, Gen]]:
        if self._basis2 is None:
            self._basis2 = list(self._iter_pairs(self.lam, self.weight))
            self._index2 = {p: n for n, p in enumerate(self._basis2)}
        return self._basis2

    @property
    def index2(self) -> dict:
        self.basis2
        return self._index2

    def iter_basis3(self) -> Iterator[tuple[Gen, Gen, Gen]]:
        w, lam = self.weight, self.lam
        for ks in _compositions(w, 3):
            m1, m2, m3 = (self.alg.m(k) for k in ks)
            for nu1 in m1.weights():
                rest = sub_weights(lam, nu1)
                d1 = m1.slice_dim(nu1)
                for nu2 in m2.weights():
                    nu3 = sub_weights(rest, nu2)
                    d3 = m3.slice_dim(nu3)
                    if not d3:
                        continue
                    d2 = m2.slice_dim(nu2)
                    for i in range(d1):
                        x = (ks[0], nu1, i)
                        for j in range(d2):
                            y = (ks[1], nu2, j)
                            if ks[0] == ks[1] and not x < y:
                                continue
                            for l in range(d3):
                                z = (ks[2], nu3, l)
                                if ks[1] == ks[2] and not y < z:
                                    continue
                                yield x, y, z

    # maps ----------------------------------------------------------------
    def d2(self, pair: tuple[Gen, Gen]) -> dict[int, Fraction]:
        """Coordinates of d(x ^ y) = [x, y] in m(w)_lam."""
        return self.alg.bracket(pair[0], pair[1])

    def d3(self, triple: tuple[Gen, Gen, Gen]) -> dict[int, Fraction]:
        """Coordinates of d(x1 ^ x2 ^ x3) against :attr:`basis2`."""
        out: dict[int, Fraction] = {}
        index = self.index2
        for p, q, r, sign in _D3_TERMS:
            xp, xq, xr = triple[p], triple[q], triple[r]
            br = self.alg.bracket(xp, xq)
            if not br:
                continue
            kz = xp[0] + xq[0]
            nuz = add_weights(xp[1], xq[1])
            for idx, c in br.items():
                s, pair = _canonical(((kz, nuz, idx), xr))
                if not s:
                    continue
                col = index[pair]
                nv = out.get(col, 0) + sign * s * c
                if nv:
                    out[col] = nv
                else:
                    out.pop(col, None)
        return out

    def raise_wedge(self, chain: Sequence[Gen], r: int) -> dict[tuple, Fraction]:
        out: dict[tuple, Fraction] = {}
        for pos, x in enumerate(chain):
            img = self.alg.raise_element(x, r)
            if not img:
                continue
            nu = add_weights(x[1], simple_root(r, self.genus))
            for j, c in img.items():
                items = list(chain)
                items[pos] = (x[0], nu, j)
                s, key = _canonical(items)
                if not s:
                    continue
                nv = out.get(key, 0) + s * c
                if nv:
                    out[key] = nv
                else:
                    out.pop(key, None)
        return out

    # spaces ----------------------------------------------------------------
    def boundary2_rank(self) -> int:
        return sparse_rank(self.d2(p) for p in self.basis2)

    def cycle_dimension(self) -> int:
        return len(self.basis2) - self.boundary2_rank()

    def cycles(self) -> list[dict[int, Fraction]]:
        """Basis of Z_2 restricted to this weight (coordinates)."""
        cons: dict = {}
        for col, pair in enumerate(self.basis2):
            for t, c in self.d2(pair).items():
                cons.setdefault(t, {})[col] = c
        return nullspace(cons.values(), len(self.basis2))

    def _hw_constraints(self, vectors: Sequence[dict[int, Fraction]] | None) -> dict:
        """Rows of e_1..e_g (and d for raw basis columns) as column dicts."""
        cons: dict = {}
        basis = self.basis2
        if vectors is None:
            for col, pair in enumerate(basis):
                for t, c in self.d2(pair).items():
                    cons.setdefault(("d", t), {})[col] = c
                for r in range(1, self.genus + 1):
                    for key, c in self.raise_wedge(pair, r).items():
                        row = cons.setdefault((r, key), {})
                        row[col] = row.get(col, 0) + c
            return cons
        for col, vec in enumerate(vectors):
            for b, x in vec.items():
                for r in range(1, self.genus + 1):
                    for key, c in self.raise_wedge(basis[b], r).items():
                        row = cons.setdefault((r, key), {})
                        row[col] = row.get(col, 0) + x * c
        return cons

    def highest_weight_cycles(self) -> list[dict[int, Fraction]]:
        """Basis of the highest weight vectors of weight lam in Z_2(w)."""
        cons = self._hw_constraints(None)
        return nullspace((r for r in cons.values() if any(r.values())), len(self.basis2))

    def highest_weight_in(self, vectors: Sequence[dict[int, Fraction]]) -> list[dict[int, Fraction]]:
        """Highest weight vectors in span(vectors), as coordinates on basis2."""
        cons = self._hw_constraints(vectors)
        ker = nullspace((r for r in cons.values() if any(r.values())), len(vectors))
        out = []
        for x in ker:
            acc: dict[int, Fraction] = {}
            for i, c in x.items():
                for b, y in vectors[i].items():
                    acc[b] = acc.get(b, 0) + c * y
            out.append({b: y for b, y in acc.items() if y})
        return out

    def boundaries(self, target: int | None = None, seed: int = 0,
                   limit: int | None = None) -> RowReducer:
        """Reduced echelon span of d(C_3) in this weight, stopping at ``target``."""
        red = RowReducer(reduced=True)
        triples = list(self.iter_basis3())
        random.Random(seed).shuffle(triples)
        for n, tr in enumerate(triples):
            if target is not None and red.rank >= target:
                break
            if limit is not None and n >= limit:
                break
            red.add(self.d3(tr))
        return red

    # conversion --------------------------------------------------------------
    def to_chain_vector(self, coords: dict[int, Fraction]) -> ChainVector:
        acc = ChainVector.zero(self.weight, 2, self.genus)
        for b, c in coords.items():
            x, y = self.basis2[b]
            tx = self.alg.m(x[0]).slice(x[1]).rows[x[2]]
            ty = self.alg.m(y[0]).slice(y[1]).rows[y[2]]
            acc = acc + ChainVector.from_wedge([tx, ty], c)
        return acc


# ---------------------------------------------------------------------------
# results


def _lam_weight(lam: YoungDiagram | Sequence[int], genus: int) -> tuple[int, ...]:
    if isinstance(lam, YoungDiagram):
        if len(lam) > genus:
            raise HomologyError(f"{lam} has more rows than the genus {genus}")
        return lam.weight(genus)
    return tuple(int(x) for x in lam)


class _WordCountPiece:
    """Stand-in for m(k) in size estimates: words of weight nu in H^{(x)(k+2)}
    divided by the k+2 cyclic rotations (an upper-range estimate)."""

    def __init__(self, genus: int, k: int):
        self.genus, self.n = genus, k + 2
        self._dims: dict = {}
        self._weights = None

    def weights(self) -> list:
        if self._weights is None:
            from .sprep import orbit
            self._weights = [w for d in dominant_weights(self.n, self.genus) for w in orbit(d)]
        return self._weights

    def slice_dim(self, nu) -> int:
        d = dominant(nu)
        if d not in self._dims:
            self._dims[d] = -(-_word_count(d, self.n) // self.n)
        return self._dims[d]


def _word_count(nu: Sequence[int], n: int) -> int:
    base = sum(abs(x) for x in nu)
    if base > n or (n - base) % 2:
        return 0
    extra = (n - base) // 2
    total = 0
    g = len(nu)
    for split in itertools.combinations(range(extra + g - 1), g - 1):
        parts = [b - a - 1 for a, b in zip((-1,) + split, split + (extra + g - 1,))]
        denom = 1
        for x, e in zip(nu, parts):
            denom *= math.factorial(max(x, 0) + e) * math.factorial(max(-x, 0) + e)
        total += math.factorial(n) // denom
    return total


def _size_pieces(alg: JohnsonAlgebra, exact_up_to: int = 3):
    """Exact m(k) when cheap or already available, word-count estimates beyond."""
    est: dict[int, _WordCountPiece] = {}

    def piece(k: int):
        available = k in alg._pieces or k <= exact_up_to
        if not available and alg.cache is not None:
            available = alg.cache.paths("m", alg.genus, k)[0].exists()
        if available:
            return alg.m(k)
        if k not in est:
            est[k] = _WordCountPiece(alg.genus, k)
        return est[k]

    return piece


def estimate_slice(alg: JohnsonAlgebra, weight: int, lam, degree3: bool = True) -> int:
    """Approximate count of chain basis elements touched for one weight slice."""
    cs = ChainSlice(alg, weight, lam)
    pieces = _size_pieces(alg)
    n = cs.count2(pieces)
    if degree3:
        n += cs.count3(pieces)
    return n


def _guard(alg, weight, lam, budget, degree3=True):
    est = estimate_slice(alg, weight, lam, degree3)
    if budget is not None and est > budget:
        raise BudgetExceeded(
            f"weight {weight} slice {list(lam)} needs about {est} chain basis elements "
            f"(budget {budget}); raise --budget-nnz to run it", est, budget)
    return est


def cycle_multiplicity(w: int, lam, genus: int, algebra: JohnsonAlgebra | None = None,
                       budget: int | None = DEFAULT_BUDGET) -> int:
    alg = algebra or JohnsonAlgebra(genus)
    lw = _lam_weight(lam, genus)
    _guard(alg, w, lw, budget, degree3=False)
    return len(ChainSlice(alg, w, lw).highest_weight_cycles())


@dataclass
class CycleSpace:
    """Z_2(w), evaluated weight slice by weight slice."""

    weight: int
    genus: int
    algebra: JohnsonAlgebra
    budget: int | None = DEFAULT_BUDGET

    @property
    def tensor_degree(self) -> int:
        return self.weight + 4

    def slice(self, lam) -> ChainSlice:
        return ChainSlice(self.algebra, self.weight, lam)

    def weight_dimension(self, nu) -> int:
        cs = self.slice(dominant(nu))
        return cs.cycle_dimension()

    def dimension(self) -> int:
        return sum(orbit_size(nu) * self.weight_dimension(nu)
                   for nu in dominant_weights(self.tensor_degree, self.genus))

    def chain_dimension(self) -> int:
        return sum(orbit_size(nu) * self.slice(nu).count2()
                   for nu in dominant_weights(self.tensor_degree, self.genus))

    def multiplicity(self, lam: YoungDiagram) -> int:
        if len(lam) > self.genus:
            return 0
        lw = lam.weight(self.genus)
        _guard(self.algebra, self.weight, lw, self.budget, degree3=False)
        return len(self.slice(lw).highest_weight_cycles())

    def basis(self, lam) -> list[ChainVector]:
        cs = self.slice(_lam_weight(lam, self.genus))
        return [cs.to_chain_vector(v) for v in cs.cycles()]

    def decompose(self) -> Counter:
        out: Counter = Counter()
        for lam in candidate_diagrams(self.tensor_degree, self.genus):
            m = self.multiplicity(lam)
            if m:
                out[lam] = m
        total = self.dimension()
        check = sum(m * weyl_dimension(lam, self.genus) for lam, m in out.items())
        if check != total:
            raise InconsistentDecomposition(
                f"Z_2({self.weight}) multiplicities give {check}, weight spaces give {total}")
        return out


def cycles(w: int, genus: int, algebra: JohnsonAlgebra | None = None,
           budget: int | None = DEFAULT_BUDGET) -> CycleSpace:
    if w < 2:
        raise HomologyError("2-chains need weight >= 2")
    if genus < 1:
        raise HomologyError("invalid genus")
    return CycleSpace(w, genus, algebra or JohnsonAlgebra(genus), budget)


@dataclass
class H2Result:
    weight: int
    genus: int
    lam: YoungDiagram
    cycle_multiplicity: int
    boundary_multiplicity: int
    cycle_slice_dimension: int
    boundary_slice_rank: int
    chain_slice_dimension: int
    triples_used: int
    seconds: float

    @property
    def multiplicity(self) -> int:
        return self.cycle_multiplicity - self.boundary_multiplicity

    def as_dict(self) -> dict:
        return {
            "weight": self.weight,
            "genus": self.genus,
            "component": str(self.lam),
            "h2_multiplicity": self.multiplicity,
            "z2_multiplicity": self.cycle_multiplicity,
            "b2_multiplicity": self.boundary_multiplicity,
            "z2_weight_dimension": self.cycle_slice_dimension,
            "b2_weight_dimension": self.boundary_slice_rank,
            "c2_weight_dimension": self.chain_slice_dimension,
        }


def h2_component(w: int, lam: YoungDiagram, genus: int, algebra: JohnsonAlgebra | None = None,
                 budget: int | None = DEFAULT_BUDGET, seed: int = 0) -> H2Result:
    """Multiplicity of lam in H_2(m_{g,1})_w.

    Highest weight vectors of Z_2 are computed exactly; the boundary span in
    the lam-weight space grows until it fills the cycle space (then H_2 has no
    lam-weight vectors at all) or the 3-chains run out, in which case the
    highest weight vectors inside the boundary span are counted.
    """
    t0 = time.perf_counter()
    alg = algebra or JohnsonAlgebra(genus)
    lw = _lam_weight(lam, genus)
    _guard(alg, w, lw, budget)
    cs = ChainSlice(alg, w, lw)
    zdim = cs.cycle_dimension()
    zmult = len(cs.highest_weight_cycles()) if zdim else 0
    red = cs.boundaries(target=zdim, seed=seed) if zdim else RowReducer()
    if red.rank == zdim:
        bmult = zmult
    else:
        rows = [{k: Fraction(v) for k, v in r.items()} for r in red.rows.values()]
        bmult = len(cs.highest_weight_in(rows))
    return H2Result(w, genus, lam, zmult, bmult, zdim, red.rank, len(cs.basis2),
                    red.rank, time.perf_counter() - t0)


def h2_components(w: int, genus: int, algebra: JohnsonAlgebra | None = None,
                  budget: int | None = DEFAULT_BUDGET, seed: int = 0,
                  components: Iterable[YoungDiagram] | None = None) -> list[H2Result]:
    alg = algebra or JohnsonAlgebra(genus)
    lams = list(components) if components is not None else candidate_diagrams(w + 4, genus)
    lams = [l for l in lams if len(l) <= genus]
    for lam in sorted(lams, key=lambda l: l.size):  # largest slices first; refuse before work
        _guard(alg, w, lam.weight(genus), budget)
    return [h2_component(w, lam, genus, alg, budget=None, seed=seed) for lam in lams]


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    weight: int
    genus: int
    lam: YoungDiagram
    detectors: list[Detector]
    matrix: list[list[Fraction]]
    rank: int
    multiplicity: int
    soundness_rank: int
    readout_keys: list[int]

    @property
    def sound(self) -> bool:
        return self.soundness_rank == self.multiplicity

    @property
    def passed(self) -> bool:
        return self.sound and self.multiplicity > 0 and self.rank == self.multiplicity


def _readouts(detectors: Sequence[Detector], vectors: Sequence[ChainVector], lw) -> list[list[dict]]:
    return [[detector_readout(d, v, lw) for v in vectors] for d in detectors]


def _readout_rows(reads: list[list[dict]], keysets: list[set] | None = None) -> tuple[list, list]:
    """Matrix with one row per (detector, output key) and one column per vector."""
    rows, labels = [], []
    for di, per_vec in enumerate(reads):
        keys = set(keysets[di]) if keysets else set()
        keys.update(k for r in per_vec for k in r)
        for k in sorted(keys):
            rows.append([r.get(k, Fraction(0)) for r in per_vec])
            labels.append((di, k))
    return rows, labels


def surjectivity_certificate(w: int, lam: YoungDiagram, candidates: Sequence[ChainVector],
                             detectors: Sequence[Detector], genus: int,
                             algebra: JohnsonAlgebra | None = None,
                             check_soundness: bool = True) -> Certificate:
    """Rank of D_i(d v_j); full rank m certifies that lam does not occur in H_2."""
    alg = algebra or JohnsonAlgebra(genus)
    lw = _lam_weight(lam, genus)
    for v in candidates:
        if v.shape.degree != 3 or v.shape.weight != w:
            raise ShapeMismatch("candidates must be weight-w 3-chains")
    m = len(detectors)
    sound_rank = m
    keysets = [set() for _ in detectors]
    if check_soundness:
        cs = ChainSlice(alg, w, lw)
        hw = cs.highest_weight_cycles()
        m = len(hw)
        if len(detectors) != m:
            raise SoundnessFailure(
                f"{len(detectors)} detectors supplied but {lam} occurs {m} times in Z_2({w})")
        hw_vecs = [cs.to_chain_vector(x) for x in hw]
        sreads = _readouts(detectors, hw_vecs, lw)
        keysets = [{k for r in per for k in r} for per in sreads]
        srows, _ = _readout_rows(sreads)
        sound_rank = rank_of_matrix(srows) if srows else 0
    images = [boundary3(v) for v in candidates]
    rows, labels = _readout_rows(_readouts(detectors, images, lw), keysets)
    matrix = rows if candidates else [[] for _ in detectors]
    rank = rank_of_matrix(rows) if candidates and rows else 0
    return Certificate(w, genus, lam, list(detectors), matrix, rank, m, sound_rank,
                       [k for _, k in labels])
