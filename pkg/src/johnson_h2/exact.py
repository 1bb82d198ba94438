"""Exact scalars, sparse tensors over the symplectic basis, elimination.

Letters are coded ``a_i -> 2(i-1)`` and ``b_i -> 2(i-1)+1`` so that the integer
order of codes is a_1 < b_1 < a_2 < ... < b_g.  A :class:`SparseTensor` keeps
sorted packed keys (see :mod:`johnson_h2.kernels`) and a coefficient array that
is int64 while the numbers are small and an object array of Python ints or
:class:`fractions.Fraction` otherwise.
"""

from __future__ import annotations

import heapq
import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import kernels as K

Scalar = Fraction

MAX_GENUS = 16

_LETTER_RE = re.compile(r"^([ab])(\d+)$")


class ExactCoreError(ValueError):
    pass


# ---------------------------------------------------------------------------
# letters


def letter_code(kind: str, slot: int) -> int:
    if kind not in ("a", "b") or not 1 <= slot <= MAX_GENUS:
        raise ExactCoreError(f"bad letter {kind}{slot}")
    return 2 * (slot - 1) + (kind == "b")


def parse_letter(text: str) -> int:
    m = _LETTER_RE.match(text.strip())
    if not m:
        raise ExactCoreError(f"cannot parse letter {text!r}")
    return letter_code(m.group(1), int(m.group(2)))


def letter_name(code: int) -> str:
    return ("b" if code & 1 else "a") + str(code // 2 + 1)


def letter_slot(code: int) -> int:
    return code // 2 + 1


def mu_form(x: int, y: int) -> int:
    """The symplectic pairing on letter codes: mu(a_i, b_j) = delta_ij."""
    if x >> 1 != y >> 1:
        return 0
    if x & 1 == 0 and y & 1 == 1:
        return 1
    if x & 1 == 1 and y & 1 == 0:
        return -1
    return 0


MU_TABLE = np.array([[mu_form(x, y) for y in range(32)] for x in range(32)], dtype=np.int64)


def dual_letter(code: int) -> tuple[int, int]:
    """(sign, code) of x* with u = sum_x mu(u, x) x* for all u."""
    # b_i* = a_i and a_i* = -b_i
    if code & 1:
        return 1, code - 1
    return -1, code + 1


def letter_weight(code: int, genus: int) -> tuple[int, ...]:
    w = [0] * genus
    w[code >> 1] = -1 if code & 1 else 1
    return tuple(w)


# ---------------------------------------------------------------------------
# coefficient helpers


def _as_coef_array(values) -> np.ndarray:
    vals = list(values)
    out = np.empty(len(vals), dtype=object)
    for i, v in enumerate(vals):
        if isinstance(v, Fraction):
            out[i] = v.numerator if v.denominator == 1 else v
        elif isinstance(v, (int, np.integer)):
            out[i] = int(v)
        else:
            raise ExactCoreError(f"non-exact coefficient {v!r}")
    return _shrink(out)


def _shrink(coefs: np.ndarray) -> np.ndarray:
    if coefs.dtype == object:
        if K.fits_int64(coefs):
            return coefs.astype(np.int64)
        return np.array([c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c
                         for c in coefs], dtype=object)
    return coefs.astype(np.int64, copy=False)


def _py(c) -> int | Fraction:
    return int(c) if isinstance(c, (int, np.integer)) else c


def content(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            return 1
    return g


# ---------------------------------------------------------------------------
# sparse tensors


class SparseTensor:
    """Exact element of H^{(x) n} over the symplectic basis."""

    __slots__ = ("genus", "degree", "keys", "coefs")

    def __init__(self, genus: int, degree: int, keys=None, coefs=None, *, normalized=False):
        if not 1 <= genus <= MAX_GENUS:
            raise ExactCoreError(f"genus {genus} out of range")
        if not 0 <= degree <= K.MAX_DEGREE:
            raise ExactCoreError(f"degree {degree} out of range")
        self.genus = genus
        self.degree = degree
        if keys is None:
            keys = np.zeros(0, np.int64)
            coefs = np.zeros(0, np.int64)
        keys = np.asarray(keys, dtype=np.int64)
        if coefs.dtype != object:
            coefs = coefs.astype(np.int64, copy=False)
        if not normalized:
            keys, coefs = K.combine(keys, coefs)
            if coefs.dtype == object:
                coefs = _shrink(coefs)
        self.keys = keys
        self.coefs = coefs

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, genus: int, degree: int) -> "SparseTensor":
        return cls(genus, degree)

    @classmethod
    def from_terms(cls, genus: int, degree: int, terms: Mapping | Iterable) -> "SparseTensor":
        """Terms map letter-code tuples (or packed keys) to exact scalars."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        keys, vals = [], []
        for key, c in items:
            if not isinstance(key, (int, np.integer)):
                key = tuple(key)
                if len(key) != degree:
                    raise ExactCoreError(f"key {key} has length {len(key)}, expected {degree}")
                for code in key:
                    if not 0 <= code < 2 * genus:
                        raise ExactCoreError(f"letter {code} outside genus {genus}")
                key = pack_key(key)
            keys.append(int(key))
            vals.append(c)
        return cls(genus, degree, np.array(keys, dtype=np.int64), _as_coef_array(vals))

    @classmethod
    def letter(cls, genus: int, code: int) -> "SparseTensor":
        return cls(genus, 1, np.array([code], np.int64), np.array([1], np.int64), normalized=True)

    @classmethod
    def from_word(cls, genus: int, codes: Sequence[int], coef=1) -> "SparseTensor":
        return cls.from_terms(genus, len(codes), {tuple(codes): coef})

    # inspection ---------------------------------------------------------
    @property
    def nnz(self) -> int:
        return int(self.keys.size)

    def __len__(self) -> int:
        return self.nnz

    def __bool__(self) -> bool:
        return self.nnz > 0

    def is_zero(self) -> bool:
        return self.nnz == 0

    def letters(self) -> np.ndarray:
        return K.letters_of(self.keys, self.degree)

    def items(self) -> Iterator[tuple[tuple[int, ...], int | Fraction]]:
        let = self.letters()
        for row, c in zip(let, self.coefs):
            yield tuple(int(x) for x in row), _py(c)

    def to_dict(self) -> dict[int, int | Fraction]:
        return {int(k): _py(c) for k, c in zip(self.keys, self.coefs)}

    def coefficient(self, word: Sequence[int]) -> int | Fraction:
        key = pack_key(word)
        i = np.searchsorted(self.keys, key)
        if i < self.keys.size and self.keys[i] == key:
            return _py(self.coefs[i])
        return 0

    def is_integral(self) -> bool:
        return self.coefs.dtype != object or all(not isinstance(c, Fraction) for c in self.coefs)

    def weights(self) -> np.ndarray:
        """(nnz, g) array of term weights."""
        let = self.letters()
        out = np.zeros((self.nnz, self.genus), dtype=np.int64)
        if self.nnz == 0:
            return out
        rows = np.repeat(np.arange(self.nnz), self.degree)
        flat = let.ravel()
        np.add.at(out, (rows, flat >> 1), np.where(flat & 1, -1, 1))
        return out

    def weight(self) -> tuple[int, ...] | None:
        """Common weight of all terms, or None if inhomogeneous or zero."""
        w = self.weights()
        if w.shape[0] == 0 or np.any(w != w[0]):
            return None
        return tuple(int(x) for x in w[0])

    def max_abs(self) -> int:
        if self.nnz == 0:
            return 0
        return max(abs(_py(c)) for c in self.coefs) if self.coefs.dtype == object \
            else int(np.abs(self.coefs).max())

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "SparseTensor") -> None:
        if (self.genus, self.degree) != (other.genus, other.degree):
            raise ExactCoreError(
                f"shape mismatch: (g={self.genus}, n={self.degree}) vs (g={other.genus}, n={other.degree})")

    def _cat(self, other: "SparseTensor", sign: int) -> "SparseTensor":
        self._check(other)
        c1, c2 = self.coefs, other.coefs
        if c1.dtype == object or c2.dtype == object or not (K.small(c1) and K.small(c2)):
            c1, c2 = c1.astype(object), c2.astype(object)
        return SparseTensor(self.genus, self.degree, np.concatenate([self.keys, other.keys]),
                            np.concatenate([c1, sign * c2]))

    def __add__(self, other: "SparseTensor") -> "SparseTensor":
        return self._cat(other, 1)

    def __sub__(self, other: "SparseTensor") -> "SparseTensor":
        return self._cat(other, -1)

    def __neg__(self) -> "SparseTensor":
        return SparseTensor(self.genus, self.degree, self.keys, -self.coefs, normalized=True)

    def scale(self, c) -> "SparseTensor":
        if c == 0 or self.nnz == 0:
            return SparseTensor(self.genus, self.degree)
        if isinstance(c, Fraction) and c.denominator == 1:
            c = c.numerator
        if isinstance(c, (int, np.integer)) and abs(int(c)) < K.SAFE_FACTOR and K.small(self.coefs):
            return SparseTensor(self.genus, self.degree, self.keys, self.coefs * int(c), normalized=True)
        coefs = _shrink(np.array([_py(x) * c for x in self.coefs], dtype=object))
        return SparseTensor(self.genus, self.degree, self.keys, coefs, normalized=True)

    def __mul__(self, c) -> "SparseTensor":
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        if (self.genus, self.degree, self.nnz) != (other.genus, other.degree, other.nnz):
            return False
        return bool(np.array_equal(self.keys, other.keys)) and all(
            _py(a) == _py(b) for a, b in zip(self.coefs, other.coefs))

    def __hash__(self):
        return hash((self.genus, self.degree, self.keys.tobytes()))

    def __repr__(self) -> str:
        terms = list(self.items())[:6]
        body = " + ".join(f"{c}*{'.'.join(letter_name(x) for x in w)}" for w, c in terms)
        more = " + ..." if self.nnz > 6 else ""
        return f"SparseTensor(g={self.genus}, n={self.degree}: {body or '0'}{more})"

    def tensor(self, other: "SparseTensor") -> "SparseTensor":
        """self (x) other."""
        if self.genus != other.genus:
            raise ExactCoreError("genus mismatch")
        keys, coefs = K.outer(self.keys, self.coefs, other.keys, other.coefs, other.degree)
        return SparseTensor(self.genus, self.degree + other.degree, keys, coefs)

    def rotate(self) -> "SparseTensor":
        """Move the first slot to the end."""
        n = self.degree
        if n <= 1:
            return self
        sh = K.BITS * (n - 1)
        first = self.keys >> sh
        rest = self.keys & ((1 << sh) - 1)
        return SparseTensor(self.genus, n, (rest << K.BITS) | first, self.coefs.copy())

    def swap_halves(self, left: int) -> "SparseTensor":
        """x (x) y -> y (x) x where x has degree ``left``."""
        right = self.degree - left
        hi = self.keys >> (K.BITS * right)
        lo = self.keys & ((1 << (K.BITS * right)) - 1)
        return SparseTensor(self.genus, self.degree, (lo << (K.BITS * left)) | hi, self.coefs.copy())

    def first_letter_part(self, code: int) -> "SparseTensor":
        """Sum of c * rest over the terms c * (code (x) rest)."""
        sh = K.BITS * (self.degree - 1)
        lo = np.searchsorted(self.keys, code << sh)
        hi = np.searchsorted(self.keys, (code + 1) << sh)
        return SparseTensor(self.genus, self.degree - 1, self.keys[lo:hi] & ((1 << sh) - 1),
                            self.coefs[lo:hi], normalized=True)

    def weight_part(self, weight: Sequence[int]) -> "SparseTensor":
        w = self.weights()
        sel = np.all(w == np.asarray(weight, dtype=np.int64)[None, :], axis=1)
        return SparseTensor(self.genus, self.degree, self.keys[sel], self.coefs[sel], normalized=True)

    def with_genus(self, genus: int) -> "SparseTensor":
        if self.nnz and int(self.letters().max()) >= 2 * genus:
            raise ExactCoreError("tensor uses letters beyond the requested genus")
        return SparseTensor(genus, self.degree, self.keys, self.coefs, normalized=True)


def pack_key(word: Sequence[int]) -> int:
    k = 0
    for c in word:
        k = (k << K.BITS) | int(c)
    return k


def unpack_key(key: int, degree: int) -> tuple[int, ...]:
    return tuple((key >> (K.BITS * (degree - 1 - s))) & K.MASK for s in range(degree))


def tensor_sum(parts: Sequence[SparseTensor], genus: int | None = None, degree: int | None = None) -> SparseTensor:
    parts = [p for p in parts if p is not None]
    if not parts:
        if genus is None or degree is None:
            raise ExactCoreError("empty sum needs an explicit shape")
        return SparseTensor(genus, degree)
    g, n = parts[0].genus, parts[0].degree
    for p in parts:
        if (p.genus, p.degree) != (g, n):
            raise ExactCoreError("shape mismatch in sum")
    coefs = [p.coefs for p in parts]
    if any(c.dtype == object or not K.small(c) for c in coefs):
        coefs = [c.astype(object) for c in coefs]
    return SparseTensor(g, n, np.concatenate([p.keys for p in parts]), np.concatenate(coefs))


# ---------------------------------------------------------------------------
# contractions and projections


def _check_positions(positions: Sequence[int], degree: int) -> None:
    for p in positions:
        if not 1 <= p <= degree:
            raise ExactCoreError(f"slot {p} outside 1..{degree}")
    if len(set(positions)) != len(positions):
        raise ExactCoreError(f"repeated slot in {list(positions)}")


def multi_contraction(pairs: Sequence[tuple[int, int]], t: SparseTensor) -> SparseTensor:
    """mu_{(i1 j1)...}: pair the given 1-based slots by mu and drop them."""
    flat = [p for pr in pairs for p in pr]
    _check_positions(flat, t.degree)
    if not pairs:
        return t
    zero_based = [(i - 1, j - 1) for i, j in pairs]
    keys, coefs = K.contract(t.keys, t.coefs, t.degree, zero_based, MU_TABLE)
    return SparseTensor(t.genus, t.degree - 2 * len(pairs), keys, coefs)


def wedge_projection(blocks: Sequence[Sequence[int]], t: SparseTensor) -> SparseTensor:
    """p_{(...)(...)}: antisymmetrise each block of 1-based slots.

    The image in the wedge product is stored on sorted keys: the coefficient of
    ``x1 x2 x4 | x3 x5 | x6`` with each block increasing is the coefficient of
    ``(x1^x2^x4) (x) (x3^x5) (x) x6``.
    """
    flat = [p for b in blocks for p in b]
    _check_positions(flat, t.degree)
    if sorted(flat) != list(range(1, t.degree + 1)):
        raise ExactCoreError(f"blocks {blocks} do not partition 1..{t.degree}")
    keys, coefs = K.antisymmetrize(t.keys, t.coefs, t.degree, [[p - 1 for p in b] for b in blocks])
    return SparseTensor(t.genus, t.degree, keys, coefs)


def apply_letter_map(t: SparseTensor, code_map: np.ndarray, sign_map: np.ndarray) -> SparseTensor:
    keys, coefs = K.letter_map(t.keys, t.coefs, t.degree, code_map, sign_map)
    return SparseTensor(t.genus, t.degree, keys, coefs)


# ---------------------------------------------------------------------------
# exact elimination


def _strip(row: dict[int, int]) -> dict[int, int]:
    g = content(row.values())
    piv = row[min(row)]
    if piv < 0:
        g = -g
    if g != 1:
        for k in row:
            row[k] //= g
    return row


def _integral_row(vec: Mapping[int, int | Fraction]) -> dict[int, int]:
    dens = [c.denominator for c in vec.values() if isinstance(c, Fraction)]
    if not dens:
        return {k: int(c) for k, c in vec.items() if c != 0}
    L = reduce(lambda a, b: a * b // math.gcd(a, b), dens, 1)
    out = {}
    for k, c in vec.items():
        if c != 0:
            c = c * L
            out[k] = int(c.numerator if isinstance(c, Fraction) else c)
    return out


class RowReducer:
    """Incremental fraction-free elimination over integer keyed rows.

    With ``reduced=True`` every pivot key is absent from all other rows, and
    since the pivot of a row is always its smallest key, the final rows form
    the unique reduced echelon basis of the span (up to the positive content
    normalisation applied to each row).
    """

    def __init__(self, reduced: bool = True):
        self.reduced = reduced
        self.rows: dict[int, dict[int, int]] = {}
        self._cols: dict[int, set[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _eliminate(self, v: dict[int, int], p: int, r: dict[int, int]) -> dict[int, int]:
        a, b = r[p], v[p]
        g = math.gcd(a, b)
        a //= g
        b //= g
        # v <- a v - b r kills the p entry
        if a != 1:
            for k in v:
                v[k] *= a
        if b:
            for k, c in r.items():
                nv = v.get(k, 0) - b * c
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def reduce(self, vec: Mapping[int, int | Fraction]) -> dict[int, int]:
        """Residual of ``vec`` modulo the span, up to a nonzero scalar."""
        v = _integral_row(vec)
        if not v:
            return v
        if self.reduced:
            for p in [k for k in v if k in self.rows]:
                if p in v:
                    v = self._eliminate(v, p, self.rows[p])
        else:
            heap = [k for k in v if k in self.rows]
            heapq.heapify(heap)
            seen = set()
            while heap:
                p = heapq.heappop(heap)
                if p in seen or p not in v:
                    continue
                seen.add(p)
                r = self.rows[p]
                v = self._eliminate(v, p, r)
                for k in r:
                    if k in self.rows and k in v and k not in seen:
                        heapq.heappush(heap, k)
        return v

    def add(self, vec: Mapping[int, int | Fraction]) -> bool:
        """Insert a vector; return True if it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        v = _strip(v)
        p = min(v)
        if self.reduced:
            for q in list(self._cols.get(p, ())):
                r = self.rows[q]
                old = set(r)
                r = _strip(self._eliminate(r, p, v))
                self.rows[q] = r
                for k in old - set(r):
                    self._cols[k].discard(q)
                for k in set(r) - old:
                    self._cols.setdefault(k, set()).add(q)
            self._cols.pop(p, None)
            for k in v:
                if k != p:
                    self._cols.setdefault(k, set()).add(p)
        self.rows[p] = v
        return True

    def coordinates(self, vec: Mapping[int, int | Fraction]) -> dict[int, Fraction] | None:
        """Coordinates in the row basis (keyed by pivot), or None if outside."""
        if not self.reduced:
            raise ExactCoreError("coordinates need a reduced basis")
        coords = {}
        for k, c in vec.items():
            if k in self.rows:
                coords[k] = Fraction(c) / self.rows[k][k]
        residual = dict(vec)
        for p, x in coords.items():
            for k, c in self.rows[p].items():
                nv = residual.get(k, 0) - x * c
                if nv:
                    residual[k] = nv
                else:
                    residual.pop(k, None)
        if residual:
            return None
        return coords


class EchelonBasis:
    """Reduced echelon basis of a span of sparse tensors of one shape."""

    def __init__(self, genus: int, degree: int, rows: Iterable[SparseTensor] = ()):
        self.genus = genus
        self.degree = degree
        self._red = RowReducer(reduced=True)
        for r in rows:
            self.add(r)

    def _vec(self, t: SparseTensor) -> dict[int, int | Fraction]:
        if (t.genus, t.degree) != (self.genus, self.degree):
            raise ExactCoreError(
                f"echelonize: expected (g={self.genus}, n={self.degree}), got (g={t.genus}, n={t.degree})")
        return t.to_dict()

    def add(self, t: SparseTensor) -> bool:
        return self._red.add(self._vec(t))

    def extend(self, ts: Iterable[SparseTensor]) -> int:
        return sum(self.add(t) for t in ts)

    @property
    def rank(self) -> int:
        return self._red.rank

    def __len__(self) -> int:
        return self.rank

    @property
    def pivots(self) -> list[tuple[int, ...]]:
        return [unpack_key(p, self.degree) for p in sorted(self._red.rows)]

    @property
    def pivot_keys(self) -> list[int]:
        return sorted(self._red.rows)

    @property
    def rows(self) -> list[SparseTensor]:
        return [self._row(p) for p in sorted(self._red.rows)]

    def _row(self, p: int) -> SparseTensor:
        r = self._red.rows[p]
        ks = sorted(r)
        return SparseTensor(self.genus, self.degree, np.array(ks, np.int64),
                            _as_coef_array(r[k] for k in ks), normalized=True)

    def contains(self, t: SparseTensor) -> bool:
        return not self._red.reduce(self._vec(t))

    def residual(self, t: SparseTensor) -> dict[int, int]:
        return self._red.reduce(self._vec(t))

    def coordinates(self, t: SparseTensor) -> list[Fraction] | None:
        """Coordinates of ``t`` against ``rows`` (pivot order), None if outside."""
        c = self._red.coordinates(self._vec(t))
        if c is None:
            return None
        return [c.get(p, Fraction(0)) for p in self.pivot_keys]

    def coordinates_unchecked(self, t: SparseTensor) -> dict[int, Fraction]:
        """Coordinates read off at pivot keys without the membership check."""
        rows = self._red.rows
        out = {}
        for k, c in zip(t.keys.tolist(), t.coefs):
            r = rows.get(k)
            if r is not None:
                out[k] = Fraction(_py(c), r[k])
        return out

    @classmethod
    def from_reduced_rows(cls, genus: int, degree: int, rows: Sequence[SparseTensor]) -> "EchelonBasis":
        """Wrap rows already in reduced echelon form (pivot = smallest key)."""
        eb = cls(genus, degree)
        red = eb._red
        for t in rows:
            d = {int(k): int(_py(c)) for k, c in zip(t.keys, t.coefs)}
            p = min(d)
            red.rows[p] = d
            for k in d:
                if k != p:
                    red._cols.setdefault(k, set()).add(p)
        for p in red.rows:
            if p in red._cols:
                raise ExactCoreError("rows are not in reduced echelon form")
        return eb


def echelonize(vectors: Sequence[SparseTensor]) -> EchelonBasis:
    vectors = list(vectors)
    if not vectors:
        return EchelonBasis(1, 0)
    g, n = vectors[0].genus, vectors[0].degree
    eb = EchelonBasis(g, n)
    order = sorted(range(len(vectors)), key=lambda i: vectors[i].nnz)
    for i in order:
        eb.add(vectors[i])
    return eb


def sparse_rank(rows: Iterable[Mapping[int, int | Fraction]]) -> int:
    red = RowReducer(reduced=False)
    for r in sorted((dict(r) for r in rows), key=len):
        red.add(r)
    return red.rank


def rank_of_matrix(m: Sequence[Sequence[int | Fraction]]) -> int:
    """Exact rank of a rectangular matrix of rationals."""
    rows = [list(r) for r in m]
    if rows and len({len(r) for r in rows}) != 1:
        raise ExactCoreError("matrix is not rectangular")
    return sparse_rank({j: Fraction(c) for j, c in enumerate(r) if c != 0} for r in rows)


def nullspace(rows: Iterable[Mapping[int, int | Fraction]], ncols: int) -> list[dict[int, Fraction]]:
    """Basis of {x : r.x = 0 for every row r} in Q^ncols (columns 0..ncols-1)."""
    red = RowReducer(reduced=True)
    for r in sorted((dict(r) for r in rows), key=len):
        red.add(r)
    pivots = red.rows
    free = [j for j in range(ncols) if j not in pivots]
    col_rows: dict[int, list[int]] = {}
    for p, r in pivots.items():
        for k in r:
            if k != p:
                col_rows.setdefault(k, []).append(p)
    basis = []
    for f in free:
        x = {f: Fraction(1)}
        for p in col_rows.get(f, ()):
            r = pivots[p]
            x[p] = Fraction(-r[f], r[p])
        basis.append(x)
    return basis


# ---------------------------------------------------------------------------
# text format


def _fmt_scalar(c) -> str:
    c = Fraction(_py(c))
    return f"{c.numerator}/{c.denominator}"


def format_tensor(t: SparseTensor, header: str | None = None) -> str:
    lines = [header or f"tensor genus={t.genus} degree={t.degree}"]
    for word, c in t.items():
        lines.append(" ".join([_fmt_scalar(c)] + [letter_name(x) for x in word]))
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^(tensor|derivation)\s+(.*)$")


def _parse_fields(text: str) -> dict[str, int]:
    out = {}
    for tok in text.split():
        if "=" not in tok:
            raise ExactCoreError(f"bad header field {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = int(v)
    return out


def parse_tensors(text: str) -> list[tuple[str, dict[str, int], SparseTensor]]:
    """Parse one or more tensor blocks; returns (kind, header fields, tensor)."""
    blocks: list[tuple[str, dict[str, int], list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER_RE.match(line)
        if m:
            blocks.append((m.group(1), _parse_fields(m.group(2)), []))
        elif not blocks:
            raise ExactCoreError(f"line {lineno}: entry before header")
        else:
            blocks[-1][2].append(line)
    out = []
    for kind, fields, lines in blocks:
        if "genus" not in fields or "degree" not in fields:
            raise ExactCoreError(f"{kind} header needs genus= and degree=")
        g = fields["genus"]
        n = fields["degree"] + (2 if kind == "derivation" else 0)
        terms = {}
        for line in lines:
            parts = line.replace("−", "-").split()
            try:
                c = Fraction(parts[0])
            except (ValueError, ZeroDivisionError) as exc:
                raise ExactCoreError(f"bad coefficient in {line!r}") from exc
            word = tuple(parse_letter(p) for p in parts[1:])
            if len(word) != n:
                raise ExactCoreError(f"entry {line!r} has {len(word)} letters, expected {n}")
            if any(x >= 2 * g for x in word):
                raise ExactCoreError(f"entry {line!r} exceeds genus {g}")
            if word in terms:
                raise ExactCoreError(f"duplicate entry {line!r}")
            if c == 0:
                raise ExactCoreError(f"zero coefficient stored in {line!r}")
            terms[word] = c
        out.append((kind, fields, SparseTensor.from_terms(g, n, terms)))
    return out


def parse_tensor(text: str) -> SparseTensor:
    blocks = parse_tensors(text)
    if len(blocks) != 1:
        raise ExactCoreError(f"expected one tensor, found {len(blocks)}")
    return blocks[0][2]
