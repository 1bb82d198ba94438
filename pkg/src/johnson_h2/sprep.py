"""Sp(2g, Q) bookkeeping: Young diagrams, weights, raising operators,
highest-weight multiplicities and detectors.

Weights are integer g-tuples in the epsilon basis; a_i has weight +e_i and
b_i has weight -e_i.  The simple raising operators are

    e_i (i < g):  a_{i+1} -> a_i,  b_i -> -b_{i+1}
    e_g:          b_g -> a_g

acting on tensors slot by slot.  The multiplicity of the irreducible with
highest weight lambda in an invariant subspace M is the dimension of the
joint kernel of the e_i on the weight-lambda slice of M.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels as K
from .exact import (
    EchelonBasis,
    ExactCoreError,
    SparseTensor,
    apply_letter_map,
    multi_contraction,
    nullspace,
    wedge_projection,
)

Weight = tuple[int, ...]


class RepresentationError(ExactCoreError):
    pass


class InconsistentDecomposition(RepresentationError):
    """Raised when multiplicities do not add up to the module dimension."""


# ---------------------------------------------------------------------------
# Young diagrams


@dataclass(frozen=True, order=True)
class YoungDiagram:
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows if r != 0)
        if any(r < 0 for r in rows) or list(rows) != sorted(rows, reverse=True):
            raise RepresentationError(f"rows {self.rows} are not a partition")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def weight(self, genus: int) -> Weight:
        if len(self.rows) > genus:
            raise RepresentationError(f"{self} has more than {genus} rows")
        return self.rows + (0,) * (genus - len(self.rows))

    def __str__(self) -> str:
        if not self.rows:
            return "[0]"
        out = []
        for part, grp in itertools.groupby(self.rows):
            n = len(list(grp))
            if part > 9 or n > 9:
                raise RepresentationError(f"{self.rows} has no bracket notation")
            out.append(f"{part}^{n}" if n > 1 else f"{part}")
        return "[" + "".join(out) + "]"

    @classmethod
    def parse(cls, text: str) -> "YoungDiagram":
        s = text.strip()
        if not (s.startswith("[") and s.endswith("]")):
            raise RepresentationError(f"cannot parse Young diagram {text!r}")
        body = s[1:-1]
        if body == "0":
            return cls(())
        # exponents are single digits, so "[2^21^3]" reads as 2,2,1,1,1
        if not re.fullmatch(r"(\d(\^[1-9])?)+", body):
            raise RepresentationError(f"cannot parse Young diagram {text!r}")
        rows = []
        for part, mult in re.findall(r"(\d)(?:\^(\d))?", body):
            rows.extend([int(part)] * (int(mult) if mult else 1))
        if 0 in rows:
            raise RepresentationError(f"zero row in {text!r}")
        return cls(tuple(rows))

    @classmethod
    def from_weight(cls, w: Sequence[int]) -> "YoungDiagram":
        return cls(tuple(w))


def parse_multiset(text: str) -> Counter:
    """'[42][31^3] 2[31]' -> Counter of YoungDiagram."""
    out: Counter = Counter()
    for mult, body in re.findall(r"(\d*)(\[[^\]]*\])", text):
        out[YoungDiagram.parse(body)] += int(mult) if mult else 1
    return out


def format_multiset(ms: Counter) -> str:
    items = sorted(((d, m) for d, m in ms.items() if m), key=lambda dm: (-dm[0].size, _rev(dm[0])))
    return " ".join((f"{m}" if m > 1 else "") + str(d) for d, m in items)


def _rev(d: YoungDiagram):
    return tuple(-r for r in d.rows)


def weyl_dimension(lam: YoungDiagram, genus: int) -> int:
    """Dimension of the irreducible Sp(2g) module with highest weight lambda."""
    if len(lam.rows) > genus:
        return 0
    l = lam.weight(genus)
    rho = [genus - i for i in range(genus)]
    L = [l[i] + rho[i] for i in range(genus)]
    num = 1
    den = 1
    for i in range(genus):
        num *= L[i]
        den *= rho[i]
        for j in range(i + 1, genus):
            num *= (L[i] - L[j]) * (L[i] + L[j])
            den *= (rho[i] - rho[j]) * (rho[i] + rho[j])
    assert num % den == 0
    return num // den


def candidate_diagrams(degree: int, genus: int) -> list[YoungDiagram]:
    """Diagrams that can occur in a submodule of H^{(x) degree}."""
    out = []
    for size in range(degree % 2, degree + 1, 2):
        for p in partitions(size, max_len=genus):
            out.append(YoungDiagram(p))
    return sorted(out, key=lambda d: (-d.size, _rev(d)))


def partitions(n: int, max_len: int, max_part: int | None = None) -> Iterable[tuple[int, ...]]:
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, max_len - 1, first):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# weights and the Weyl group


def dominant(w: Sequence[int]) -> Weight:
    return tuple(sorted((abs(x) for x in w), reverse=True))


def dominant_weights(degree: int, genus: int) -> list[Weight]:
    """Dominant weights of H^{(x) degree}: |w|_1 <= degree with matching parity."""
    return [d.weight(genus) for d in candidate_diagrams(degree, genus)]


def orbit(d: Sequence[int]) -> list[Weight]:
    """All signed permutations of a weight."""
    vals = tuple(d)
    perms = set(itertools.permutations(vals))
    out = set()
    for p in perms:
        nz = [i for i, x in enumerate(p) if x]
        for signs in itertools.product((1, -1), repeat=len(nz)):
            q = list(p)
            for i, s in zip(nz, signs):
                q[i] *= s
            out.add(tuple(q))
    return sorted(out, reverse=True)


def orbit_size(d: Sequence[int]) -> int:
    counts = Counter(abs(x) for x in d)
    size = math.factorial(len(d))
    for c in counts.values():
        size //= math.factorial(c)
    return size * 2 ** sum(1 for x in d if x)


def weyl_letter_map(nu: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic signed permutation of letters carrying dominant(nu) to nu.

    Slot j of the dominant weight goes to index p(j) of nu; when nu_{p(j)} < 0
    the pair is flipped as a_j -> b_p, b_j -> -a_p, which preserves mu.
    """
    g = len(nu)
    idx = sorted(range(g), key=lambda i: (-abs(nu[i]), i))
    code_map = np.arange(32, dtype=np.int64)
    sign_map = np.ones(32, dtype=np.int64)
    for j, p in enumerate(idx):
        if nu[p] < 0:
            code_map[2 * j] = 2 * p + 1
            code_map[2 * j + 1] = 2 * p
            sign_map[2 * j + 1] = -1
        else:
            code_map[2 * j] = 2 * p
            code_map[2 * j + 1] = 2 * p + 1
    return code_map, sign_map


def transport(t: SparseTensor, nu: Sequence[int]) -> SparseTensor:
    """Carry a tensor of weight dominant(nu) to weight nu."""
    cm, sm = weyl_letter_map(nu)
    return apply_letter_map(t, cm, sm)


def simple_root(r: int, genus: int) -> Weight:
    """alpha_r for r = 1..g."""
    a = [0] * genus
    if r < genus:
        a[r - 1] = 1
        a[r] = -1
    else:
        a[genus - 1] = 2
    return tuple(a)


def add_weights(u: Sequence[int], v: Sequence[int]) -> Weight:
    return tuple(x + y for x, y in zip(u, v))


def sub_weights(u: Sequence[int], v: Sequence[int]) -> Weight:
    return tuple(x - y for x, y in zip(u, v))


# ---------------------------------------------------------------------------
# raising operators


class RaisingOperator:
    """The simple root vector e_r acting on tensors by the Leibniz rule."""

    def __init__(self, r: int, genus: int):
        if not 1 <= r <= genus:
            raise RepresentationError(f"no simple root {r} for genus {genus}")
        self.r = r
        self.genus = genus
        self.root = simple_root(r, genus)
        starts = np.zeros(32, np.int64)
        lens = np.zeros(32, np.int64)
        tk, tc = [], []
        if r < genus:
            images = {2 * r: (2 * (r - 1), 1), 2 * (r - 1) + 1: (2 * r + 1, -1)}
        else:
            images = {2 * (genus - 1) + 1: (2 * (genus - 1), 1)}
        for pos, (src, (dst, sgn)) in enumerate(sorted(images.items())):
            starts[src] = pos
            lens[src] = 1
            tk.append(dst)
            tc.append(sgn)
        self._table = (starts, lens, np.array(tk, np.int64), np.array(tc, np.int64))

    def __call__(self, t: SparseTensor) -> SparseTensor:
        starts, lens, tk, tc = self._table
        keys, coefs = K.substitute(t.keys, t.coefs, t.degree, 0, starts, lens, tk, tc, 1)
        return SparseTensor(t.genus, t.degree, keys, coefs)

    def __repr__(self) -> str:
        return f"e_{self.r}"


def raising_operators(genus: int) -> list[RaisingOperator]:
    return [RaisingOperator(r, genus) for r in range(1, genus + 1)]


# ---------------------------------------------------------------------------
# highest weight vectors


def weight_slice_of_basis(rows: Sequence[SparseTensor], weight: Sequence[int]) -> list[SparseTensor]:
    """Basis of M_weight for an Sp-invariant M spanned by ``rows``."""
    if not rows:
        return []
    eb = EchelonBasis(rows[0].genus, rows[0].degree)
    for r in rows:
        part = r.weight_part(weight)
        if part:
            eb.add(part)
    return eb.rows


def highest_weight_vectors(slice_rows: Sequence[SparseTensor]) -> list[SparseTensor]:
    """Joint kernel of the raising operators on span(slice_rows)."""
    if not slice_rows:
        return []
    g = slice_rows[0].genus
    ops = raising_operators(g)
    constraints: dict[tuple[int, int], dict[int, int]] = {}
    for j, v in enumerate(slice_rows):
        for op in ops:
            img = op(v)
            for key, c in zip(img.keys.tolist(), img.coefs):
                constraints.setdefault((op.r, key), {})[j] = c
    kernel = nullspace(constraints.values(), len(slice_rows))
    out = []
    for x in kernel:
        acc = None
        for j, c in x.items():
            term = slice_rows[j].scale(c)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def multiplicity_in_slice(slice_rows: Sequence[SparseTensor]) -> int:
    return len(highest_weight_vectors(slice_rows))


def multiplicity(module, lam: YoungDiagram) -> int:
    """Multiplicity of lambda in an invariant module.

    ``module`` is either an object with ``weight_slice(weight)`` (graded
    bases) or an :class:`EchelonBasis`.
    """
    if isinstance(module, EchelonBasis):
        g = module.genus
        if len(lam) > g:
            return 0
        rows = weight_slice_of_basis(module.rows, lam.weight(g))
    else:
        g = module.genus
        if len(lam) > g:
            return 0
        rows = module.weight_slice(lam.weight(g))
    return multiplicity_in_slice(rows)


def module_dimension_by_weights(slice_dim: Callable[[Weight], int], degree: int, genus: int) -> int:
    return sum(orbit_size(w) * slice_dim(w) for w in dominant_weights(degree, genus))


def decompose(module, degree: int | None = None) -> Counter:
    """Irreducible decomposition with the dimension-sum postcondition enforced."""
    if isinstance(module, EchelonBasis):
        g = module.genus
        degree = module.degree if degree is None else degree
        rows = module.rows
        total_dim = module.rank
        slicer = lambda w: weight_slice_of_basis(rows, w)  # noqa: E731
    else:
        g = module.genus
        degree = module.tensor_degree if degree is None else degree
        slicer = module.weight_slice
        total_dim = module.dimension()
    out: Counter = Counter()
    if total_dim == 0:
        return out
    for lam in candidate_diagrams(degree, g):
        m = multiplicity_in_slice(slicer(lam.weight(g)))
        if m:
            out[lam] = m
    check = sum(m * weyl_dimension(lam, g) for lam, m in out.items())
    if check != total_dim:
        raise InconsistentDecomposition(
            f"multiplicities give dimension {check}, module has dimension {total_dim}")
    return out


# ---------------------------------------------------------------------------
# detectors


@dataclass(frozen=True)
class Detector:
    """Selector, then multiple contraction, then wedge projection.

    ``selector`` names a summand of a chain space by its degree tuple, e.g.
    (1, 3) for m(1) (x) m(3) or (2, 2) for wedge^2 m(2).  Pairs and blocks use
    1-based slots of that summand's tensor degree.
    """

    selector: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    blocks: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        used = [p for pr in self.pairs for p in pr]
        if len(set(used)) != len(used):
            raise RepresentationError(f"overlapping contraction pairs {self.pairs}")
        n = sum(k + 2 for k in self.selector)
        remaining = n - 2 * len(self.pairs)
        flat = sorted(p for b in self.blocks for p in b)
        if flat != list(range(1, remaining + 1)):
            raise RepresentationError(
                f"blocks {self.blocks} do not partition the {remaining} slots left after contraction")
        if any(not 1 <= p <= n for p in used):
            raise RepresentationError(f"contraction slot outside 1..{n}")

    def describe(self) -> str:
        if self.name:
            return self.name
        p = "".join("(" + "".join(map(str, b)) + ")" for b in self.blocks)
        m = "".join(f"({i}{j})" for i, j in self.pairs)
        return f"p_{p} o mu_{m} o Phi{list(self.selector)}"

    def apply_tensor(self, t: SparseTensor) -> SparseTensor:
        return wedge_projection(self.blocks, multi_contraction(self.pairs, t))


def apply_detector(d: Detector, v) -> SparseTensor:
    """Select the summand of a degree-2 chain vector and run the detector."""
    comp = v.component(d.selector)
    if comp is None:
        n = sum(k + 2 for k in d.selector) - 2 * len(d.pairs)
        return SparseTensor(v.genus, n)
    return d.apply_tensor(comp)


def detector_readout(d: Detector, v, lam: Sequence[int]) -> dict[int, Fraction]:
    """Weight-lambda coefficients of the detector image, keyed by packed key."""
    out = apply_detector(d, v).weight_part(lam)
    return {int(k): Fraction(int(c) if not isinstance(c, Fraction) else c)
            for k, c in zip(out.keys, out.coefs)}
