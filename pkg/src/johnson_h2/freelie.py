"""The free Lie algebra L(H) on a_1, b_1, ..., a_g, b_g.

Basis: a Hall set.  Letters are Hall; [u, v] is Hall when u, v are Hall,
u < v, and v = [x, y] implies x <= u.  The order compares degree first, then
letter code for letters and the pair (left, right) recursively for brackets.
Brackets of Hall words are put back into normal form with the Jacobi rewrite
[u,[x,y]] = [[u,x],y] + [x,[u,y]].
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .exact import ExactCoreError, SparseTensor, letter_name, parse_letter


class FreeLieError(ExactCoreError):
    pass


class HallWord:
    """A bracket tree over letter codes, compared by (degree, structure)."""

    __slots__ = ("left", "right", "letter", "degree", "_key", "_hash")

    def __init__(self, letter: int | None = None, left: "HallWord | None" = None,
                 right: "HallWord | None" = None):
        if letter is not None:
            self.letter = int(letter)
            self.left = self.right = None
            self.degree = 1
            self._key = (1, self.letter)
        else:
            if left is None or right is None:
                raise FreeLieError("a bracket needs two children")
            self.letter = None
            self.left, self.right = left, right
            self.degree = left.degree + right.degree
            self._key = (self.degree, left._key, right._key)
        self._hash = hash(self._key)

    @classmethod
    def of(cls, code: int) -> "HallWord":
        return cls(letter=code)

    @property
    def is_letter(self) -> bool:
        return self.letter is not None

    def __eq__(self, other) -> bool:
        return isinstance(other, HallWord) and self._key == other._key

    def __lt__(self, other: "HallWord") -> bool:
        return self._key < other._key

    def __le__(self, other: "HallWord") -> bool:
        return self._key <= other._key

    def __gt__(self, other: "HallWord") -> bool:
        return self._key > other._key

    def __ge__(self, other: "HallWord") -> bool:
        return self._key >= other._key

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        if self.is_letter:
            return letter_name(self.letter)
        return f"[{self.left},{self.right}]"

    def __repr__(self) -> str:
        return f"HallWord({self})"

    def is_hall(self) -> bool:
        """Membership in the Hall set."""
        if self.is_letter:
            return True
        u, v = self.left, self.right
        if not (u.is_hall() and v.is_hall() and u < v):
            return False
        return v.is_letter or v.left <= u

    def letters(self) -> list[int]:
        if self.is_letter:
            return [self.letter]
        return self.left.letters() + self.right.letters()

    @classmethod
    def parse(cls, text: str) -> "HallWord":
        """Parse nested brackets such as ``[[a1,a2],b3]`` (not checked for Hall-ness)."""
        s = text.replace(" ", "")
        pos = 0

        def walk() -> HallWord:
            nonlocal pos
            if pos < len(s) and s[pos] == "[":
                pos += 1
                u = walk()
                if pos >= len(s) or s[pos] != ",":
                    raise FreeLieError(f"expected ',' at {pos} in {text!r}")
                pos += 1
                v = walk()
                if pos >= len(s) or s[pos] != "]":
                    raise FreeLieError(f"expected ']' at {pos} in {text!r}")
                pos += 1
                return cls(left=u, right=v)
            end = pos
            while end < len(s) and s[end] not in ",]":
                end += 1
            tok = s[pos:end]
            pos = end
            return cls(letter=parse_letter(tok))

        w = walk()
        if pos != len(s):
            raise FreeLieError(f"trailing text in {text!r}")
        return w


class LieElement:
    """Finite combination of Hall words of one degree."""

    __slots__ = ("genus", "degree", "terms")

    def __init__(self, genus: int, degree: int, terms: Mapping[HallWord, Fraction] | None = None):
        self.genus = genus
        self.degree = degree
        self.terms: dict[HallWord, Fraction] = {}
        for w, c in (terms or {}).items():
            if w.degree != degree:
                raise FreeLieError(f"word {w} has degree {w.degree}, expected {degree}")
            if any(x >= 2 * genus for x in w.letters()):
                raise FreeLieError(f"word {w} uses a letter outside genus {genus}")
            c = Fraction(c)
            if c:
                self.terms[w] = c

    @classmethod
    def letter(cls, genus: int, code: int) -> "LieElement":
        return cls(genus, 1, {HallWord.of(code): 1})

    @classmethod
    def word(cls, genus: int, w: HallWord) -> "LieElement":
        """The element a (possibly non-Hall) bracket tree represents."""
        if w.is_letter:
            return cls.letter(genus, w.letter)
        return lie_bracket(cls.word(genus, w.left), cls.word(genus, w.right))

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "LieElement") -> None:
        if self.genus != other.genus:
            raise FreeLieError("genus mismatch")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        if self.degree != other.degree and self.terms and other.terms:
            raise FreeLieError("degree mismatch")
        deg = self.degree if self.terms else other.degree
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return LieElement(self.genus, deg, out)

    def __neg__(self) -> "LieElement":
        return LieElement(self.genus, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def scale(self, c) -> "LieElement":
        return LieElement(self.genus, self.degree, {w: c * x for w, x in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, LieElement) and self.genus == other.genus
                and (self.degree == other.degree or not self.terms)
                and self.terms == other.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{w}" for w, c in sorted(self.terms.items()))

    def __repr__(self) -> str:
        return f"LieElement(g={self.genus}, k={self.degree}, {self})"


@lru_cache(maxsize=None)
def _bracket_words(u: HallWord, v: HallWord) -> tuple[tuple[HallWord, Fraction], ...]:
    """[u, v] for Hall words u, v, as a normal-form combination."""
    if u == v:
        return ()
    if u > v:
        return tuple((w, -c) for w, c in _bracket_words(v, u))
    if v.is_letter or v.left <= u:
        return ((HallWord(left=u, right=v), Fraction(1)),)
    x, y = v.left, v.right
    acc: dict[HallWord, Fraction] = {}
    # [u,[x,y]] = [[u,x],y] + [x,[u,y]]
    for w, c in _bracket_words(u, x):
        for z, d in _bracket_words(w, y):
            acc[z] = acc.get(z, 0) + c * d
    for w, c in _bracket_words(u, y):
        for z, d in _bracket_words(x, w):
            acc[z] = acc.get(z, 0) + c * d
    return tuple((w, c) for w, c in sorted(acc.items()) if c)


def lie_bracket(x: LieElement, y: LieElement) -> LieElement:
    x._check(y)
    out: dict[HallWord, Fraction] = {}
    for u, a in x.terms.items():
        for v, b in y.terms.items():
            for w, c in _bracket_words(u, v):
                out[w] = out.get(w, 0) + a * b * c
    return LieElement(x.genus, x.degree + y.degree, out)


def hall_basis(k: int, genus: int) -> list[HallWord]:
    if k < 1:
        raise FreeLieError("degree must be >= 1")
    if genus < 1:
        raise FreeLieError("invalid genus")
    return list(_hall_levels(genus, k)[k])


@lru_cache(maxsize=16)
def _hall_levels(genus: int, k: int) -> dict[int, tuple[HallWord, ...]]:
    levels: dict[int, tuple[HallWord, ...]] = {1: tuple(HallWord.of(c) for c in range(2 * genus))}
    for n in range(2, k + 1):
        words = []
        for p in range(1, n):
            for u in levels[p]:
                for v in levels[n - p]:
                    if u < v and (v.is_letter or v.left <= u):
                        words.append(HallWord(left=u, right=v))
        levels[n] = tuple(sorted(words))
    return levels


def witt_dimension(k: int, n_generators: int) -> int:
    """dim L_k on n generators: (1/k) sum_{d | k} moebius(d) n^(k/d)."""
    total = sum(_moebius(d) * n_generators ** (k // d) for d in range(1, k + 1) if k % d == 0)
    return total // k


def _moebius(n: int) -> int:
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


_EXPAND_CACHE: dict[tuple[int, HallWord], SparseTensor] = {}


def expand_word(genus: int, w: HallWord) -> SparseTensor:
    key = (genus, w)
    t = _EXPAND_CACHE.get(key)
    if t is None:
        if w.is_letter:
            t = SparseTensor.letter(genus, w.letter)
        else:
            a, b = expand_word(genus, w.left), expand_word(genus, w.right)
            t = a.tensor(b) - b.tensor(a)
        _EXPAND_CACHE[key] = t
    return t


def expand_to_tensor(x: LieElement) -> SparseTensor:
    acc = SparseTensor(x.genus, x.degree)
    for w, c in x.terms.items():
        acc = acc + expand_word(x.genus, w).scale(c)
    return acc


def random_lie_element(genus: int, degree: int, rng, terms: int = 3) -> LieElement:
    """A few random Hall words with small integer coefficients."""
    basis = hall_basis(degree, genus)
    out = {}
    for _ in range(terms):
        out[basis[rng.randrange(len(basis))]] = rng.randint(-3, 3)
    return LieElement(genus, degree, out)


def nested(genus: int, codes: Iterable[int], right: bool = True) -> LieElement:
    """Right-nested [x1,[x2,[...]]] (or left-nested) bracket of letters."""
    els = [LieElement.letter(genus, c) for c in codes]
    if right:
        acc = els[-1]
        for e in reversed(els[:-1]):
            acc = lie_bracket(e, acc)
    else:
        acc = els[0]
        for e in els[1:]:
            acc = lie_bracket(acc, e)
    return acc
