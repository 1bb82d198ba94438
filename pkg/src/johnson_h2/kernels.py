"""Hot loops over packed tensor keys.

A tensor monomial x_1 (x) ... (x) x_n is packed into one int64: each letter
code (0..31) takes 5 bits and the first slot is most significant, so integer
order on keys of a fixed degree is lexicographic order on letter tuples.

Every kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
version.  ``JOHNSON_H2_BACKEND=numpy`` forces the numpy path; otherwise numba
is used when it imports.  Kernels only ever see int64 coefficients; callers
route object-dtype (big integer / rational) data through the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

BITS = 5
MASK = (1 << BITS) - 1
MAX_DEGREE = 12
# Products of two coefficients below this bound, summed a few thousand times,
# stay inside int64.
SAFE_FACTOR = 1 << 25

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _select_backend() -> str:
    want = os.environ.get("JOHNSON_H2_BACKEND", "").strip().lower()
    if want == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


BACKEND = _select_backend()


def set_backend(name: str) -> None:
    """Switch kernels at runtime (used by the benchmark and tests)."""
    global BACKEND
    if name not in ("numpy", "numba"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    BACKEND = name


# ---------------------------------------------------------------------------
# helpers shared by both paths


def letters_of(keys: np.ndarray, n: int) -> np.ndarray:
    """(N, n) array of letter codes."""
    shifts = BITS * np.arange(n - 1, -1, -1, dtype=np.int64)
    return (keys[:, None] >> shifts[None, :]) & MASK


def pack(letters: np.ndarray) -> np.ndarray:
    n = letters.shape[1]
    shifts = BITS * np.arange(n - 1, -1, -1, dtype=np.int64)
    if n == 0:
        return np.zeros(letters.shape[0], dtype=np.int64)
    return np.bitwise_or.reduce(letters.astype(np.int64) << shifts[None, :], axis=1)


def combine(keys: np.ndarray, coefs: np.ndarray):
    """Sort keys, add coefficients of equal keys, drop zeros."""
    if keys.size == 0:
        return keys.astype(np.int64), coefs
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    c = coefs[order]
    starts = np.flatnonzero(np.concatenate(([True], k[1:] != k[:-1])))
    k = k[starts]
    c = np.add.reduceat(c, starts)
    nz = c != 0
    return k[nz], c[nz]


def fits_int64(coefs: np.ndarray) -> bool:
    if coefs.dtype != object:
        return True
    for x in coefs:
        if type(x) is not int or not -(1 << 62) < x < (1 << 62):
            return False
    return True


def small(coefs: np.ndarray) -> bool:
    if coefs.size == 0:
        return True
    if coefs.dtype == object:
        return False
    return int(np.abs(coefs).max()) < SAFE_FACTOR


# ---------------------------------------------------------------------------
# numpy implementations


def _substitute_np(keys, coefs, n, lo, tstart, tlen, tkeys, tcoefs, m):
    out_k = []
    out_c = []
    for s in range(lo, n):
        sh = BITS * (n - 1 - s)
        let = (keys >> sh) & MASK
        cnt = tlen[let]
        total = int(cnt.sum())
        if total == 0:
            continue
        rep = np.repeat(np.arange(keys.size), cnt)
        first = np.cumsum(cnt) - cnt
        within = np.arange(total) - np.repeat(first, cnt)
        tidx = tstart[let][rep] + within
        k = keys[rep]
        prefix = k >> (sh + BITS)
        suffix = k & ((1 << sh) - 1)
        out_k.append((((prefix << (BITS * m)) | tkeys[tidx]) << sh) | suffix)
        out_c.append(coefs[rep] * tcoefs[tidx])
    if not out_k:
        return np.zeros(0, np.int64), np.zeros(0, coefs.dtype)
    return np.concatenate(out_k), np.concatenate(out_c)


def _letter_map_np(keys, coefs, n, code_map, sign_map):
    let = letters_of(keys, n)
    sign = np.prod(sign_map[let], axis=1)
    return pack(code_map[let]), coefs * sign


def _contract_np(keys, coefs, n, pairs, mu_table):
    let = letters_of(keys, n)
    factor = np.ones(keys.size, dtype=np.int64)
    used = set()
    for i, j in pairs:
        factor = factor * mu_table[let[:, i], let[:, j]]
        used.update((i, j))
    keep = [s for s in range(n) if s not in used]
    nz = factor != 0
    return pack(let[nz][:, keep]), coefs[nz] * factor[nz]


def _antisym_np(keys, coefs, n, blocks):
    let = letters_of(keys, n)
    sign = np.ones(keys.size, dtype=np.int64)
    cols = []
    for block in blocks:
        sub = let[:, block]
        if len(block) > 1:
            inv = np.zeros(keys.size, dtype=np.int64)
            for a in range(len(block)):
                for b in range(a + 1, len(block)):
                    inv += sub[:, a] > sub[:, b]
            sub = np.sort(sub, axis=1)
            dup = np.any(sub[:, 1:] == sub[:, :-1], axis=1)
            sign = np.where(dup, 0, np.where(inv % 2 == 1, -sign, sign))
        cols.append(sub)
    out = np.concatenate(cols, axis=1)
    nz = sign != 0
    return pack(out[nz]), coefs[nz] * sign[nz]


def _insert_contract_np(keys, coefs, n, n1, n2, mu_table):
    let = letters_of(keys, n)
    out_k, out_c = [], []
    xi = list(range(1, n1))
    tail = list(range(n1 + n2, n))
    for s in range(1, n2):
        f = mu_table[let[:, 0], let[:, n1 + s]]
        nz = f != 0
        if not nz.any():
            continue
        cols = list(range(n1, n1 + s)) + xi + list(range(n1 + s + 1, n1 + n2)) + tail
        out_k.append(pack(let[nz][:, cols]))
        out_c.append(coefs[nz] * f[nz])
    if not out_k:
        return np.zeros(0, np.int64), np.zeros(0, coefs.dtype)
    return np.concatenate(out_k), np.concatenate(out_c)


# ---------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True)
    def _substitute_nb(keys, coefs, n, lo, tstart, tlen, tkeys, tcoefs, m):
        total = 0
        for t in range(keys.shape[0]):
            k = keys[t]
            for s in range(lo, n):
                total += tlen[(k >> (5 * (n - 1 - s))) & 31]
        out_k = np.empty(total, np.int64)
        out_c = np.empty(total, np.int64)
        pos = 0
        for t in range(keys.shape[0]):
            k = keys[t]
            c = coefs[t]
            for s in range(lo, n):
                sh = 5 * (n - 1 - s)
                let = (k >> sh) & 31
                prefix = k >> (sh + 5)
                suffix = k & ((np.int64(1) << sh) - 1)
                for j in range(tstart[let], tstart[let] + tlen[let]):
                    out_k[pos] = (((prefix << (5 * m)) | tkeys[j]) << sh) | suffix
                    out_c[pos] = c * tcoefs[j]
                    pos += 1
        return out_k, out_c

    @njit(cache=True)
    def _letter_map_nb(keys, coefs, n, code_map, sign_map):
        out_k = np.empty_like(keys)
        out_c = np.empty_like(coefs)
        for t in range(keys.shape[0]):
            k = keys[t]
            nk = np.int64(0)
            sg = 1
            for s in range(n):
                let = (k >> (5 * (n - 1 - s))) & 31
                nk = (nk << 5) | code_map[let]
                sg *= sign_map[let]
            out_k[t] = nk
            out_c[t] = coefs[t] * sg
        return out_k, out_c

    @njit(cache=True)
    def _contract_nb(keys, coefs, n, pi, pj, keep, mu_table):
        out_k = np.empty_like(keys)
        out_c = np.empty_like(coefs)
        pos = 0
        for t in range(keys.shape[0]):
            k = keys[t]
            f = 1
            for p in range(pi.shape[0]):
                li = (k >> (5 * (n - 1 - pi[p]))) & 31
                lj = (k >> (5 * (n - 1 - pj[p]))) & 31
                f *= mu_table[li, lj]
                if f == 0:
                    break
            if f == 0:
                continue
            nk = np.int64(0)
            for q in range(keep.shape[0]):
                nk = (nk << 5) | ((k >> (5 * (n - 1 - keep[q]))) & 31)
            out_k[pos] = nk
            out_c[pos] = coefs[t] * f
            pos += 1
        return out_k[:pos], out_c[:pos]

    @njit(cache=True)
    def _antisym_nb(keys, coefs, n, order, bounds):
        out_k = np.empty_like(keys)
        out_c = np.empty_like(coefs)
        buf = np.empty(n, np.int64)
        pos = 0
        for t in range(keys.shape[0]):
            k = keys[t]
            for q in range(n):
                buf[q] = (k >> (5 * (n - 1 - order[q]))) & 31
            sg = 1
            for b in range(bounds.shape[0] - 1):
                lo = bounds[b]
                hi = bounds[b + 1]
                # insertion sort inside the block, tracking parity
                for x in range(lo + 1, hi):
                    y = x
                    while y > lo and buf[y - 1] > buf[y]:
                        tmp = buf[y - 1]
                        buf[y - 1] = buf[y]
                        buf[y] = tmp
                        sg = -sg
                        y -= 1
                for x in range(lo + 1, hi):
                    if buf[x] == buf[x - 1]:
                        sg = 0
                if sg == 0:
                    break
            if sg == 0:
                continue
            nk = np.int64(0)
            for q in range(n):
                nk = (nk << 5) | buf[q]
            out_k[pos] = nk
            out_c[pos] = coefs[t] * sg
            pos += 1
        return out_k[:pos], out_c[:pos]


    @njit(cache=True)
    def _insert_contract_nb(keys, coefs, n, n1, n2, mu_table):
        cap = keys.shape[0] * (n2 - 1)
        out_k = np.empty(cap, np.int64)
        out_c = np.empty(cap, np.int64)
        buf = np.empty(n, np.int64)
        pos = 0
        for t in range(keys.shape[0]):
            k = keys[t]
            for q in range(n):
                buf[q] = (k >> (5 * (n - 1 - q))) & 31
            for s in range(1, n2):
                f = mu_table[buf[0], buf[n1 + s]]
                if f == 0:
                    continue
                nk = np.int64(0)
                for q in range(n1, n1 + s):
                    nk = (nk << 5) | buf[q]
                for q in range(1, n1):
                    nk = (nk << 5) | buf[q]
                for q in range(n1 + s + 1, n):
                    nk = (nk << 5) | buf[q]
                out_k[pos] = nk
                out_c[pos] = coefs[t] * f
                pos += 1
        return out_k[:pos], out_c[:pos]


# ---------------------------------------------------------------------------
# dispatch


def _use_numba(*coef_arrays) -> bool:
    return BACKEND == "numba" and all(c.dtype == np.int64 for c in coef_arrays)


def substitute(keys, coefs, n, lo, tstart, tlen, tkeys, tcoefs, m):
    """Leibniz substitution: replace the letter in each slot ``s >= lo`` by the
    degree-``m`` tensor stored for it in the table, summing over slots.

    ``tstart[l]``/``tlen[l]`` index the rows of ``tkeys``/``tcoefs`` holding
    the image of letter ``l``.  Output keys have degree ``n - 1 + m`` and are
    not combined.
    """
    if n - 1 + m > MAX_DEGREE:
        raise ValueError("tensor degree exceeds packed-key capacity")
    if _use_numba(coefs, tcoefs) and small(coefs) and small(tcoefs):
        return _substitute_nb(keys, coefs, n, lo, tstart, tlen, tkeys, tcoefs, m)
    if coefs.dtype != object and not (small(coefs) and small(tcoefs)):
        coefs = coefs.astype(object)
    if tcoefs.dtype != object and coefs.dtype == object:
        tcoefs = tcoefs.astype(object)
    return _substitute_np(keys, coefs, n, lo, tstart, tlen, tkeys, tcoefs, m)


def letter_map(keys, coefs, n, code_map, sign_map):
    """Apply a letterwise signed permutation of the alphabet to every slot."""
    if _use_numba(coefs):
        return _letter_map_nb(keys, coefs, n, code_map, sign_map)
    return _letter_map_np(keys, coefs, n, code_map, sign_map)


def contract(keys, coefs, n, pairs, mu_table):
    """Multiply by mu over each 0-based slot pair and delete those slots."""
    used = sorted({p for pr in pairs for p in pr})
    keep = np.array([s for s in range(n) if s not in used], dtype=np.int64)
    if _use_numba(coefs):
        pi = np.array([p[0] for p in pairs], dtype=np.int64)
        pj = np.array([p[1] for p in pairs], dtype=np.int64)
        return _contract_nb(keys, coefs, n, pi, pj, keep, mu_table)
    return _contract_np(keys, coefs, n, pairs, mu_table)


def antisymmetrize(keys, coefs, n, blocks):
    """Reorder slots block by block, sorting each block with its sign."""
    if _use_numba(coefs):
        order = np.array([p for b in blocks for p in b], dtype=np.int64)
        bounds = np.cumsum([0] + [len(b) for b in blocks]).astype(np.int64)
        return _antisym_nb(keys, coefs, n, order, bounds)
    return _antisym_np(keys, coefs, n, [list(b) for b in blocks])


def outer(k1, c1, k2, c2, n2):
    """Tensor product of two term lists; ``n2`` is the degree of the right factor."""
    keys = ((k1[:, None] << (BITS * n2)) | k2[None, :]).ravel()
    if c1.dtype == object or c2.dtype == object or not (small(c1) and small(c2)):
        coefs = np.multiply.outer(c1.astype(object), c2.astype(object)).ravel()
    else:
        coefs = (c1[:, None] * c2[None, :]).ravel()
    return keys, coefs


def insert_contract(keys, coefs, n, n1, n2, mu_table):
    """Let the first block (a derivation tensor of degree ``n1``) act on the
    second block (degree ``n2``) through slots 1..n2-1 of that block.

    The first letter u of block one is paired by mu with a letter x of block
    two and the rest of block one is inserted in place of x.  Slots after the
    two blocks are carried along unchanged.  Output degree is ``n - 2``.
    """
    if _use_numba(coefs):
        return _insert_contract_nb(keys, coefs, n, n1, n2, mu_table)
    return _insert_contract_np(keys, coefs, n, n1, n2, mu_table)


def permute_slots(keys, n, perm):
    """Keys of the tensor whose slot ``i`` holds old slot ``perm[i]``."""
    return pack(letters_of(keys, n)[:, list(perm)])
