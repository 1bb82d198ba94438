"""Time the hot kernels under both backends on realistic inputs.

    python benchmarks/bench_kernels.py [--genus 6] [--repeat 5] [--json out.json]

Inputs are real basis elements of m(2) and m(3); every kernel result is
compared across backends before timings are reported.
"""

from __future__ import annotations

import argparse
import json
import platform
import statistics
import time

import numpy as np

from johnson_h2 import kernels as K
from johnson_h2.derivations import Derivation, derivation_bracket
from johnson_h2.exact import MU_TABLE
from johnson_h2.johnson import JohnsonAlgebra


def _workloads(genus: int):
    alg = JohnsonAlgebra(genus)
    m1, m2, m3 = alg.m(1), alg.m(2), alg.m(3)
    lam1 = max(m1.dominant_rows)
    x = Derivation(m1.weight_slice(lam1)[0])
    ys = [Derivation(r) for w in sorted(m3.dominant_rows)[:6] for r in m3.dominant_rows[w][:4]]
    zs = [r for w in sorted(m2.dominant_rows)[:6] for r in m2.dominant_rows[w][:4]]
    big = ys[0].tensor.tensor(zs[0])
    for z in zs[1:4]:
        big = big + ys[1].tensor.tensor(z)
    starts, lens, tk, tc = x.table()

    def substitute():
        return [K.substitute(y.tensor.keys, y.tensor.coefs, y.tensor.degree, 1, starts, lens, tk, tc, 2)
                for y in ys]

    def bracket():
        return [derivation_bracket(x, y).tensor for y in ys]

    def contract():
        return K.contract(big.keys, big.coefs, big.degree, [(0, 1), (3, 5)], MU_TABLE)

    def antisymmetrize():
        return K.antisymmetrize(big.keys, big.coefs, big.degree, [[0, 1, 2], [3, 4, 5, 6], [7, 8]])

    def insert_contract():
        return K.insert_contract(big.keys, big.coefs, big.degree, 5, 4, MU_TABLE)

    def letter_map():
        cm = np.arange(32, dtype=np.int64)[::-1].copy()
        sm = np.where(np.arange(32) % 2 == 0, 1, -1).astype(np.int64)
        return K.letter_map(big.keys, big.coefs, big.degree, cm, sm)

    return {"substitute": substitute, "derivation_bracket": bracket, "contract": contract,
            "antisymmetrize": antisymmetrize, "insert_contract": insert_contract,
            "letter_map": letter_map}, big.nnz


def _canon(out):
    if isinstance(out, list):
        return [_canon(o) for o in out]
    if isinstance(out, tuple):
        k, c = K.combine(out[0], out[1])
        return k.tolist(), [int(x) for x in c]
    return out.keys.tolist(), [int(x) for x in out.coefs]


def run(genus: int, repeat: int) -> dict:
    works, nnz = _workloads(genus)
    results = {}
    for name, fn in works.items():
        row = {}
        ref = None
        for backend in ("numba", "numpy"):
            if backend == "numba" and not K.HAVE_NUMBA:
                continue
            K.set_backend(backend)
            out = fn()  # warm-up, also triggers jit compilation
            canon = _canon(out)
            if ref is None:
                ref = canon
            elif canon != ref:
                raise AssertionError(f"{name}: backends disagree")
            times = []
            for _ in range(repeat):
                t0 = time.perf_counter()
                fn()
                times.append(time.perf_counter() - t0)
            row[backend] = statistics.median(times)
        if "numba" in row:
            row["speedup"] = row["numpy"] / row["numba"] if row["numba"] else float("inf")
        results[name] = row
    K.set_backend("numba" if K.HAVE_NUMBA else "numpy")
    return {"genus": genus, "repeat": repeat, "tensor_nnz": nnz, "python": platform.python_version(),
            "numpy": np.__version__, "kernels": results}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--genus", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args()
    res = run(args.genus, args.repeat)
    print(f"genus {res['genus']}, product tensor nnz {res['tensor_nnz']}, median of {res['repeat']} runs")
    print(f"{'kernel':<20}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, row in res["kernels"].items():
        nb = row.get("numba")
        print(f"{name:<20}{(nb * 1e3 if nb else float('nan')):>12.2f}{row['numpy'] * 1e3:>12.2f}"
              f"{row.get('speedup', float('nan')):>10.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(res, fh, indent=2)


if __name__ == "__main__":
    main()
