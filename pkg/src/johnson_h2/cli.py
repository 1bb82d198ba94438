"""Command-line driver.

Exit codes: 0 success, 1 a check failed (rank deficient, nonzero homology,
table mismatch), 2 usage error, 3 unreadable or malformed input (fixture,
tensor file), 4 refused (budget or stability bound), 5 detector soundness
failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cache import CACHE_ENV, BasisCache, default_cache_dir
from .exact import ExactCoreError, letter_name, unpack_key
from .fixtures import FixtureError, load_fixture
from .homology import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    SoundnessFailure,
    cycles,
    default_genus,
    h2_component,
    _guard,
)
from .johnson import TABLE1, JohnsonAlgebra, StabilityError, stable_genus, verify_table1
from .sprep import (
    InconsistentDecomposition,
    RepresentationError,
    YoungDiagram,
    candidate_diagrams,
    decompose,
    format_multiset,
    weyl_dimension,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_REFUSED, EXIT_UNSOUND = 0, 1, 2, 3, 4, 5

REPORT_SCHEMA = "johnson-h2/report/1"
CERTIFICATE_SCHEMA = "johnson-h2/certificate/1"

log = logging.getLogger("johnson_h2")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _frac(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def _genus(args, fallback: int | None = None) -> int:
    g = args.genus if args.genus is not None else fallback
    if g is None:
        raise UsageError("--genus is required")
    if g < 1:
        raise UsageError(f"invalid genus {g}: must be >= 1")
    if g > 16:
        raise UsageError(f"invalid genus {g}: at most 16 symplectic pairs are supported")
    return g


def _component(text: str) -> YoungDiagram:
    try:
        return YoungDiagram.parse(text)
    except RepresentationError as exc:
        raise UsageError(f"bad --component {text!r}: {exc}") from exc


def _algebra(args, genus: int) -> JohnsonAlgebra:
    alg = JohnsonAlgebra(genus)
    if not args.no_cache:
        alg.cache = BasisCache(args.cache_dir)
    return alg


def _config(args) -> dict:
    keys = ("genus", "degree", "weight", "component", "all", "budget_nnz", "jobs", "seed",
            "stability_bound", "fixture", "vectors")
    cfg = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    cfg["cache_dir"] = None if args.no_cache else str(args.cache_dir)
    return cfg


def _emit(args, command: str, status: str, result: dict, text_lines: list[str], started: float) -> None:
    report = {
        "schema": REPORT_SCHEMA,
        "command": command,
        "version": __version__,
        "config": _config(args),
        "status": status,
        "result": result,
    }
    if not args.no_timing:
        report["timing"] = {
            "wall_clock_seconds": round(time.perf_counter() - started, 3),
            "finished_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
    if args.format == "json":
        out = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        lines = list(text_lines)
        lines.append(f"status: {status}")
        if "timing" in report:
            lines.append(f"wall clock: {report['timing']['wall_clock_seconds']} s")
        out = "\n".join(lines) + "\n"
    if args.output:
        _write_atomic(Path(args.output), out)
    sys.stdout.write(out)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _multiset_json(ms) -> list:
    return [[str(d), m] for d, m in sorted(ms.items(), key=lambda dm: (-dm[0].size, tuple(-r for r in dm[0].rows)))]


# ---------------------------------------------------------------------------
# commands


def cmd_decompose(args) -> int:
    t0 = time.perf_counter()
    if args.degree is None or args.degree < 1:
        raise UsageError("--degree k >= 1 is required")
    g = _genus(args)
    k = args.degree
    bound = args.stability_bound if args.stability_bound is not None else stable_genus(k)
    if g < bound:
        raise StabilityError(f"genus {g} is below the stable range for m({k}); use genus >= {bound} "
                             f"or lower it with --stability-bound")
    alg = _algebra(args, g)
    gb = alg.m(k)
    ms = decompose(gb)
    dim = gb.dimension()
    wsum = sum(m * weyl_dimension(d, g) for d, m in ms.items())
    result = {"degree": k, "genus": g, "decomposition": _multiset_json(ms), "text": format_multiset(ms),
              "dimension": dim, "weyl_dimension_sum": wsum}
    lines = [format_multiset(ms), f"dim m_{{g,1}}({k}) at g={g}: {dim} (Weyl sum {wsum})"]
    _emit(args, "decompose", "pass" if dim == wsum else "fail", result, lines, t0)
    return EXIT_OK if dim == wsum else EXIT_FAIL


def cmd_verify_table1(args) -> int:
    t0 = time.perf_counter()
    g = _genus(args, 5)
    degrees = [args.degree] if args.degree is not None else [1, 2, 3]
    for k in degrees:
        if k not in TABLE1 or k > 4:
            raise UsageError(f"reference rows cover degrees 1..4, not {k}")
    alg = _algebra(args, g)
    rows, lines, ok = [], [], True
    for k in degrees:
        rep = verify_table1(k, g, alg, min_genus=args.stability_bound)
        ok &= rep.match
        rows.append({"degree": k, "match": rep.match, "computed": _multiset_json(rep.computed),
                     "expected": _multiset_json(rep.expected), "dimension": rep.dimension,
                     "weyl_dimension_sum": rep.weyl_sum})
        lines.append(f"k={k} g={g}: {format_multiset(rep.computed)}  "
                     f"[{'match' if rep.match else 'MISMATCH, expected ' + format_multiset(rep.expected)}]"
                     f"  dim {rep.dimension} = Weyl sum {rep.weyl_sum}")
    _emit(args, "verify-table1", "pass" if ok else "fail", {"genus": g, "rows": rows}, lines, t0)
    return EXIT_OK if ok else EXIT_FAIL


def _components(args, weight: int, genus: int) -> list[YoungDiagram]:
    if args.component:
        return [_component(args.component)]
    if not args.all:
        raise UsageError("give --component <diagram> or --all")
    return [d for d in candidate_diagrams(weight + 4, genus)]


def _cycle_job(payload):
    weight, genus, rows, cache_dir, budget = payload
    alg = JohnsonAlgebra(genus)
    if cache_dir:
        alg.cache = BasisCache(cache_dir)
    space = cycles(weight, genus, alg, budget)
    return space.multiplicity(YoungDiagram(tuple(rows)))


def _h2_job(payload):
    weight, genus, rows, cache_dir, seed = payload
    alg = JohnsonAlgebra(genus)
    if cache_dir:
        alg.cache = BasisCache(cache_dir)
    return h2_component(weight, YoungDiagram(tuple(rows)), genus, alg, budget=None, seed=seed).as_dict()


def _prebuild(alg: JohnsonAlgebra, weight: int) -> None:
    for k in range(1, weight + 1):
        alg.m(k)


def _map(args, fn, payloads, serial):
    """Worker processes for --jobs > 1, else ``serial`` in this process
    (which reuses the already built algebra)."""
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            return list(ex.map(fn, payloads))
    return [serial(p) for p in payloads]


def cmd_cycles(args) -> int:
    t0 = time.perf_counter()
    if args.weight is None or args.weight < 2:
        raise UsageError("--weight w >= 2 is required")
    w = args.weight
    g = _genus(args, default_genus(w))
    alg = _algebra(args, g)
    lams = [l for l in _components(args, w, g) if len(l) <= g]
    for lam in sorted(lams, key=lambda l: l.size):
        _guard(alg, w, lam.weight(g), args.budget_nnz, degree3=False)
    _prebuild(alg, w)
    cache_dir = None if args.no_cache else str(args.cache_dir)
    space = cycles(w, g, alg, args.budget_nnz)
    mults = _map(args, _cycle_job, [(w, g, lam.rows, cache_dir, args.budget_nnz) for lam in lams],
                 lambda p: space.multiplicity(YoungDiagram(tuple(p[2]))))
    ms = {lam: m for lam, m in zip(lams, mults) if m}
    result = {"weight": w, "genus": g, "multiplicities": _multiset_json(ms), "text": format_multiset(ms)}
    lines = [f"Z_2({w}) at g={g}: {format_multiset(ms) or '0'}"]
    status = "info"
    if args.all:
        dim = space.dimension()
        wsum = sum(m * weyl_dimension(d, g) for d, m in ms.items())
        result.update({"dimension": dim, "weyl_dimension_sum": wsum})
        lines.append(f"dim Z_2({w}) = {dim}, Weyl sum {wsum}")
        status = "pass" if dim == wsum else "fail"
    _emit(args, "cycles", status, result, lines, t0)
    return EXIT_FAIL if status == "fail" else EXIT_OK


def cmd_homology(args) -> int:
    t0 = time.perf_counter()
    if args.weight is None or args.weight < 2:
        raise UsageError("--weight w >= 2 is required")
    w = args.weight
    g = _genus(args, default_genus(w))
    alg = _algebra(args, g)
    lams = [l for l in _components(args, w, g) if len(l) <= g]
    for lam in sorted(lams, key=lambda l: l.size):  # largest slices first, refuse before any work
        _guard(alg, w, lam.weight(g), args.budget_nnz)
    _prebuild(alg, w)
    cache_dir = None if args.no_cache else str(args.cache_dir)
    res = _map(args, _h2_job, [(w, g, lam.rows, cache_dir, args.seed) for lam in lams],
               lambda p: h2_component(w, YoungDiagram(tuple(p[2])), g, alg, budget=None,
                                      seed=args.seed).as_dict())
    nonzero = [r for r in res if r["h2_multiplicity"]]
    lines = [f"{r['component']}: H_2 multiplicity {r['h2_multiplicity']} "
             f"(Z_2 {r['z2_multiplicity']}, boundaries {r['b2_multiplicity']})" for r in res]
    if w == 2:
        lines.append("note: weight 2 is reported without a reference value")
    if g < w + 4:
        lines.append(f"note: genus {g} is below {w + 4}, the range where every chain "
                     f"decomposition is known to be stable")
    result = {"weight": w, "genus": g, "components": res,
              "h2": format_multiset({YoungDiagram.parse(r["component"]): r["h2_multiplicity"]
                                     for r in nonzero}) or "0"}
    status = "pass" if not nonzero else ("info" if w == 2 else "fail")
    _emit(args, "homology", status, result, lines, t0)
    return EXIT_FAIL if status == "fail" else EXIT_OK


def _certificate_json(cert, fixture, vectors) -> dict:
    g = cert.genus
    return {
        "schema": CERTIFICATE_SCHEMA,
        "weight": cert.weight,
        "genus": g,
        "component": str(cert.lam),
        "highest_weight": list(cert.lam.weight(g)),
        "shape": {"candidates": "3-chains, summand (1,1,2)", "targets": [[1, 3], [2, 2]],
                  "embedding": "m(k) in H^(k+2); wedge of equal degrees as x(x)y - y(x)x"},
        "detectors": [{"name": d.name, "selector": list(d.selector), "pairs": [list(p) for p in d.pairs],
                       "blocks": [list(b) for b in d.blocks], "description": d.describe()}
                      for d in cert.detectors],
        "vectors": [{"name": v.name, "expression": str(v)} for v in vectors],
        "readout_keys": [" ".join(letter_name(x) for x in unpack_key(k, 4)) for k in cert.readout_keys],
        "matrix": [[_frac(c) for c in row] for row in cert.matrix],
        "rank": cert.rank,
        "multiplicity": cert.multiplicity,
        "soundness_rank": cert.soundness_rank,
        "sound": cert.sound,
        "pass": cert.passed,
    }


def cmd_rank_check(args) -> int:
    from .homology import surjectivity_certificate

    t0 = time.perf_counter()
    fx = load_fixture(args.fixture)
    g = _genus(args, fx.genus)
    vectors = fx.vectors
    if args.vectors:
        names = [s.strip() for s in args.vectors.split(",") if s.strip()]
        by_name = {v.name: v for v in fx.vectors}
        unknown = [n for n in names if n not in by_name]
        if unknown:
            raise UsageError(f"unknown vectors {unknown}; fixture has {sorted(by_name)}")
        vectors = [by_name[n] for n in names]
    alg = _algebra(args, g)
    cert = surjectivity_certificate(fx.weight, fx.component, [v.chain_vector(g) for v in vectors],
                                    fx.detectors, g, alg, check_soundness=not args.skip_soundness)
    doc = _certificate_json(cert, fx, vectors)
    if args.certificate:
        _write_atomic(Path(args.certificate), json.dumps(doc, indent=2, sort_keys=True) + "\n")
    lines = [f"component {cert.lam} in weight {cert.weight}, genus {g}",
             f"detector soundness: rank {cert.soundness_rank} of {cert.multiplicity} "
             f"({'pass' if cert.sound else 'FAIL'})",
             f"rank of D_i(d v_j): {cert.rank} of {cert.multiplicity} "
             f"({len(vectors)} vectors, {len(cert.detectors)} detectors)"]
    lines += ["  " + " ".join(f"{_frac(c):>7}" for c in row) for row in cert.matrix]
    if not cert.sound:
        _emit(args, "rank-check", "unsound", doc, lines, t0)
        return EXIT_UNSOUND
    _emit(args, "rank-check", "pass" if cert.passed else "fail", doc, lines, t0)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_cache(args) -> int:
    t0 = time.perf_counter()
    cache = BasisCache(args.cache_dir)
    if args.action == "clear":
        n = cache.clear()
        _emit(args, "cache", "info", {"removed_files": n, "directory": str(cache.dir)},
              [f"removed {n} files from {cache.dir}"], t0)
        return EXIT_OK
    entries = cache.entries()
    lines = [f"cache directory: {cache.dir}"]
    lines += [f"  {e['file']}: label={e.get('label')} g={e.get('genus')} k={e.get('degree')} "
              f"dim={e.get('dimension')} rows={e.get('rows')}" for e in entries]
    if not entries:
        lines.append("  (empty)")
    _emit(args, "cache", "info", {"directory": str(cache.dir), "entries": entries}, lines, t0)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, help="genus g (number of symplectic pairs)")
    common.add_argument("--degree", type=int, help="degree k of m_{g,1}(k)")
    common.add_argument("--weight", type=int, help="weight w of the chains")
    common.add_argument("--component", help="Young diagram such as [21^2]")
    common.add_argument("--all", action="store_true", help="every candidate component")
    common.add_argument("--budget-nnz", type=int, default=DEFAULT_BUDGET,
                        help="refuse weight slices with more chain basis elements than this")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-component work")
    common.add_argument("--seed", type=int, default=0, help="seed for the order of boundary candidates")
    common.add_argument("--cache-dir", type=Path, default=None,
                        help=f"basis cache directory (default ${CACHE_ENV} or ~/.cache/johnson_h2)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--output", help="also write the report to this file")
    common.add_argument("--no-timing", action="store_true",
                        help="omit wall-clock fields so reports are byte-for-byte reproducible")
    common.add_argument("--stability-bound", type=int, default=None,
                        help="override the minimum genus accepted for m(k)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="johnson-h2", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("decompose", parents=[common], help="Sp-decomposition of m_{g,1}(k)").set_defaults(
        func=cmd_decompose)
    sub.add_parser("verify-table1", parents=[common],
                   help="compare m_{g,1}(k), k<=4, with the reference table").set_defaults(func=cmd_verify_table1)
    sub.add_parser("cycles", parents=[common], help="multiplicities in Z_2(w)").set_defaults(func=cmd_cycles)
    sub.add_parser("homology", parents=[common], help="multiplicities in H_2(m_{g,1})_w").set_defaults(
        func=cmd_homology)
    rc = sub.add_parser("rank-check", parents=[common], help="detector certificate for a component")
    rc.add_argument("--fixture", help="fixture file (default: the shipped weight-4 [21^2] data)")
    rc.add_argument("--vectors", help="comma-separated subset of fixture vector names")
    rc.add_argument("--certificate", help="write the certificate JSON here")
    rc.add_argument("--skip-soundness", action="store_true", help="do not recompute detector soundness")
    rc.set_defaults(func=cmd_rank_check)
    ca = sub.add_parser("cache", parents=[common], help="inspect or clear the basis cache")
    ca.add_argument("action", choices=("inspect", "clear"))
    ca.set_defaults(func=cmd_cache)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.cache_dir is None:
        args.cache_dir = default_cache_dir()
    if args.jobs < 1 or (args.budget_nnz is not None and args.budget_nnz < 1):
        print("error: --jobs and --budget-nnz must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FixtureError as exc:
        print(f"error: fixture: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except StabilityError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except SoundnessFailure as exc:
        print(f"detector soundness failure: {exc}", file=sys.stderr)
        return EXIT_UNSOUND
    except InconsistentDecomposition as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ExactCoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
