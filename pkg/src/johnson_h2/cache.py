"""On-disk cache of graded bases.

Each basis is stored as ``<label>_g<g>_k<k>.basis`` (tensor text blocks, one
per dominant-weight row) next to ``<same>.meta.json`` holding the weight of
each block, generator metadata and a SHA-256 of the basis file.  Writes go
to a temporary file and are renamed into place; a lock file serialises
writers.  Reads re-check the hash, the headers and the symplectic condition
of every row, and a failing entry is reported and treated as absent.
"""

from __future__ import annotations

import contextlib
import fcntl
import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from .exact import ExactCoreError, format_tensor, parse_tensors
from .johnson import GradedBasis

log = logging.getLogger(__name__)

CACHE_ENV = "JOHNSON_H2_CACHE"
FORMAT_VERSION = 1


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "johnson_h2"


class CacheError(ExactCoreError):
    pass


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(y) for y in x)
    return x


class BasisCache:
    def __init__(self, directory: str | Path | None = None):
        self.dir = Path(directory) if directory is not None else default_cache_dir()
        self.problems: list[str] = []

    def _stem(self, label: str, genus: int, degree: int) -> str:
        return f"{label}_g{genus}_k{degree}"

    def paths(self, label: str, genus: int, degree: int) -> tuple[Path, Path]:
        stem = self._stem(label, genus, degree)
        return self.dir / f"{stem}.basis", self.dir / f"{stem}.meta.json"

    @contextlib.contextmanager
    def lock(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        with open(self.dir / ".lock", "w") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def _atomic_write(self, path: Path, text: str) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            with contextlib.suppress(OSError):
                os.unlink(tmp)
            raise

    def put(self, gb: GradedBasis, extra: dict | None = None) -> Path:
        blocks, weights = [], []
        for w in sorted(gb.dominant_rows, reverse=True):
            for r in gb.dominant_rows[w]:
                blocks.append(format_tensor(r))
                weights.append(list(w))
        text = "".join(blocks)
        meta = {
            "format": FORMAT_VERSION,
            "label": gb.label,
            "genus": gb.genus,
            "degree": gb.degree,
            "rows": len(blocks),
            "dimension": gb.dimension(),
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
            "weights": weights,
            "generators": [[list(w), _jsonable(tuple(gens))] for w, gens in sorted(gb.generators.items())],
        }
        if extra:
            meta.update(extra)
        basis_path, meta_path = self.paths(gb.label, gb.genus, gb.degree)
        with self.lock():
            self._atomic_write(basis_path, text)
            self._atomic_write(meta_path, json.dumps(meta, indent=1, sort_keys=True) + "\n")
        return basis_path

    def _reject(self, path: Path, why: str) -> None:
        msg = f"ignoring cache entry {path.name}: {why}"
        log.warning(msg)
        self.problems.append(msg)

    def get(self, label: str, genus: int, degree: int) -> GradedBasis | None:
        basis_path, meta_path = self.paths(label, genus, degree)
        if not basis_path.exists() or not meta_path.exists():
            return None
        try:
            text = basis_path.read_text()
            meta = json.loads(meta_path.read_text())
        except (OSError, ValueError) as exc:
            self._reject(basis_path, f"unreadable ({exc})")
            return None
        if meta.get("format") != FORMAT_VERSION or (meta.get("label"), meta.get("genus"),
                                                     meta.get("degree")) != (label, genus, degree):
            self._reject(basis_path, "metadata does not match the key")
            return None
        try:
            blocks = parse_tensors(text)
        except ExactCoreError as exc:
            self._reject(basis_path, f"parse error: {exc}")
            return None
        if len(blocks) != meta.get("rows") or len(meta.get("weights", ())) != len(blocks):
            self._reject(basis_path, "row count mismatch")
            return None
        gb = GradedBasis(genus, degree, label)
        for (kind, fields, t), w in zip(blocks, meta["weights"]):
            if kind != "tensor" or fields.get("genus") != genus or fields.get("degree") != degree + 2:
                self._reject(basis_path, "bad block header")
                return None
            if t.rotate() != t:
                self._reject(basis_path, "a row violates the symplectic condition")
                return None
            if t.weight() != tuple(w):
                self._reject(basis_path, "a row does not have its recorded weight")
                return None
            gb.dominant_rows.setdefault(tuple(w), []).append(t)
        for w, rows in gb.dominant_rows.items():
            pivots = [int(r.keys[0]) for r in rows]
            if pivots != sorted(set(pivots)) or any(
                    p in set(int(k) for k in r.keys[1:]) for r in rows for p in pivots):
                self._reject(basis_path, "rows are not in reduced echelon form")
                return None
        if hashlib.sha256(text.encode()).hexdigest() != meta.get("sha256"):
            self._reject(basis_path, "checksum mismatch")
            return None
        for w, gens in meta.get("generators", ()):
            gb.generators[tuple(w)] = [_tuplify(g) for g in gens]
        return gb

    def entries(self) -> list[dict]:
        out = []
        if not self.dir.exists():
            return out
        for meta_path in sorted(self.dir.glob("*.meta.json")):
            try:
                meta = json.loads(meta_path.read_text())
            except (OSError, ValueError):
                out.append({"file": meta_path.name, "status": "unreadable"})
                continue
            basis = meta_path.with_name(meta_path.name[: -len(".meta.json")] + ".basis")
            out.append({
                "file": basis.name,
                "label": meta.get("label"),
                "genus": meta.get("genus"),
                "degree": meta.get("degree"),
                "dimension": meta.get("dimension"),
                "rows": meta.get("rows"),
                "bytes": basis.stat().st_size if basis.exists() else None,
            })
        return out

    def clear(self) -> int:
        n = 0
        if not self.dir.exists():
            return 0
        with self.lock():
            for p in list(self.dir.glob("*.basis")) + list(self.dir.glob("*.meta.json")) \
                    + list(self.dir.glob("*.tmp")):
                p.unlink()
                n += 1
        return n
