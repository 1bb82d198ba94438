import json

from johnson_h2.cache import BasisCache
from johnson_h2.johnson import JohnsonAlgebra
from johnson_h2.sprep import decompose


def test_round_trip(tmp_path):
    cache = BasisCache(tmp_path)
    gb = JohnsonAlgebra(3).m(2)
    cache.put(gb)
    again = cache.get("m", 3, 2)
    assert again is not None
    assert again.dominant_rows == gb.dominant_rows
    assert again.generators == gb.generators
    assert decompose(again) == decompose(gb)
    [entry] = cache.entries()
    assert entry["dimension"] == gb.dimension() and entry["degree"] == 2


def test_algebra_reads_cache(tmp_path):
    cache = BasisCache(tmp_path)
    alg = JohnsonAlgebra(3)
    alg.cache = cache
    alg.m(2)
    fresh = JohnsonAlgebra(3)
    fresh.cache = cache
    assert fresh.m(2).dominant_rows == alg.m(2).dominant_rows
    assert 2 in fresh._pieces and 1 not in fresh._pieces  # loaded, not rebuilt


def _tamper(path, old, new):
    text = path.read_text()
    assert old in text
    path.write_text(text.replace(old, new, 1))


def test_tampered_entries_are_rejected(tmp_path):
    cache = BasisCache(tmp_path)
    cache.put(JohnsonAlgebra(3).m(1))
    basis, meta = cache.paths("m", 3, 1)
    _tamper(basis, "1/1", "2/1")
    assert cache.get("m", 3, 1) is None
    assert cache.problems

    cache.put(JohnsonAlgebra(3).m(1))
    m = json.loads(meta.read_text())
    m["genus"] = 4
    meta.write_text(json.dumps(m))
    assert cache.get("m", 3, 1) is None

    cache.put(JohnsonAlgebra(3).m(1))
    basis.write_text(basis.read_text() + "garbage\n")
    assert cache.get("m", 3, 1) is None


def test_checksum_guards_reordering(tmp_path):
    cache = BasisCache(tmp_path)
    cache.put(JohnsonAlgebra(3).m(1))
    _, meta = cache.paths("m", 3, 1)
    m = json.loads(meta.read_text())
    m["sha256"] = "0" * 64
    meta.write_text(json.dumps(m))
    assert cache.get("m", 3, 1) is None
    assert any("checksum" in p for p in cache.problems)


def test_clear(tmp_path):
    cache = BasisCache(tmp_path)
    cache.put(JohnsonAlgebra(3).m(1))
    assert cache.clear() == 2
    assert cache.entries() == []
    assert cache.get("m", 3, 1) is None
