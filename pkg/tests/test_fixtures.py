import pytest

from johnson_h2.fixtures import FixtureError, load_fixture, parse_detector, parse_fixture, parse_spider_wedge
from johnson_h2.sprep import YoungDiagram

GOOD = """\
component [21^2]
weight 4
genus 6
detector D1 = p(123)(4) mu(12)(34) Phi1
vector v1 = S(a1,a2,a4) ^ S(a1,b4,a5) (x) S(a3,b5,a6,b6)
"""


def test_shipped_fixture():
    fx = load_fixture()
    assert fx.component == YoungDiagram((2, 1, 1))
    assert (fx.weight, fx.genus) == (4, 6)
    assert len(fx.detectors) == 7 and len(fx.vectors) == 7
    assert {d.selector for d in fx.detectors} == {(1, 3), (2, 2)}
    for v in fx.chain_vectors():
        assert v.shape.degree == 3 and v.shape.weight == 4
        assert not v.is_zero()


def test_parse_detector():
    d = parse_detector("p(124)(3) mu(14)(56) Phi1")
    assert d.selector == (1, 3)
    assert d.pairs == ((1, 4), (5, 6))
    assert d.blocks == ((1, 2, 4), (3,))
    assert parse_detector("p(1234) mu(12)(56) Phi2").selector == (2, 2)
    with pytest.raises(FixtureError):
        parse_detector("p(12)(3) mu(12) Phi1")  # blocks do not cover the slots
    with pytest.raises(FixtureError):
        parse_detector("q(123)(4) mu(12)(34) Phi1")


def test_parse_spider_wedge():
    w = parse_spider_wedge("S(a1,a2,a4) ∧ S(a1,b4,a5) ⊗ S(a3,b5,a6,b6)")
    assert [len(l) for l in w.legs] == [3, 3, 4]
    assert str(w) == "S(a1,a2,a4) ^ S(a1,b4,a5) ^ S(a3,b5,a6,b6)"
    with pytest.raises(FixtureError):
        parse_spider_wedge("S(a1,a2) ^ S(a1,a2,a3)")
    with pytest.raises(FixtureError):
        parse_spider_wedge("S(a1,a2,x9)")


@pytest.mark.parametrize("edit", [
    ("genus 6", "genus 4"),           # leg a5 beyond the genus
    ("weight 4", "weight 5"),         # legs do not add up
    ("component [21^2]", ""),         # header missing
    ("component [21^2]", "component [2a]"),
    ("detector D1 =", "detector D1"),
    ("vector v1", "vektor v1"),
])
def test_malformed_fixtures(edit):
    with pytest.raises(FixtureError):
        parse_fixture(GOOD.replace(*edit))


def test_good_fixture_parses():
    fx = parse_fixture(GOOD + "# trailing comment\n")
    assert fx.vectors[0].name == "v1"


def test_missing_file(tmp_path):
    with pytest.raises(FixtureError):
        load_fixture(tmp_path / "none.txt")
