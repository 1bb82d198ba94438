"""Human-readable certificate fixtures: detectors and spider chain vectors."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .derivations import spider_tensor
from .exact import ExactCoreError, parse_letter
from .homology import ChainVector
from .sprep import Detector, YoungDiagram

DEFAULT_FIXTURE = "w4_21_1_1.txt"

_SELECTORS = {"Phi1": (1, 3), "Phi2": (2, 2)}
_DETECTOR_RE = re.compile(r"^p((?:\(\d+\))+)\s+mu((?:\(\d\d\))*)\s+(Phi\d|sel\([\d,]+\))$")
_SPIDER_RE = re.compile(r"S\(([^)]*)\)")


class FixtureError(ExactCoreError):
    pass


@dataclass
class SpiderWedge:
    name: str
    legs: list[tuple[int, ...]]

    def chain_vector(self, genus: int) -> ChainVector:
        return ChainVector.from_wedge([spider_tensor(genus, legs) for legs in self.legs])

    def __str__(self) -> str:
        from .exact import letter_name
        return " ^ ".join("S(" + ",".join(letter_name(x) for x in legs) + ")" for legs in self.legs)


@dataclass
class Fixture:
    component: YoungDiagram
    weight: int
    genus: int
    detectors: list[Detector] = field(default_factory=list)
    vectors: list[SpiderWedge] = field(default_factory=list)

    def chain_vectors(self, genus: int | None = None) -> list[ChainVector]:
        g = self.genus if genus is None else genus
        return [v.chain_vector(g) for v in self.vectors]


def parse_detector(text: str, name: str = "") -> Detector:
    """``p(123)(4) mu(12)(34) Phi1`` -> Detector."""
    m = _DETECTOR_RE.match(text.strip())
    if not m:
        raise FixtureError(f"cannot parse detector {text!r}")
    blocks = tuple(tuple(int(c) for c in b) for b in re.findall(r"\((\d+)\)", m.group(1)))
    pairs = tuple((int(p[0]), int(p[1])) for p in re.findall(r"\((\d\d)\)", m.group(2)))
    sel = m.group(3)
    if sel in _SELECTORS:
        selector = _SELECTORS[sel]
    elif sel.startswith("sel("):
        selector = tuple(int(x) for x in sel[4:-1].split(","))
    else:
        raise FixtureError(f"unknown selector {sel!r}")
    try:
        return Detector(selector, pairs, blocks, name=name or text.strip())
    except ExactCoreError as exc:
        raise FixtureError(f"invalid detector {text!r}: {exc}") from exc


def parse_spider_wedge(text: str, name: str = "") -> SpiderWedge:
    body = text.replace("∧", "^").replace("⊗", "(x)")
    pieces = [p.strip() for p in re.split(r"\^|\(x\)", body)]
    legs = []
    for piece in pieces:
        m = _SPIDER_RE.fullmatch(piece)
        if not m:
            raise FixtureError(f"cannot parse spider {piece!r} in {text!r}")
        try:
            legs.append(tuple(parse_letter(x.strip()) for x in m.group(1).split(",")))
        except ExactCoreError as exc:
            raise FixtureError(str(exc)) from exc
        if len(legs[-1]) < 3:
            raise FixtureError(f"spider {piece!r} needs at least 3 legs")
    return SpiderWedge(name, legs)


def parse_fixture(text: str) -> Fixture:
    meta: dict[str, str] = {}
    dets: list[Detector] = []
    vecs: list[SpiderWedge] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head in ("component", "weight", "genus"):
                meta[head] = rest.strip()
            elif head in ("detector", "vector"):
                name, eq, body = rest.partition("=")
                if not eq:
                    raise FixtureError("expected '<name> = <expression>'")
                if head == "detector":
                    dets.append(parse_detector(body, name.strip()))
                else:
                    vecs.append(parse_spider_wedge(body, name.strip()))
            else:
                raise FixtureError(f"unknown keyword {head!r}")
        except ExactCoreError as exc:
            raise FixtureError(f"line {lineno}: {exc}") from exc
    missing = {"component", "weight", "genus"} - set(meta)
    if missing:
        raise FixtureError(f"fixture lacks {sorted(missing)}")
    try:
        fx = Fixture(YoungDiagram.parse(meta["component"]), int(meta["weight"]), int(meta["genus"]),
                     dets, vecs)
    except (ValueError, ExactCoreError) as exc:
        raise FixtureError(f"bad fixture header: {exc}") from exc
    for v in vecs:
        if any(x >= 2 * fx.genus for legs in v.legs for x in legs):
            raise FixtureError(f"vector {v.name} uses a leg beyond genus {fx.genus}")
        if sum(len(legs) - 2 for legs in v.legs) != fx.weight:
            raise FixtureError(f"vector {v.name} does not have weight {fx.weight}")
    return fx


def load_fixture(path: str | Path | None = None) -> Fixture:
    if path is None:
        text = resources.files("johnson_h2.data").joinpath(DEFAULT_FIXTURE).read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise FixtureError(f"cannot read fixture {path}: {exc}") from exc
    return parse_fixture(text)
