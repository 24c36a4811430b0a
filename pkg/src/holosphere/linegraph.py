"""Positive line graphs: the unique candidate labeling, its validation, and the decision."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .algebra import (IntegerPair, alpha_positive_on, bracket)
from .dataset import (AsymptoticDataSet, SpectrumEntry, ValidationReport, angle_spectrum,
                      pole_flux, validate_data_set)
from . import graphio


class LineGraphError(ValueError):
    """Raised when no candidate labeling exists."""

    def __init__(self, message: str, clause: str = ""):
        super().__init__(message)
        self.clause = clause


@dataclass(frozen=True)
class PositiveLineGraph:
    """Vertices are the spectrum entries in angle order; ``edges[i]`` joins vertex i and i+1."""

    vertices: tuple[SpectrumEntry, ...]
    edges: tuple[IntegerPair, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError("a line graph needs exactly one edge between consecutive vertices")

    @property
    def angles(self):
        return [v.angle for v in self.vertices]

    def kind(self, i: int) -> str:
        return "mono" if i in (0, len(self.vertices) - 1) else "bi"

    def signature(self):
        """Angle and label sequence; two line graphs are label-isomorphic iff these agree."""
        return (tuple(self.angles), tuple(self.edges))


def _top_label(ds: AsymptoticDataSet, top: SpectrumEntry) -> IntegerPair:
    if top.angle.kind == "polePi":
        return pole_flux(ds, 1)
    return -top.minus_sum


def _bottom_label(ds: AsymptoticDataSet, bottom: SpectrumEntry) -> IntegerPair:
    if bottom.angle.kind == "pole0":
        return pole_flux(ds, 0)
    return bottom.minus_sum


def build_candidate_line_graph(ds: AsymptoticDataSet) -> PositiveLineGraph:
    """Top-down telescoping of the forced edge labels, cross-checked bottom-up."""
    spec = angle_spectrum(ds)
    if len(spec) < 2:
        raise LineGraphError("the angle set has fewer than two angles", "structure")
    labels = [_top_label(ds, spec[-1])]
    for entry in reversed(spec[1:-1]):
        # going down through a bivalent vertex: Q_below = Q_above + net
        labels.append(labels[-1] + entry.net)
    labels.reverse()
    want = _bottom_label(ds, spec[0])
    if labels[0] != want:
        raise LineGraphError(f"bottom edge telescopes to {labels[0]!r}, expected {want!r}",
                             "3" if spec[0].angle.kind == "pair" else "4")

    up = [want]
    for entry in spec[1:-1]:
        up.append(up[-1] - entry.net)
    if up != labels:  # pragma: no cover - would signal an asymmetry bug
        raise AssertionError("top-down and bottom-up telescoping disagree")
    return PositiveLineGraph(tuple(spec), tuple(labels))


def validate_line_graph(L: PositiveLineGraph, ds: AsymptoticDataSet) -> ValidationReport:
    rep = ValidationReport()
    spec = angle_spectrum(ds)
    if [v.angle for v in spec] != L.angles:
        rep.add("1.18", "vertex angles differ from the angle set", clause="structure")
        return rep
    n = len(L.vertices)
    if n < 2:
        rep.add("1.18", "a line graph needs at least two vertices", clause="structure")
        return rep

    top, bottom = L.vertices[-1], L.vertices[0]
    want = _top_label(ds, top)
    if L.edges[-1] != want:
        clause = "2" if top.angle.kind == "polePi" else "1"
        rep.add("1.18", f"top edge {L.edges[-1]!r} should be {want!r}", (n - 2,), clause)
    want = _bottom_label(ds, bottom)
    if L.edges[0] != want:
        clause = "4" if bottom.angle.kind == "pole0" else "3"
        rep.add("1.18", f"bottom edge {L.edges[0]!r} should be {want!r}", (0,), clause)
    for i in range(1, n - 1):
        got = L.edges[i - 1] - L.edges[i]
        if got != L.vertices[i].net:
            rep.add("1.18", f"bivalent vertex {i}: Q_below - Q_above = {got!r}, "
                            f"expected {L.vertices[i].net!r}", (i,), "5")

    for i, Q in enumerate(L.edges):
        lo, hi = L.vertices[i], L.vertices[i + 1]
        for j, v in ((i, lo), (i + 1, hi)):
            if L.kind(j) == "bi" and bracket(v.angle.pair, Q) <= 0:
                rep.add("1.18", f"edge {i}: bracket of vertex {j} pair with {Q!r} is not positive",
                        (i,), "6")
        both_interior = not lo.angle.is_pole and not hi.angle.is_pole
        if Q.pp < 0 and both_interior:
            signs = {lo.angle.pair.pp > 0, hi.angle.pair.pp > 0}
            if signs == {True, False}:
                rep.add("1.18", f"edge {i}: q' < 0 but only one vertex has p' > 0", (i,), "6b")
        zlo = L.kind(i) == "mono" and not lo.angle.is_pole
        zhi = L.kind(i + 1) == "mono" and not hi.angle.is_pole
        res = alpha_positive_on(Q, lo.angle, hi.angle, zlo, zhi)
        if not res.ok:
            rep.add("1.18", f"edge {i}: alpha_{Q!r} fails positivity at {res.witness!r} "
                            f"({res.reason})", (i,), "positivity")
    return rep


@dataclass
class Verdict:
    nonempty: bool
    witness: Optional[PositiveLineGraph] = None
    one_angle: bool = False
    report: ValidationReport = field(default_factory=ValidationReport)

    @property
    def rules(self) -> list[str]:
        return self.report.rules

    def to_json(self, ds: AsymptoticDataSet) -> dict:
        doc = {"nonempty": self.nonempty, "report": self.report.to_json()}
        if self.one_angle:
            doc["witness"] = {"kind": "one-angle", "angle": graphio.angle_to_json(
                angle_spectrum(ds)[0].angle)}
        elif self.witness is not None:
            doc["witness"] = line_graph_to_json(self.witness, ds)
        return doc


def decide_nonempty(ds: AsymptoticDataSet) -> Verdict:
    rep = validate_data_set(ds)
    if not rep.ok:
        return Verdict(False, report=rep)
    spec = angle_spectrum(ds)
    if len(spec) == 1:
        return Verdict(True, one_angle=True, report=rep)
    try:
        L = build_candidate_line_graph(ds)
    except LineGraphError as exc:
        rep.add("1.18", str(exc), clause=exc.clause)
        return Verdict(False, report=rep)
    rep = validate_line_graph(L, ds)
    if not rep.ok:
        return Verdict(False, report=rep)
    return Verdict(True, witness=L, report=rep)


def line_graph_to_json(L: PositiveLineGraph, ds: AsymptoticDataSet) -> dict:
    n = len(L.vertices)
    vertices = [{"id": i, "kind": L.kind(i), "angle": graphio.angle_to_json(v.angle),
                 "label": list(v.elements)} for i, v in enumerate(L.vertices)]
    edges = [{"id": i, "src": i, "dst": i + 1, "q": Q.p, "qp": Q.pp}
             for i, Q in enumerate(L.edges)]
    return {"kind": "line", "dataset": ds.to_json(), "vertices": vertices, "edges": edges,
            "n_vertices": n}


def line_graph_from_json(doc: dict) -> tuple[PositiveLineGraph, AsymptoticDataSet]:
    ds = AsymptoticDataSet.from_json(doc["dataset"])
    spec = {v.angle: v for v in angle_spectrum(ds)}
    verts = sorted(doc["vertices"], key=lambda v: v["id"])
    entries = []
    for v in verts:
        a = graphio.angle_from_json(v["angle"])
        if a not in spec:
            raise ValueError(f"vertex angle {a!r} is not in the angle set")
        entries.append(spec[a])
    order = {v["id"]: i for i, v in enumerate(verts)}
    edges: list[Optional[IntegerPair]] = [None] * (len(verts) - 1)
    for e in doc["edges"]:
        i, j = sorted((order[e["src"]], order[e["dst"]]))
        if j != i + 1:
            raise ValueError("line graph edges must join consecutive vertices")
        edges[i] = IntegerPair(e["q"], e["qp"])
    if any(e is None for e in edges):
        raise ValueError("missing edge")
    return PositiveLineGraph(tuple(entries), tuple(edges)), ds


def line_graph_to_dot(L: PositiveLineGraph) -> str:
    lines = ["graph L {"]
    for i, v in enumerate(L.vertices):
        lines.append(f'  v{i} [label="{v.angle!r}"];')
    for i, Q in enumerate(L.edges):
        lines.append(f'  v{i} -- v{i + 1} [label="{Q!r}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
