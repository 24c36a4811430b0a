"""Labeled trees with mono/bi/tri-valent vertices and their validators."""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..algebra import (ANGLE0, ANGLEPI, Angle, IntegerPair, ZERO, alpha_positive_on,
                       defines_angle)
from ..dataset import (AsymptoticDataSet, ValidationReport, angle_spectrum, counts,
                       element_angle, pole_flux)
from .. import graphio

KINDS = {1: "mono", 2: "bi", 3: "tri"}
POS_LABEL = "(1)"
NEG_LABEL = "(-1)"


@dataclass
class Vertex:
    id: int
    angle: Angle
    labels: tuple = ()


@dataclass
class Edge:
    id: int
    u: int
    v: int
    q: IntegerPair

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass
class PositiveGraph:
    """A tree whose vertices carry exact angles and whose edges carry pairs Q_e.

    Monovalent labels are data-set element indices or the tags "(1)" / "(-1)";
    bivalent labels list the (0,+) elements of their partition subset.
    """

    vertices: dict[int, Vertex] = field(default_factory=dict)
    edges: dict[int, Edge] = field(default_factory=dict)
    adj: dict[int, set[int]] = field(default_factory=dict)
    next_vertex: int = 0
    next_edge: int = 0
    delta: float = 1e-3  # advisory float step for offset angles

    def add_vertex(self, angle: Angle, labels: Iterable = (), vid: Optional[int] = None) -> int:
        if vid is None:
            vid = self.next_vertex
        if vid in self.vertices:
            raise ValueError(f"vertex {vid} exists")
        self.next_vertex = max(self.next_vertex, vid + 1)
        self.vertices[vid] = Vertex(vid, angle, tuple(labels))
        self.adj[vid] = set()
        return vid

    def add_edge(self, u: int, v: int, q: IntegerPair) -> int:
        eid = self.next_edge
        self.next_edge += 1
        self.edges[eid] = Edge(eid, u, v, q)
        self.adj[u].add(eid)
        self.adj[v].add(eid)
        return eid

    def remove_edge(self, eid: int) -> None:
        e = self.edges.pop(eid)
        self.adj[e.u].discard(eid)
        self.adj[e.v].discard(eid)

    def remove_vertex(self, vid: int) -> None:
        for eid in list(self.adj[vid]):
            self.remove_edge(eid)
        del self.adj[vid]
        del self.vertices[vid]

    def copy(self) -> "PositiveGraph":
        g = PositiveGraph(next_vertex=self.next_vertex, next_edge=self.next_edge,
                          delta=self.delta)
        g.vertices = {k: Vertex(v.id, v.angle, v.labels) for k, v in self.vertices.items()}
        g.edges = {k: Edge(e.id, e.u, e.v, e.q) for k, e in self.edges.items()}
        g.adj = {k: set(s) for k, s in self.adj.items()}
        return g

    def valence(self, vid: int) -> int:
        return len(self.adj[vid])

    def kind(self, vid: int) -> str:
        return KINDS.get(self.valence(vid), f"valence{self.valence(vid)}")

    def angle(self, vid: int) -> Angle:
        return self.vertices[vid].angle

    def incident(self, vid: int) -> list[Edge]:
        return [self.edges[e] for e in sorted(self.adj[vid])]

    def of_kind(self, kind: str) -> list[int]:
        return [v for v in sorted(self.vertices) if self.kind(v) == kind]

    def lower(self, e: Edge) -> int:
        return e.u if self.angle(e.u) < self.angle(e.v) else e.v

    def upper(self, e: Edge) -> int:
        return e.other(self.lower(e))

    def is_tree(self) -> bool:
        if not self.vertices:
            return False
        if len(self.edges) != len(self.vertices) - 1:
            return False
        start = next(iter(self.vertices))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for eid in self.adj[x]:
                y = self.edges[eid].other(x)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    def vertex_pair(self, vid: int) -> IntegerPair:
        """P_o from the edge labels: +-Q_e for monovalent (+ when lower), Q_below - Q_above for bivalent."""
        es = self.incident(vid)
        if len(es) == 1:
            e = es[0]
            return e.q if self.lower(e) == vid else -e.q
        if len(es) == 2:
            a = self.angle(vid)
            below = [e for e in es if self.angle(e.other(vid)) < a]
            above = [e for e in es if self.angle(e.other(vid)) > a]
            if len(below) == 1 and len(above) == 1:
                return below[0].q - above[0].q
        raise ValueError(f"vertex {vid} has no pair")


def _check_structure(T: PositiveGraph, rep: ValidationReport, rule: str) -> bool:
    if not T.is_tree():
        rep.add(rule, "the graph is not a tree", clause="tree")
        return False
    ok = True
    for vid in sorted(T.vertices):
        if T.valence(vid) not in (1, 2, 3):
            rep.add(rule, f"vertex {vid} has valence {T.valence(vid)}", (vid,), "valence")
            ok = False
    for e in T.edges.values():
        if T.angle(e.u) == T.angle(e.v):
            rep.add(rule, f"edge {e.id} joins vertices with equal angles", (e.id,), "distinct")
            ok = False
    if not ok:
        return False
    for vid in sorted(T.vertices):
        a = T.angle(vid)
        if T.valence(vid) >= 2:
            sides = {T.angle(e.other(vid)) > a for e in T.incident(vid)}
            if sides != {True, False}:
                rep.add(rule, f"vertex {vid} is not between its neighbours", (vid,), "between")
                ok = False
            if T.valence(vid) == 2 and not a.is_exact:
                rep.add(rule, f"bivalent vertex {vid} sits at an offset angle", (vid,), "angle")
                ok = False
            if a.is_pole and a.is_exact:
                rep.add(rule, f"multivalent vertex {vid} at a pole", (vid,), "angle")
                ok = False
        elif not a.is_exact:
            rep.add(rule, f"monovalent vertex {vid} sits at an offset angle", (vid,), "angle")
            ok = False
    return ok


def _check_trivalent_sums(T: PositiveGraph, rep: ValidationReport, rule: str) -> None:
    for vid in T.of_kind("tri"):
        a = T.angle(vid)
        es = T.incident(vid)
        above = [e for e in es if T.angle(e.other(vid)) > a]
        below = [e for e in es if T.angle(e.other(vid)) < a]
        lone, pair_ = (above, below) if len(above) == 1 else (below, above)
        if lone[0].q != pair_[0].q + pair_[1].q:
            rep.add(rule, f"trivalent vertex {vid}: {lone[0].q!r} != "
                          f"{pair_[0].q!r} + {pair_[1].q!r}", (vid,), "trivalent")


def _zero_allowed(T: PositiveGraph, vid: int, only_minus: Optional[AsymptoticDataSet] = None) -> bool:
    if T.valence(vid) != 1 or T.angle(vid).is_pole:
        return False
    if only_minus is None:
        return True
    labels = T.vertices[vid].labels
    return all(isinstance(x, int) and only_minus.ends[x].delta == 0
               and only_minus.ends[x].sign < 0 for x in labels) and bool(labels)


def _check_positivity(T: PositiveGraph, rep: ValidationReport, rule: str,
                      ds_for_labels: Optional[AsymptoticDataSet] = None) -> None:
    for e in sorted(T.edges.values(), key=lambda e: e.id):
        lo, hi = T.lower(e), T.upper(e)
        res = alpha_positive_on(e.q, T.angle(lo), T.angle(hi),
                                _zero_allowed(T, lo, ds_for_labels),
                                _zero_allowed(T, hi, ds_for_labels))
        if not res.ok:
            rep.add(rule, f"edge {e.id}: alpha_{e.q!r} fails positivity at {res.witness!r} "
                          f"({res.reason})", (e.id,), "positivity")


def validate_positive_graph(T: PositiveGraph, ds: AsymptoticDataSet) -> ValidationReport:
    rep = ValidationReport()
    if not _check_structure(T, rep, "5.6"):
        return rep

    for vid in sorted(T.vertices):
        a, k = T.angle(vid), T.valence(vid)
        if k == 1 and not a.is_pole:
            P = T.vertex_pair(vid)
            if not defines_angle(P) or Angle.of(P) != a:
                rep.add("5.7", f"monovalent vertex {vid}: {P!r} does not define {a!r}",
                        (vid,), "monovalent")
        elif k == 2:
            P = T.vertex_pair(vid)
            if not P.is_zero() and not any(defines_angle(R) and Angle.of(R) == a for R in (P, -P)):
                rep.add("5.7", f"bivalent vertex {vid}: {P!r} does not define {a!r}",
                        (vid,), "bivalent")
    _check_trivalent_sums(T, rep, "5.7")
    _check_positivity(T, rep, "5.7")

    for pole, kind in ((0, "pole0"), (1, "polePi")):
        total = ZERO
        for e in T.edges.values():
            if any(T.angle(x).kind == kind and T.angle(x).is_exact for x in (e.u, e.v)):
                total = total + e.q
        if total != pole_flux(ds, pole):
            rep.add("5.8", f"edges at {kind} sum to {total!r}, expected {pole_flux(ds, pole)!r}",
                    clause=kind)

    net = collections.defaultdict(lambda: ZERO)
    for entry in angle_spectrum(ds):
        if not entry.angle.is_pole:
            net[entry.angle] = entry.net
    got = collections.defaultdict(lambda: ZERO)
    for vid in sorted(T.vertices):
        a, k = T.angle(vid), T.valence(vid)
        if a.is_pole or k == 3:
            continue
        P = T.vertex_pair(vid)
        got[a] = got[a] + (P if k == 2 else -P)
    for a in sorted(set(net) | set(got)):
        if got[a] != net[a]:
            rep.add("5.8", f"at {a!r}: bivalent minus monovalent pairs {got[a]!r}, "
                           f"expected {net[a]!r}", clause="interior")
    return rep


def _label_angle(ds: AsymptoticDataSet, ref) -> Angle:
    if ref == POS_LABEL:
        return ANGLE0
    if ref == NEG_LABEL:
        return ANGLEPI
    return element_angle(ds.ends[ref])


def _mono_label_pair(ds: AsymptoticDataSet, ref, is_lower: bool, interior: bool) -> IntegerPair:
    """Required Q_e at a labeled monovalent vertex."""
    if ref in (POS_LABEL, NEG_LABEL):
        return IntegerPair(0, -1)
    e = ds.ends[ref]
    plus = (interior and is_lower) or (e.delta == 1 and e.sign < 0) or (e.delta == -1 and e.sign > 0)
    return e.pair if plus else -e.pair


def validate_moduli_graph(T: PositiveGraph, ds: AsymptoticDataSet) -> ValidationReport:
    rep = ValidationReport()
    if not _check_structure(T, rep, "C1"):
        return rep

    tri = T.of_kind("tri")
    tri_angles = [T.angle(v) for v in tri]
    if len(set(tri_angles)) != len(tri_angles):
        rep.add("C1", "two trivalent vertices share an angle", clause="generic")
    other = {T.angle(v) for v in T.vertices if T.valence(v) != 3}
    if other & set(tri_angles):
        rep.add("C1", "a trivalent angle coincides with a mono/bivalent angle", clause="generic")

    # label bijections
    want_mono = collections.Counter(
        [i for i, e in enumerate(ds.ends) if e.delta != 0 or e.sign < 0]
        + [POS_LABEL] * ds.c_plus + [NEG_LABEL] * ds.c_minus)
    got_mono = collections.Counter()
    for vid in T.of_kind("mono"):
        labels = T.vertices[vid].labels
        if len(labels) != 1:
            rep.add("labels", f"monovalent vertex {vid} needs exactly one label", (vid,))
            continue
        got_mono[labels[0]] += 1
        if labels[0] not in want_mono or _label_angle(ds, labels[0]) != T.angle(vid):
            rep.add("labels", f"monovalent vertex {vid} label {labels[0]!r} does not match "
                              f"its angle", (vid,))
    if got_mono != want_mono:
        rep.add("labels", "monovalent labels are not a bijection with the required elements")
    plus_idx = [i for i, e in enumerate(ds.ends) if e.delta == 0 and e.sign > 0]
    got_plus = collections.Counter()
    for vid in T.of_kind("bi"):
        labels = T.vertices[vid].labels
        got_plus.update(labels)
        if not labels or any(x not in plus_idx or element_angle(ds.ends[x]) != T.angle(vid)
                             for x in labels):
            rep.add("labels", f"bivalent vertex {vid} has a bad partition subset {labels!r}", (vid,))
    if got_plus != collections.Counter(plus_idx):
        rep.add("labels", "bivalent subsets do not partition the (0,+) elements")
    if not rep.ok:
        return rep

    # edge-label rules
    for vid in T.of_kind("mono"):
        e = T.incident(vid)[0]
        ref = T.vertices[vid].labels[0]
        want = _mono_label_pair(ds, ref, T.lower(e) == vid, not T.angle(vid).is_pole)
        if e.q != want:
            rep.add("C2", f"monovalent vertex {vid}: edge label {e.q!r}, expected {want!r}",
                    (vid,), "monovalent")
    for vid in T.of_kind("bi"):
        want = sum((ds.ends[x].pair for x in T.vertices[vid].labels), ZERO)
        if T.vertex_pair(vid) != want:
            rep.add("C2", f"bivalent vertex {vid}: Q_below - Q_above = {T.vertex_pair(vid)!r}, "
                          f"expected {want!r}", (vid,), "bivalent")
    _check_trivalent_sums(T, rep, "C2")
    _check_positivity(T, rep, "C3", ds)

    c = counts(ds)
    if len(tri) != c.n_minus + c.n_hat + c.c_hat - 2:
        rep.add("counts", f"{len(tri)} trivalent vertices, expected "
                          f"{c.n_minus + c.n_hat + c.c_hat - 2}")
    return rep


# ---------------------------------------------------------------------------
# serialization


def graph_to_json(T: PositiveGraph, ds: AsymptoticDataSet, kind: str = "moduli") -> dict:
    verts = []
    for vid in sorted(T.vertices):
        v = T.vertices[vid]
        doc = {"id": vid, "kind": T.kind(vid), "angle": graphio.angle_to_json(v.angle)}
        if T.valence(vid) == 2:
            doc["partition"] = list(v.labels)
        elif T.valence(vid) == 1:
            doc["label"] = list(v.labels)
        verts.append(doc)
    edges = [{"id": e.id, "src": e.u, "dst": e.v, "q": e.q.p, "qp": e.q.pp}
             for e in sorted(T.edges.values(), key=lambda e: e.id)]
    return {"kind": kind, "dataset": ds.to_json(), "vertices": verts, "edges": edges}


def graph_from_json(doc: dict) -> tuple[PositiveGraph, AsymptoticDataSet]:
    ds = AsymptoticDataSet.from_json(doc["dataset"])
    T = PositiveGraph()
    for v in doc["vertices"]:
        labels = v.get("label", v.get("partition", []))
        T.add_vertex(graphio.angle_from_json(v["angle"]), tuple(labels), vid=int(v["id"]))
    for e in sorted(doc["edges"], key=lambda e: e.get("id", 0)):
        T.add_edge(int(e["src"]), int(e["dst"]), IntegerPair(int(e["q"]), int(e["qp"])))
    return T, ds


def graph_to_dot(T: PositiveGraph) -> str:
    lines = ["graph T {"]
    for vid in sorted(T.vertices):
        v = T.vertices[vid]
        lab = f"{v.angle!r}" + (f" {list(v.labels)}" if v.labels else "")
        lines.append(f'  v{vid} [label="{lab}"];')
    for e in sorted(T.edges.values(), key=lambda e: e.id):
        lines.append(f'  v{e.u} -- v{e.v} [label="{e.q!r}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
