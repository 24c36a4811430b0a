"""Zipper moves on positive graphs and linearization to a positive line graph.

A trivalent vertex o in V+ has one edge e toward larger angles and two edges
e', e'' toward smaller ones; a move pushes o down past the nearest vertex on
e' or e'' (the blocker at angle theta_hat) or eliminates o.  Vertices in V-
are handled by the same code with the angle order reversed.  The moved
trivalent vertex keeps its id, which lets the driver follow it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..algebra import Angle
from ..dataset import AsymptoticDataSet, angle_spectrum
from ..linegraph import PositiveLineGraph
from .graph import PositiveGraph


class MoveError(ValueError):
    """No move applies to the chosen vertex."""


@dataclass
class MoveResult:
    graph: PositiveGraph
    move: int
    active: Optional[int]  # id of the moved trivalent vertex, None once eliminated


def _direction(T: PositiveGraph, o: int) -> int:
    """+1 when o is in V+ (one edge up), -1 when in V- (one edge down)."""
    a = T.angle(o)
    up = sum(1 for e in T.incident(o) if T.angle(e.other(o)) > a)
    if up == 1:
        return +1
    if up == 2:
        return -1
    raise MoveError(f"vertex {o} is not between its neighbours")


def _depth(T: PositiveGraph) -> int:
    return max((len(v.angle.offsets) for v in T.vertices.values()), default=0)


def _far_edge(T: PositiveGraph, b: int, e_id: int):
    """The other edge of bivalent vertex b."""
    return next(e for e in T.incident(b) if e.id != e_id)


def apply_move_ex(T: PositiveGraph, o: int) -> MoveResult:
    if T.valence(o) != 3:
        raise MoveError(f"vertex {o} is not trivalent")
    d = _direction(T, o)
    ao = T.angle(o)

    def ahead(x: Angle) -> bool:  # x lies on the far side of o (where e' and e'' go)
        return x < ao if d > 0 else x > ao

    es = T.incident(o)
    e = next(x for x in es if not ahead(T.angle(x.other(o))))
    side = [x for x in es if x.id != e.id]
    u = e.other(o)
    opp = [x.other(o) for x in side]
    near = max(T.angle(x) for x in opp) if d > 0 else min(T.angle(x) for x in opp)
    hit = [i for i in (0, 1) if T.angle(opp[i]) == near]
    kinds = sorted(T.kind(opp[i]) for i in hit)
    past = near.nudge(-d, _depth(T))

    G = T.copy()
    if len(hit) == 1:
        i = hit[0]
        blk, eb = opp[i], side[i]
        ex, ax = side[1 - i], opp[1 - i]
        kind = T.kind(blk)
        if kind == "bi":  # Move 1
            f = _far_edge(T, blk, eb.id)
            c = f.other(blk)
            G.remove_vertex(o)
            G.remove_edge(f.id)
            G.add_vertex(past, vid=o)
            G.add_edge(o, ax, ex.q)
            G.add_edge(o, c, f.q)
            G.add_edge(o, blk, ex.q + f.q)
            G.add_edge(blk, u, e.q)
            return MoveResult(G, 1, o)
        if kind == "tri":  # Move 3
            rest = [x for x in T.incident(blk) if x.id != eb.id]
            fwd = [x for x in rest if (T.angle(x.other(blk)) < near) == (d > 0)]
            if len(fwd) != 1:
                raise MoveError(f"blocker {blk} does not have a single edge ahead")
            e4 = fwd[0]
            e3 = next(x for x in rest if x.id != e4.id)
            a3, a4 = e3.other(blk), e4.other(blk)
            G.remove_vertex(o)
            G.remove_vertex(blk)
            G.add_vertex(past, vid=o)
            G.add_vertex(near, vid=blk)
            G.add_edge(o, ax, ex.q)
            G.add_edge(o, a4, e4.q)
            G.add_edge(o, blk, ex.q + e4.q)
            G.add_edge(blk, u, e.q)
            G.add_edge(blk, a3, e3.q)
            return MoveResult(G, 3, o)
        if kind == "mono":  # Move 4
            G.remove_vertex(o)
            G.remove_vertex(blk)
            b = G.add_vertex(near, T.vertices[blk].labels)
            G.add_edge(b, ax, ex.q)
            G.add_edge(b, u, e.q)
            return MoveResult(G, 4, None)
        raise MoveError(f"unexpected blocker kind {kind}")

    b0, b1 = opp
    if kinds == ["bi", "bi"]:  # Move 2
        f0, f1 = _far_edge(T, b0, side[0].id), _far_edge(T, b1, side[1].id)
        c0, c1 = f0.other(b0), f1.other(b1)
        labels = T.vertices[b0].labels + T.vertices[b1].labels
        for x in (o, b0, b1):
            G.remove_vertex(x)
        G.add_vertex(past, vid=o)
        b = G.add_vertex(near, labels)
        G.add_edge(o, c0, f0.q)
        G.add_edge(o, c1, f1.q)
        G.add_edge(o, b, f0.q + f1.q)
        G.add_edge(b, u, e.q)
        return MoveResult(G, 2, o)
    if kinds == ["bi", "mono"]:  # Move 5
        i = 0 if T.kind(b0) == "bi" else 1
        bi, mono = opp[i], opp[1 - i]
        f = _far_edge(T, bi, side[i].id)
        c = f.other(bi)
        labels = T.vertices[bi].labels + T.vertices[mono].labels
        for x in (o, bi, mono):
            G.remove_vertex(x)
        b = G.add_vertex(near, labels)
        G.add_edge(b, c, f.q)
        G.add_edge(b, u, e.q)
        return MoveResult(G, 5, None)
    if kinds == ["mono", "mono"]:  # Move 6 (interior) or Move 7 (pole)
        labels = T.vertices[b0].labels + T.vertices[b1].labels
        for x in (o, b0, b1):
            G.remove_vertex(x)
        m = G.add_vertex(near, labels)
        G.add_edge(m, u, e.q)
        return MoveResult(G, 7 if near.is_pole else 6, None)
    raise MoveError(f"no move for blockers of kinds {kinds}")


def apply_move(T: PositiveGraph, o: int) -> PositiveGraph:
    """One rewrite step on trivalent vertex o."""
    return apply_move_ex(T, o).graph


def _select(T: PositiveGraph) -> Optional[int]:
    plus, minus = [], []
    for v in T.of_kind("tri"):
        (plus if _direction(T, v) > 0 else minus).append(v)
    if plus:
        return min(plus, key=lambda v: (T.angle(v), v))
    if minus:
        # largest angle first; ties by id
        best = minus[0]
        for v in minus[1:]:
            if T.angle(v) > T.angle(best):
                best = v
        return best
    return None


def linearize_graph(T: PositiveGraph,
                    callback: Optional[Callable[[MoveResult], None]] = None,
                    max_moves: int = 100000) -> PositiveGraph:
    """Apply moves until no trivalent vertex remains; returns the linear graph."""
    G = T
    steps = 0
    while True:
        o = _select(G)
        if o is None:
            return G
        active: Optional[int] = o
        while active is not None:
            res = apply_move_ex(G, active)
            G, active = res.graph, res.active
            steps += 1
            if callback is not None:
                callback(res)
            if steps > max_moves:
                raise MoveError("move budget exhausted")


def to_line_graph(T: PositiveGraph, ds: AsymptoticDataSet) -> PositiveLineGraph:
    """Read off a trivalent-free positive graph as a line graph over the angle set."""
    if T.of_kind("tri"):
        raise ValueError("graph still has trivalent vertices")
    order = sorted(T.vertices, key=lambda v: (T.angle(v), v))
    spec = {e.angle: e for e in angle_spectrum(ds)}
    if [T.angle(v) for v in order] != sorted(spec):
        raise ValueError("vertex angles do not match the angle set")
    labels = []
    for lo, hi in zip(order, order[1:]):
        e = next((T.edges[x] for x in T.adj[lo] if T.edges[x].other(lo) == hi), None)
        if e is None:
            raise ValueError("graph is not a path in angle order")
        labels.append(e.q)
    return PositiveLineGraph(tuple(spec[T.angle(v)] for v in order), tuple(labels))


def linearize(T: PositiveGraph, ds: AsymptoticDataSet,
              callback: Optional[Callable[[MoveResult], None]] = None) -> PositiveLineGraph:
    return to_line_graph(linearize_graph(T, callback), ds)
