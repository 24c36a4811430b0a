"""Expansion of a positive line graph into a moduli space graph.

Every extremal vertex with several ends becomes a fan: a chain of trivalent
vertices placed just inside the extremal angle, each capped by one labeled
monovalent vertex.  Bivalent vertices carrying (0,-) elements split into a
trivalent vertex just below the angle plus such a fan.  Offsets are exact
infinitesimal tokens; ``delta`` only fixes their advisory float values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..algebra import Angle, IntegerPair, alpha_zeros
from ..dataset import AsymptoticDataSet, SpectrumEntry
from ..linegraph import PositiveLineGraph
from .graph import NEG_LABEL, POS_LABEL, PositiveGraph


@dataclass
class _Cluster:
    below: int  # vertex meeting the edge from the cluster underneath
    above: int  # vertex meeting the edge from the cluster on top


def _caps(ds: AsymptoticDataSet, entry: SpectrumEntry, top: bool) -> list[tuple[IntegerPair, object]]:
    """(edge label, monovalent label) for each end at an extremal angle."""
    out = []
    kind = entry.angle.kind
    for i in entry.elements:
        e = ds.ends[i]
        if kind == "pair":
            out.append((-e.pair if top else e.pair, i))
        elif kind == "polePi":
            out.append((e.pair if e.sign > 0 else -e.pair, i))
        else:
            out.append((-e.pair if e.sign > 0 else e.pair, i))
    if kind == "polePi":
        out += [(IntegerPair(0, -1), NEG_LABEL)] * ds.c_minus
    elif kind == "pole0":
        out += [(IntegerPair(0, -1), POS_LABEL)] * ds.c_plus
    return out


def _fan(T: PositiveGraph, angle: Angle, caps, direction: int) -> int:
    """Build a capped chain at ``angle``; returns the vertex that receives the incoming edge.

    ``direction`` is -1 when the chain hangs below the angle (top fans) and +1
    when it sits above it (bottom fans).  Trivalent k (1-based) of m-1 sits at
    offset direction * (m - k).
    """
    m = len(caps)
    if m == 1:
        return T.add_vertex(angle, (caps[0][1],))
    chain = [T.add_vertex(angle.shifted((direction * (m - k),)))
             for k in range(1, m)]
    for k, t in enumerate(chain):
        q, label = caps[k]
        T.add_edge(t, T.add_vertex(angle, (label,)), q)
        if k + 1 < len(chain):
            rest = caps[k + 1:]
            T.add_edge(t, chain[k + 1], sum((c[0] for c in rest), IntegerPair(0, 0)))
    q, label = caps[-1]
    T.add_edge(chain[-1], T.add_vertex(angle, (label,)), q)
    return chain[0]


def _delta_bounds(T: PositiveGraph, L: PositiveLineGraph) -> tuple[float, int]:
    """Minimal gap between the relevant real angles, and the largest offset used."""
    points = {a.base_value() for a in L.angles}
    for e in T.edges.values():
        points.update(z.base_value() for z in alpha_zeros(e.q))
    pts = sorted(points)
    gaps = [b - a for a, b in zip(pts, pts[1:]) if b - a > 0]
    gap = min(gaps) if gaps else math.pi
    reach = max((abs(o) for v in T.vertices.values() for o in v.angle.offsets), default=0)
    return gap, reach


def expand_to_moduli_graph(L: PositiveLineGraph, ds: AsymptoticDataSet,
                           delta: Optional[float] = None) -> PositiveGraph:
    """Build the moduli space graph of ``L``.

    ``delta`` is the float step of the split offsets.  When omitted it is set
    to a quarter of the admissible maximum and stored on ``T.delta``.
    """
    T = PositiveGraph()
    n = len(L.vertices)
    clusters = []
    for i, entry in enumerate(L.vertices):
        a = entry.angle
        if i == 0 or i == n - 1:
            top = i == n - 1
            root = _fan(T, a, _caps(ds, entry, top), -1 if top else +1)
            clusters.append(_Cluster(root, root))
            continue
        minus = entry.minus_elements
        if not minus:
            b = T.add_vertex(a, entry.plus_elements)
            clusters.append(_Cluster(b, b))
            continue
        k = len(minus)
        split = T.add_vertex(a.shifted((-k,)))
        caps = [(-ds.ends[j].pair, j) for j in minus]
        T.add_edge(split, _fan(T, a, caps, -1), sum((c[0] for c in caps), IntegerPair(0, 0)))
        if entry.plus_elements:
            b = T.add_vertex(a, entry.plus_elements)
            # Q on the edge up to the bivalent vertex: Q_below + sum of (0,-) pairs
            T.add_edge(split, b, L.edges[i - 1] + entry.minus_sum)
            clusters.append(_Cluster(split, b))
        else:
            clusters.append(_Cluster(split, split))
    for i, Q in enumerate(L.edges):
        T.add_edge(clusters[i].above, clusters[i + 1].below, Q)
    gap, reach = _delta_bounds(T, L)
    limit = gap / (2 * reach) if reach else math.inf
    if delta is None:
        delta = min(1e-3, limit / 4)
    elif not 0 < delta <= limit:
        raise ValueError(f"delta={delta:g} too large: offsets reach {delta * reach:g} "
                         f"but half the minimal angle gap is {gap / 2:g}")
    T.delta = delta
    return T


def float_angles(T: PositiveGraph, delta: float) -> dict[int, float]:
    """Advisory float angle per vertex for the chosen delta."""
    return {vid: v.angle.value(delta) for vid, v in T.vertices.items()}
