"""Seeded random data sets for property tests and benchmarks."""

from __future__ import annotations

import random
from typing import Optional

from .algebra import ZERO, Angle, IntegerPair, alpha_zeros, defines_angle
from .dataset import AsymptoticDataSet, EndTuple, end_is_admissible
from .linegraph import decide_nonempty


def random_pair(rng: random.Random, bound: int = 5) -> IntegerPair:
    while True:
        P = IntegerPair(rng.randint(-bound, bound), rng.randint(-bound, bound))
        if not P.is_zero():
            return P


def random_angle_pair(rng: random.Random, bound: int = 5) -> IntegerPair:
    while True:
        P = random_pair(rng, bound)
        if defines_angle(P):
            return P.primitive()


def random_data_set(rng: random.Random, max_ends: int = 5, bound: int = 4) -> AsymptoticDataSet:
    """Arbitrary, usually invalid, data sets."""
    ends = [EndTuple(rng.choice((-1, 0, 0, 1)), rng.choice((-1, 1)), random_pair(rng, bound))
            for _ in range(rng.randint(1, max_ends))]
    return AsymptoticDataSet(tuple(ends), rng.choice((0, 0, 1, 2)), rng.choice((0, 0, 1)))


def _solve_pole(rng: random.Random, R: IntegerPair, delta: int) -> Optional[list[EndTuple]]:
    """At most one pole end whose flux contribution is R, or None if impossible."""
    if R.is_zero():
        return []
    # at 0 a (1,-,P) end contributes +P and (1,+,P) contributes -P; at pi the reverse
    options = [(-1, R), (1, -R)] if delta == 1 else [(1, R), (-1, -R)]
    rng.shuffle(options)
    for sign, P in options:
        e = EndTuple(delta, sign, P)
        if end_is_admissible(e):
            return [e]
    return None


def _flux(ends: list[EndTuple], delta: int) -> IntegerPair:
    total = ZERO
    for e in ends:
        plus = (e.sign < 0) if delta == 1 else (e.sign > 0)
        total = total + (e.pair if plus else -e.pair)
    return total


def _try_nonempty(rng: random.Random, bound: int) -> Optional[AsymptoticDataSet]:
    angles = sorted({Angle.of(random_angle_pair(rng, bound)) for _ in range(rng.randint(1, 4))})
    top_pole = rng.random() < 0.6
    bottom_pole = rng.random() < 0.6 or (not top_pole and len(angles) < 2)
    if not top_pole and not bottom_pole:
        # one pole end must absorb the telescoped flux
        bottom_pole = True
    lo = 0 if bottom_pole else 1
    hi = len(angles) if top_pole else len(angles) - 1
    ends: list[EndTuple] = []

    def minus_cap(a: Angle) -> IntegerPair:
        ms = [a.pair] * rng.randint(1, 2)
        ends.extend(EndTuple(0, -1, x) for x in ms)
        return sum(ms, ZERO)

    net = ZERO
    for a in angles[lo:hi]:
        kind = rng.choice(("plus", "plus", "minus", "both"))
        plus = [a.pair.scale(rng.randint(1, 2))] if kind != "minus" else []
        minus = [a.pair] * (rng.randint(1, 2) if kind != "plus" else 0)
        ends += [EndTuple(0, 1, x) for x in plus] + [EndTuple(0, -1, x) for x in minus]
        net = net + sum(plus, ZERO) - sum(minus, ZERO)

    c_plus = c_minus = 0
    if not top_pole:
        top_q = -minus_cap(angles[-1])
    else:
        c_minus = rng.randint(0, 2)
        free = [EndTuple(-1, rng.choice((-1, 1)), random_pair(rng, bound))
                for _ in range(rng.randint(0, 1))]
        free = [e for e in free if end_is_admissible(e)]
        if bottom_pole:
            ends += free
            top_q = _flux(free, -1) - IntegerPair(0, c_minus)
    if not bottom_pole:
        bot_q = minus_cap(angles[0])
        top_q = bot_q - net
        extra = _solve_pole(rng, top_q + IntegerPair(0, c_minus), -1)
        if extra is None:
            return None
        ends += extra
    else:
        bot_q = top_q + net
        c_plus = rng.randint(0, 2)
        extra = _solve_pole(rng, bot_q + IntegerPair(0, c_plus), 1)
        if extra is None:
            return None
        ends += extra
    if not ends:
        return None
    rng.shuffle(ends)
    return AsymptoticDataSet(tuple(ends), c_plus, c_minus)


def random_nonempty_data_set(rng: random.Random, bound: int = 3,
                             max_tries: int = 10000) -> AsymptoticDataSet:
    """Sample data sets that admit a positive line graph (built line-graph first)."""
    for _ in range(max_tries):
        ds = _try_nonempty(rng, bound)
        if ds is not None and decide_nonempty(ds).nonempty:
            return ds
    raise RuntimeError("could not sample a nonempty data set")


# ---------------------------------------------------------------------------
# inverse zipper moves, used to produce positive graphs that need Moves 1-3


def _lone_edge(T, o: int):
    a = T.angle(o)
    es = T.incident(o)
    up = [e for e in es if T.angle(e.other(o)) > a]
    down = [e for e in es if T.angle(e.other(o)) < a]
    if len(up) == 1:
        return +1, up[0], down
    return -1, down[0], up


def _unzip(T, o: int, rng: random.Random):
    """Push trivalent o back across the vertex on its lone edge (inverse of Moves 1-3)."""
    d, e, side = _lone_edge(T, o)
    u = e.other(o)
    depth = max(len(v.angle.offsets) for v in T.vertices.values())
    rng.shuffle(side)
    (e1, e2), (c1, c2) = side, [x.other(o) for x in side]
    G = T.copy()
    if T.kind(u) == "bi":
        f = next(x for x in T.incident(u) if x.id != e.id)
        w = f.other(u)
        P = T.vertex_pair(u)
        split = rng.random() < 0.5 and P.primitive() != P
        G.remove_vertex(o)
        G.remove_edge(f.id)
        G.add_vertex(T.angle(u).nudge(d, depth), vid=o)
        G.add_edge(o, w, f.q)
        # bivalent pair is Q_below - Q_above, i.e. Q_side - Q_toward_o for d=+1
        if not split:
            G.add_edge(u, c1, e1.q)
            G.add_edge(o, u, f.q - e2.q)
            G.add_edge(o, c2, e2.q)
            return G
        g = P.primitive()
        k = P.p // g.p if g.p else P.pp // g.pp
        P1 = g.scale(rng.randint(1, k - 1))
        P2 = P - P1
        labels = T.vertices[u].labels
        G.remove_vertex(u)
        b1 = G.add_vertex(T.angle(u), labels[:1])
        b2 = G.add_vertex(T.angle(u), labels[1:])
        G.add_edge(b1, c1, e1.q)
        G.add_edge(b2, c2, e2.q)
        G.add_edge(o, b1, e1.q - P1.scale(d))
        G.add_edge(o, b2, e2.q - P2.scale(d))
        return G
    if T.kind(u) == "tri":
        du, eu, uside = _lone_edge(T, u)
        if du == d or eu.id != e.id:
            return None
        rng.shuffle(uside)
        (e1u, e3u) = uside
        G.remove_vertex(o)
        G.remove_vertex(u)
        G.add_vertex(T.angle(u).nudge(d, depth), vid=o)
        G.add_vertex(T.angle(u), vid=u)
        G.add_edge(o, e1u.other(u), e1u.q)
        G.add_edge(o, c1, e1.q)
        G.add_edge(o, u, e1u.q - e1.q)
        G.add_edge(u, e3u.other(u), e3u.q)
        G.add_edge(u, c2, e2.q)
        return G
    return None


def scramble(T, ds: AsymptoticDataSet, rng: random.Random, steps: int = 20):
    """Apply random valid inverse moves; every returned graph validates for ``ds``."""
    from .moduligraph import validate_positive_graph

    G = T
    for _ in range(steps):
        tri = G.of_kind("tri")
        if not tri:
            break
        o = rng.choice(tri)
        H = _unzip(G, o, rng)
        if H is not None and validate_positive_graph(H, ds).ok:
            G = H
    return G


# ---------------------------------------------------------------------------
# chart specs


def random_chart_spec(rng: random.Random, bound: int = 3):
    """A chart over a random arc where alpha_Q > 0, with random tables and eps*alpha_Q < 1/2."""
    import numpy as np

    from .geometry import alpha_q
    from .sampler import ChartSpec

    while True:
        Q = random_pair(rng, bound)
        zs = sorted({0.0, np.pi} | {z.base_value() for z in alpha_zeros(Q)})
        arcs = [(a, b) for a, b in zip(zs, zs[1:]) if alpha_q(Q, 0.5 * (a + b)) > 0]
        if arcs:
            break
    a, b = rng.choice(arcs)
    margin = 0.05 * (b - a) + 0.02
    lo = a + margin + rng.random() * 0.2 * (b - a)
    hi = b - margin - rng.random() * 0.2 * (b - a)
    knots = sorted(rng.uniform(lo, hi) for _ in range(4))

    def table(scale):
        return [[k, rng.uniform(-scale, scale)] for k in knots]

    eps = [[k, rng.uniform(0.1, 1.0)] for k in knots]
    spec = ChartSpec(Q, lo, hi, a0=table(1.0), w0=table(0.5), v0=table(3.0), eps=eps)
    # rescale eps (a cubic may overshoot its table) so that eps*alpha_Q peaks at 0.45
    grid = np.linspace(lo, hi, 4001)
    peak = float(np.max(spec.eps(grid) * alpha_q(Q, grid)))
    low = float(np.min(spec.eps(grid)))
    if low <= 0:
        eps = [[k, e - low + 0.05] for k, e in eps]
        spec = ChartSpec(Q, lo, hi, a0=spec.a0, w0=spec.w0, v0=spec.v0, eps=eps)
        peak = float(np.max(spec.eps(grid) * alpha_q(Q, grid)))
    eps = [[k, e * 0.45 / peak] for k, e in eps]
    return ChartSpec(Q, lo, hi, a0=spec.a0, w0=spec.w0, v0=spec.v0, eps=eps)
