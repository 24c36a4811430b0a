import collections
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holosphere.algebra import ANGLEPI, Angle, IntegerPair
from holosphere.dataset import make
from holosphere.generate import random_nonempty_data_set, scramble
from holosphere.linegraph import build_candidate_line_graph, decide_nonempty
from holosphere.moduligraph import (MoveError, PositiveGraph, apply_move, apply_move_ex,
                                    expand_to_moduli_graph, float_angles, graph_from_json,
                                    graph_to_dot, graph_to_json, linearize, linearize_graph,
                                    validate_moduli_graph, validate_positive_graph)

P = IntegerPair


def line_as_graph(L):
    T = PositiveGraph()
    ids = [T.add_vertex(v.angle, v.plus_elements if 0 < i < len(L.vertices) - 1 else v.elements)
           for i, v in enumerate(L.vertices)]
    for i, Q in enumerate(L.edges):
        T.add_edge(ids[i], ids[i + 1], Q)
    return T


@pytest.fixture
def double_top():
    # two (0,-,(1,1)) ends at the top angle and two (0,-,(0,1)) at the bottom
    return make([(0, "-", (1, 1)), (0, "-", (1, 1)), (0, "+", (1, 2)), (0, "+", (1, 2)),
                 (0, "-", (0, 1)), (0, "-", (0, 1))])


@pytest.fixture
def pi_cluster():
    return make([(-1, "+", (-1, -2)), (0, "-", (-1, -3))], c_minus=1)


def test_line_graph_is_positive_graph(pants):
    T = line_as_graph(build_candidate_line_graph(pants))
    assert validate_positive_graph(T, pants).ok


def test_bracket_zero_bivalent_fails(pants):
    L = build_candidate_line_graph(pants)
    T = line_as_graph(L)
    # relabel both edges so the bivalent pair stays (1,2) but the lower label is parallel to it
    e0, e1 = sorted(T.edges)
    T.edges[e0] = T.edges[e0].__class__(e0, T.edges[e0].u, T.edges[e0].v, P(1, 2))
    T.edges[e1] = T.edges[e1].__class__(e1, T.edges[e1].u, T.edges[e1].v, P(0, 0))
    rep = validate_positive_graph(T, pants)
    assert "5.7" in rep.rules


def test_equal_adjacent_angles_fail(cylinder):
    T = PositiveGraph()
    a = Angle.of(P(1, 1))
    T.add_edge(T.add_vertex(a, (0,)), T.add_vertex(a, (1,)), P(1, 1))
    assert "5.6" in validate_positive_graph(T, cylinder).rules


def test_expand_pants(pants):
    T = expand_to_moduli_graph(build_candidate_line_graph(pants), pants)
    kinds = collections.Counter(T.kind(v) for v in T.vertices)
    assert kinds == {"bi": 1, "mono": 2}
    bi = T.of_kind("bi")[0]
    assert T.vertices[bi].labels == (2,)
    assert validate_moduli_graph(T, pants).ok


def test_expand_double_top(double_top):
    v = decide_nonempty(double_top)
    assert v.nonempty
    T = expand_to_moduli_graph(v.witness, double_top)
    top = v.witness.angles[-1]
    near_top = [x for x in T.of_kind("tri") if T.angle(x).base == top]
    assert len(near_top) == 1
    assert len([x for x in T.of_kind("mono") if T.angle(x) == top]) == 2
    assert validate_moduli_graph(T, double_top).ok


def test_expand_pi_cluster(pi_cluster):
    v = decide_nonempty(pi_cluster)
    T = expand_to_moduli_graph(v.witness, pi_cluster)
    tri = [x for x in T.of_kind("tri") if T.angle(x).base == ANGLEPI]
    assert len(tri) == 1
    assert validate_moduli_graph(T, pi_cluster).ok
    L = linearize(T, pi_cluster)
    assert L.signature() == v.witness.signature()


def test_delta_bounds(double_top):
    L = decide_nonempty(double_top).witness
    T = expand_to_moduli_graph(L, double_top)
    assert 0 < T.delta <= 1e-3
    with pytest.raises(ValueError, match="too large"):
        expand_to_moduli_graph(L, double_top, delta=1.0)
    vals = float_angles(T, T.delta)
    order = sorted(T.vertices, key=lambda x: T.angle(x))
    assert [vals[x] for x in order] == sorted(vals.values())


def test_moduli_validator_negatives(double_top):
    L = decide_nonempty(double_top).witness
    T = expand_to_moduli_graph(L, double_top)
    # drop one monovalent label
    m = T.of_kind("mono")[0]
    v = T.vertices[m]
    T.vertices[m] = v.__class__(v.id, v.angle, ())
    assert not validate_moduli_graph(T, double_top).ok


def test_moduli_validator_missing_pole_label():
    ds = make([(0, "-", (0, 1))], c_plus=1)
    v = decide_nonempty(ds)
    T = expand_to_moduli_graph(v.witness, ds)
    assert validate_moduli_graph(T, ds).ok
    m = next(x for x in T.of_kind("mono") if T.angle(x).is_pole)
    T.vertices[m] = T.vertices[m].__class__(m, T.angle(m), ())
    assert "labels" in validate_moduli_graph(T, ds).rules


def test_move6_merges_monovalent_branches(double_top):
    L = decide_nonempty(double_top).witness
    T = expand_to_moduli_graph(L, double_top)
    bottom = L.angles[0]
    o = next(x for x in T.of_kind("tri") if T.angle(x).base == bottom)
    res = apply_move_ex(T, o)
    assert res.move == 6 and res.active is None
    G = res.graph
    monos = [x for x in G.of_kind("mono") if G.angle(x) == bottom]
    assert len(monos) == 1
    assert sorted(G.vertices[monos[0]].labels) == [4, 5]
    # the merged vertex carries +Q of its edge: the sum of both (0,-) pairs
    assert G.vertex_pair(monos[0]) == P(0, 2)
    assert validate_positive_graph(G, double_top).ok


def test_move_on_non_trivalent_raises(pants):
    T = expand_to_moduli_graph(build_candidate_line_graph(pants), pants)
    with pytest.raises(MoveError):
        apply_move(T, T.of_kind("bi")[0])


def test_linearize_trivalent_free_is_identity(pants):
    T = line_as_graph(build_candidate_line_graph(pants))
    G = linearize_graph(T)
    assert graph_to_json(G, pants) == graph_to_json(T, pants)


def _move_checks(ds, T):
    seen = collections.Counter()

    def cb(res):
        seen[res.move] += 1
        assert validate_positive_graph(res.graph, ds).ok, res.move

    L = linearize(T, ds, cb)
    return L, seen


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip(seed):
    rng = random.Random(seed)
    ds = random_nonempty_data_set(rng)
    v = decide_nonempty(ds)
    if v.one_angle:
        return
    T = expand_to_moduli_graph(v.witness, ds)
    assert validate_moduli_graph(T, ds).ok
    L, _ = _move_checks(ds, T)
    assert L.signature() == v.witness.signature()


def test_scrambled_graphs_exercise_all_moves():
    rng = random.Random(3)
    total = collections.Counter()
    for _ in range(120):
        ds = random_nonempty_data_set(rng)
        v = decide_nonempty(ds)
        if v.one_angle:
            continue
        T = scramble(expand_to_moduli_graph(v.witness, ds), ds, rng, 25)
        assert validate_positive_graph(T, ds).ok
        L, seen = _move_checks(ds, T)
        assert L.signature() == v.witness.signature()
        total.update(seen)
    assert set(total) == {1, 2, 3, 4, 5, 6, 7}


def test_move2_and_move4_bookkeeping():
    rng = random.Random(11)
    found = set()
    for _ in range(200):
        ds = random_nonempty_data_set(rng)
        v = decide_nonempty(ds)
        if v.one_angle:
            continue
        T = scramble(expand_to_moduli_graph(v.witness, ds), ds, rng, 25)
        state = {"G": T}

        def cb(res):
            before, after = state["G"], res.graph
            if res.move == 2:
                # o keeps its id; the merged bivalent vertex carries the sum of both pairs
                o = res.active
                near = [e.other(o) for e in before.incident(o) if before.kind(e.other(o)) == "bi"]
                new_bi = [x for x in after.of_kind("bi") if x not in before.vertices]
                assert len(new_bi) == 1
                want = before.vertex_pair(near[0]) + before.vertex_pair(near[1])
                assert after.vertex_pair(new_bi[0]) == want
                found.add(2)
            if res.move == 4:
                assert len(after.of_kind("tri")) == len(before.of_kind("tri")) - 1
                assert len(after.of_kind("mono")) == len(before.of_kind("mono")) - 1
                found.add(4)
            state["G"] = after

        linearize(T, ds, cb)
        if found == {2, 4}:
            break
    assert found == {2, 4}


def test_graph_json_round_trip(double_top):
    T = expand_to_moduli_graph(decide_nonempty(double_top).witness, double_top)
    doc = json.loads(json.dumps(graph_to_json(T, double_top)))
    T2, ds = graph_from_json(doc)
    assert ds == double_top
    assert graph_to_json(T2, ds) == doc
    assert "--" in graph_to_dot(T)
    assert any(v.get("partition") for v in doc["vertices"] if v["kind"] == "bi")
