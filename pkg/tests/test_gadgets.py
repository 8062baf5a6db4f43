import pytest
from hypothesis import given, settings, strategies as st

from bigramsey.classes import ClassSpec, ClassViolation, members, membership
from bigramsey.gadgets import (
    Gadget,
    build_gadget,
    build_gadget_free,
    build_gadget_opo,
    build_gadget_ot,
    verify_gadget,
)
from bigramsey.oracle import RealizationFailure, RealizationProblem, realize
from bigramsey.skeletons import skeletons
from bigramsey.structures import induced_substructure, is_isomorphic

from conftest import CLASSES, chain_for, digraph, graph
from strategies import class_members


def test_free_single_vertex_directed():
    g = build_gadget_free(digraph(1, []), ClassSpec.oog())
    assert g.extended.size == 3
    assert g.extended.relations["R0"] == {(0, 2)}
    assert g.host == (1,)


def test_free_single_edge_graph():
    g = build_gadget_free(graph(2, [(0, 1)]), ClassSpec.og())
    assert g.extended.size == 5
    undirected = {tuple(sorted(p)) for p in g.extended.relations["R0"]}
    assert undirected == {(0, 2), (2, 4), (1, 3)}


def test_ot_single_vertex():
    g = build_gadget_ot(digraph(1, []))
    assert g.extended.relations["R0"] == {(0, 2), (1, 0), (2, 1)}


def test_ot_backward_arrow_between_far_evens():
    g = build_gadget_ot(digraph(2, [(0, 1)]))
    assert g.extended.size == 5
    assert (4, 0) in g.extended.relations["R0"]
    assert (0, 4) not in g.extended.relations["R0"]


def test_opo_sizes_and_scaffold():
    chain3 = digraph(3, [(0, 1), (1, 2), (0, 2)])
    assert build_gadget_opo(chain3).extended.size == 9
    g = build_gadget_opo(digraph(2, []))
    r = g.extended.relations["R0"]
    assert g.extended.size == 7 and g.host == (2, 4)
    assert {(0, 3), (1, 5), (3, 6)} <= r
    assert (0, 6) in r  # transitivity through v_3
    scaffold = set(range(7)) - set(g.host)
    assert not any((a in g.host) != (b in g.host) for a, b in r)
    assert all(a in scaffold for a, _ in r)


def test_opo_trivial_single_point():
    g = build_gadget_opo(digraph(1, []))
    assert g.trivial and g.extended == g.base


def test_flavor_dispatch():
    assert build_gadget(graph(1, []), ClassSpec.og_k(3)).flavor == "free"
    assert build_gadget(digraph(1, []), ClassSpec.ot()).flavor == "ot"
    assert build_gadget(digraph(2, []), ClassSpec.opo()).flavor == "opo"
    with pytest.raises(ValueError):
        build_gadget_free(digraph(1, []), ClassSpec.ot())


def test_non_members_rejected():
    with pytest.raises(ClassViolation):
        build_gadget_ot(digraph(2, []))
    with pytest.raises(ClassViolation):
        build_gadget_opo(digraph(2, [(1, 0)]))


def test_forb_gadget_failure_is_reported():
    # forbidding a single arrow leaves only edgeless structures; the scaffold adds arrows
    spec = ClassSpec.forb([digraph(2, [(0, 1)])])
    with pytest.raises(ClassViolation, match="forbidden copy"):
        build_gadget_free(digraph(1, []), spec)


@pytest.mark.parametrize("name", sorted(CLASSES))
@given(data=st.data())
@settings(max_examples=30, deadline=None)
def test_gadget_invariants(name, data):
    spec = CLASSES[name]
    h = data.draw(class_members(spec, max_size=5, min_size=1))
    g = build_gadget(h, spec)
    assert membership(g.extended, spec)
    assert is_isomorphic(induced_substructure(g.extended, g.host), h)
    m = h.size
    expected = m if g.trivial else (2 * m + 3 if g.flavor == "opo" else 2 * m + 1)
    assert g.extended.size == expected


@pytest.mark.parametrize("name,sizes", [("og", (1, 2)), ("og_3", (1, 2)), ("oog", (1, 2)), ("ot", (1, 2)), ("opo", (2,))])
def test_single_splitting_node(name, sizes):
    spec = CLASSES[name]
    for m in sizes:
        for h in members(spec, m):
            g = build_gadget(h, spec)
            report = verify_gadget(g, spec)
            assert report.ok and report.single_node
            assert report.skeletons == ["(0: " + " ".join(f"l{i}" for i in range(g.extended.size)) + ")"]


def test_raw_confirmation_for_three_vertex_gadget():
    spec = ClassSpec.og()
    g = build_gadget(graph(1, []), spec)
    report = verify_gadget(g, spec, 5, chain_for("og"))
    assert report.oracle_mode == "raw"
    assert report.oracle_types == ["(0: l0 l1 l2)"]  # copies exist, so the check is not vacuous
    assert report.oracle_single and report.non_diagonal_seen == 0


@pytest.mark.parametrize("name,depth", [("og", 9), ("ot", 6)])
def test_backtracking_confirmation(name, depth):
    spec = CLASSES[name]
    h = graph(2, []) if name == "og" else digraph(1, [])
    report = verify_gadget(build_gadget(h, spec), spec, depth, chain_for(name), raw=False)
    assert report.oracle_types and report.oracle_single


def test_opo_multi_node_skeletons_fail_to_realize():
    spec = ClassSpec.opo()
    chain = chain_for("opo")
    g = build_gadget(digraph(2, [(0, 1)]), spec)
    reasons = set()
    for s in skeletons(7):
        if s.internal_count == 1:
            continue
        with pytest.raises(RealizationFailure) as e:
            realize(RealizationProblem(s, g.extended, spec, chain, 12))
        reasons.add(e.value.reason)
    assert reasons <= {"undetermined", "no-embedding"}


def test_report_json():
    spec = ClassSpec.ot()
    data = verify_gadget(build_gadget(digraph(1, []), spec), spec, 6, chain_for("ot")).to_json()
    assert data["ok"] and data["oracle"]["mode"] == "backtrack"
    assert data["oracle"]["types"] == ["(0: l0 l1 l2)"]
    assert data["skeletons"] == ["(0: l0 l1 l2)"]
    g = build_gadget(digraph(1, []), spec)
    assert isinstance(g, Gadget) and g.to_json()["flavor"] == "ot"


def test_report_for_non_member():
    g = build_gadget(graph(2, [(0, 1)]), ClassSpec.og())
    report = verify_gadget(g, ClassSpec.og_k(3))
    assert report.member  # a path and a single edge are triangle free
    tri = Gadget(graph(3, [(0, 1), (1, 2), (0, 2)]), graph(3, [(0, 1), (1, 2), (0, 2)]), (0, 1, 2), "free")
    bad = verify_gadget(tri, ClassSpec.og_k(3))
    assert not bad.member and not bad.ok
