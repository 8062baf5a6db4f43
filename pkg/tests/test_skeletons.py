import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bigramsey.classes import ClassSpec, ClassViolation, members
from bigramsey.skeletons import (
    NonDiagonalCopy,
    Skeleton,
    check_realizable,
    enumerate_types,
    is_diagonal,
    skeletons,
    strongly_isomorphic,
    type_of,
)
from bigramsey.tmax import Copy, Node, induced_structure, meet

from conftest import CLASSES, chain_for, graph
from strategies import class_members


def copy_from_meets(lengths: list[int]) -> Copy:
    """Branches whose consecutive meets sit at (scaled) positions ``lengths``."""
    m = len(lengths) + 1
    size = m + 2 * (max(lengths, default=0) + 1)
    x = [0] * size
    out = [Node(x)]
    for a in lengths:
        p = m + 2 * a
        x = x[:p] + [x[p] + 1] + [0] * (size - p - 1)
        out.append(Node(x))
    return Copy(tuple(out))


def skeletons_from_meet_sequences(m: int) -> set[str]:
    found = set()
    for seq in itertools.product(range(m - 1), repeat=m - 1):
        c = copy_from_meets(list(seq))
        if is_diagonal(c):
            found.add(type_of(c).encode())
    return found


def test_three_leaf_listing():
    assert [s.encode() for s in skeletons(3)] == [
        "(0: l0 l1 l2)", "(0: l0 (1: l1 l2))", "(0: (1: l0 l1) l2)"]


@pytest.mark.parametrize("m", range(1, 7))
def test_skeletons_match_meet_sequences(m):
    got = [s.encode() for s in skeletons(m)]
    assert len(got) == len(set(got))
    assert set(got) == skeletons_from_meet_sequences(m)


def test_small_counts():
    assert [len(skeletons(m)) for m in range(1, 5)] == [1, 1, 3, 12]


@pytest.mark.parametrize("m", range(1, 6))
def test_parse_round_trip(m):
    for s in skeletons(m):
        assert Skeleton.parse(s.encode()) == s


@pytest.mark.parametrize("text", [
    "(0: l1 l0)", "(1: l0 l1)", "(0:l0 l1)", "(0: l0)", "(0: (0: l0 l1) l2)",
    "(1: (0: l0 l1) l2)", "(0: l0 l1", "l0 l1", "(0: l0 l1))", "(0: (1: l0 l1) (1: l2 l3))",
])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        Skeleton.parse(text)


def test_type_of_three_branches():
    c = Copy((Node((0, 0, 0, 0)), Node((0, 1, 0, 0)), Node((0, 1, 1, 1))))
    assert type_of(c).encode() == "(0: l0 (1: l1 l2))"


def test_non_diagonal_copy_rejected():
    # two sibling pairs split at the same level below different nodes
    c = Copy((Node((0, 0, 0, 0)), Node((0, 0, 0, 1)), Node((0, 0, 1, 0)), Node((0, 0, 1, 1))))
    with pytest.raises(NonDiagonalCopy):
        type_of(c)
    assert not is_diagonal(c)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4), st.integers(0, 3))
def test_type_invariant_under_extension(seq, extra):
    c = copy_from_meets(seq)
    if is_diagonal(c):
        assert type_of(c.extend(c.length + extra)) == type_of(c)


def _strongly_isomorphic_by_definition(c1: Copy, c2: Copy) -> bool:
    if len(c1) != len(c2) or induced_structure(c1) != induced_structure(c2):
        return False
    pairs = list(itertools.combinations(range(len(c1)), 2))

    def lengths(c):
        return {p: len(meet(c.nodes[p[0]], c.nodes[p[1]])) for p in pairs}

    l1, l2 = lengths(c1), lengths(c2)
    return all((l1[p] <= l1[q]) == (l2[p] <= l2[q]) for p in pairs for q in pairs)


@given(st.integers(2, 4).flatmap(lambda m: st.tuples(
    st.sets(st.tuples(*[st.integers(0, i) for i in range(5)]), min_size=m, max_size=m),
    st.sets(st.tuples(*[st.integers(0, i) for i in range(5)]), min_size=m, max_size=m))))
@settings(max_examples=200)
def test_strong_isomorphism_matches_definition(pair):
    chain = chain_for("og")
    c1, c2 = (Copy(tuple(Node(n) for n in sorted(ns)), chain) for ns in pair)
    if is_diagonal(c1) and is_diagonal(c2):
        assert strongly_isomorphic(c1, c2) == _strongly_isomorphic_by_definition(c1, c2)


def test_check_realizable_certificates():
    og = ClassSpec.og()
    path = graph(3, [(0, 1), (1, 2)])
    bad = check_realizable(Skeleton.parse("(0: l0 (1: l1 l2))"), path, og)
    assert not bad and bad.certificate["reason"] == "undetermined"
    good = check_realizable(Skeleton.parse("(0: l0 l1 l2)"), path, og)
    assert good and good.certificate["children"][0]["size"] == 3
    # a triangle between children violates og_3 even though it is determined
    k3_free = ClassSpec.og_k(3)
    h = graph(4, [(0, 2), (1, 2), (2, 3)])
    res = check_realizable(Skeleton.parse("(0: (1: l0 l1) l2 l3)"), h, k3_free)
    assert res.ok
    with pytest.raises(ClassViolation):
        check_realizable(Skeleton.parse("(0: l0 l1 l2)"), graph(3, [(0, 1), (1, 2), (0, 2)]), k3_free)
    with pytest.raises(ValueError):
        check_realizable(Skeleton.parse("(0: l0 l1)"), path, og)


def test_class_obstruction():
    # in opo the children structure of (1: l0 l1) -> l2 must itself be an ordered partial order
    opo = ClassSpec.opo()
    for h in members(opo, 3):
        for s in skeletons(3):
            res = check_realizable(s, h, opo)
            if not res.ok:
                assert res.certificate["reason"] in {"undetermined", "class"}


@pytest.mark.parametrize("name", sorted(CLASSES))
@given(data=st.data())
@settings(max_examples=25, deadline=None)
def test_enumerate_equals_brute_filter(name, data):
    spec = CLASSES[name]
    h = data.draw(class_members(spec, max_size=5, min_size=1))
    brute = [s for s in skeletons(h.size) if check_realizable(s, h, spec)]
    got = enumerate_types(h, spec)
    assert got == brute
    flat = "(0: " + " ".join(f"l{i}" for i in range(h.size)) + ")" if h.size > 1 else "l0"
    assert flat in {s.encode() for s in got}


def test_enumerate_rejects_non_members():
    with pytest.raises(ClassViolation):
        enumerate_types(graph(3, [(0, 1), (1, 2), (0, 2)]), ClassSpec.og_k(3))


def test_edgeless_graph_has_every_skeleton():
    for m in range(1, 6):
        assert len(enumerate_types(graph(m, []), ClassSpec.og())) == len(skeletons(m))
