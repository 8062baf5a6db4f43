import itertools

from hypothesis import strategies as st

from bigramsey.classes import ClassSpec, membership
from bigramsey.structures import RelStruct


@st.composite
def structures(draw, spec: ClassSpec, max_size: int = 5, min_size: int = 0):
    """Random structures over the class signature; not necessarily members."""
    m = draw(st.integers(min_size, max_size))
    pairs = set()
    for a, b in itertools.combinations(range(m), 2):
        if spec.signature.symmetric[0]:
            if draw(st.booleans()):
                pairs |= {(a, b), (b, a)}
        else:
            pairs |= {(a, b), (b, a)}.intersection(draw(st.sampled_from([set(), {(a, b)}, {(b, a)}, {(a, b), (b, a)}])))
    return RelStruct(m, {"R0": pairs})


@st.composite
def class_members(draw, spec: ClassSpec, max_size: int = 5, min_size: int = 0):
    """Members of the class built by greedy repair of random draws."""
    m = draw(st.integers(min_size, max_size))
    pairs: set = set()
    for b in range(m):
        for a in range(b):
            opts = [set(), {(a, b)}] if spec.kind == "opo" else (
                [set(), {(a, b), (b, a)}] if spec.signature.symmetric[0] else [set(), {(a, b)}, {(b, a)}])
            choice = draw(st.sampled_from(opts))
            trial = RelStruct(b + 1, {"R0": pairs | choice})
            if spec.kind == "ot" or membership(_partial(trial, spec), spec):
                pairs |= choice
    s = RelStruct(m, {"R0": pairs})
    if spec.kind == "ot":
        s = RelStruct(m, {"R0": pairs | {(a, b) for a, b in itertools.combinations(range(m), 2)
                                         if (a, b) not in pairs and (b, a) not in pairs}})
    if spec.kind == "opo":
        s = RelStruct(m, {"R0": _closure(s.relations["R0"])})
    return s


def _partial(s: RelStruct, spec: ClassSpec) -> RelStruct:
    return RelStruct(s.size, {"R0": _closure(s.relations["R0"])}) if spec.kind == "opo" else s


def _closure(pairs):
    out = set(pairs)
    while True:
        new = {(a, d) for a, b in out for c, d in out if b == c} - out
        if not new:
            return out
        out |= new
