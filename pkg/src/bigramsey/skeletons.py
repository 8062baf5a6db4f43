"""Type skeletons, strong isomorphism and type enumeration.

A skeleton is a planar tree whose leaves ``l0 .. l{m-1}`` are read left to
right, whose internal nodes have at least two children, and whose internal
nodes are strictly ordered by level (``rank``), ancestors first.  It is the
shape of a diagonal copy of ``m`` branches: internal nodes are the meets and
ranks order them by length.  Together with the structure induced on the
leaves, a skeleton is exactly a strong-isomorphism class.

Canonical text form::

    SKEL := "l" INDEX | "(" RANK ":" SKEL (" " SKEL)+ ")"
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from .classes import ClassSpec, ClassViolation, membership
from .structures import RelStruct, is_isomorphic
from .tmax import Copy, induced_structure

Tree = Union[int, tuple]  # leaf index, or (rank, (child, child, ...))


class NonDiagonalCopy(ValueError):
    """Two incomparable meets of a copy have the same length."""


def _encode(t: Tree) -> str:
    if isinstance(t, int):
        return f"l{t}"
    rank, children = t
    return f"({rank}: " + " ".join(_encode(c) for c in children) + ")"


def _sort_key(t: Tree) -> tuple:
    if isinstance(t, int):
        return (0, t)
    rank, children = t
    return (1, rank) + tuple(_sort_key(c) for c in children)


def _leaves(t: Tree) -> list[int]:
    if isinstance(t, int):
        return [t]
    return [leaf for c in t[1] for leaf in _leaves(c)]


def _internals(t: Tree, parent: int | None = None) -> Iterator[tuple[int, int | None, tuple]]:
    if isinstance(t, int):
        return
    rank, children = t
    yield rank, parent, children
    for c in children:
        yield from _internals(c, rank)


@dataclass(frozen=True)
class Skeleton:
    root: Tree
    leaves: int

    def __post_init__(self):
        if _leaves(self.root) != list(range(self.leaves)):
            raise ValueError("leaves must read l0..l{m-1} from left to right")
        ranks = []
        for rank, parent, children in _internals(self.root):
            if len(children) < 2:
                raise ValueError("internal nodes need at least two children")
            if parent is not None and parent >= rank:
                raise ValueError("ancestors must have smaller rank")
            ranks.append(rank)
        if sorted(ranks) != list(range(len(ranks))):
            raise ValueError("ranks must be 0..k-1")

    def encode(self) -> str:
        return _encode(self.root)

    def __str__(self):
        return self.encode()

    def sort_key(self) -> tuple:
        return _sort_key(self.root)

    def __lt__(self, other: "Skeleton") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def internal_count(self) -> int:
        return sum(1 for _ in _internals(self.root))

    def internal_nodes(self) -> list[tuple[int, list[list[int]]]]:
        """(rank, leaf sets of the children in planar order), sorted by rank."""
        out = [(rank, [_leaves(c) for c in children]) for rank, _, children in _internals(self.root)]
        return sorted(out)

    @classmethod
    def parse(cls, text: str) -> "Skeleton":
        tokens = re.findall(r"\(|\)|:|l\d+|\d+|\S", text)
        pos = 0

        def take(expected=None):
            nonlocal pos
            if pos >= len(tokens):
                raise ValueError(f"unexpected end of skeleton {text!r}")
            tok = tokens[pos]
            if expected is not None and tok != expected:
                raise ValueError(f"expected {expected!r} at token {pos} of {text!r}, got {tok!r}")
            pos += 1
            return tok

        def parse_tree() -> Tree:
            tok = take()
            if re.fullmatch(r"l\d+", tok):
                return int(tok[1:])
            if tok != "(":
                raise ValueError(f"unexpected token {tok!r} in {text!r}")
            rank = take()
            if not rank.isdigit():
                raise ValueError(f"expected a rank, got {rank!r}")
            take(":")
            children = [parse_tree()]
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(parse_tree())
            take(")")
            return (int(rank), tuple(children))

        tree = parse_tree()
        if pos != len(tokens):
            raise ValueError(f"trailing tokens in {text!r}")
        skel = cls(tree, len(_leaves(tree)))
        if skel.encode() != " ".join(text.split()):
            raise ValueError(f"{text!r} is not in canonical form")
        return skel


# --- shape generation ---------------------------------------------------

def _compositions(lo: int, hi: int) -> Iterator[list[tuple[int, int]]]:
    """Splits of leaves lo..hi-1 into at least two consecutive blocks."""
    n = hi - lo
    for cuts in range(1, n):
        for pts in itertools.combinations(range(lo + 1, hi), cuts):
            bounds = (lo,) + pts + (hi,)
            yield [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def _rank_assignments(shape) -> Iterator[Tree]:
    """All rankings of an unranked shape that put ancestors first."""
    # shape: leaf int, or ("N", children)
    paths = []

    def collect(s, path):
        if isinstance(s, int):
            return
        paths.append(path)
        for i, c in enumerate(s[1]):
            collect(c, path + (i,))

    collect(shape, ())
    index = {p: k for k, p in enumerate(paths)}
    parent = {index[p]: (index[p[:-1]] if p else None) for p in paths}

    def extensions(placed: list[int]) -> Iterator[list[int]]:
        if len(placed) == len(paths):
            yield list(placed)
            return
        done = set(placed)
        for k in range(len(paths)):
            if k not in done and (parent[k] is None or parent[k] in done):
                placed.append(k)
                yield from extensions(placed)
                placed.pop()

    for order in extensions([]):
        rank_of = {k: r for r, k in enumerate(order)}

        def build(s, path):
            if isinstance(s, int):
                return s
            return (rank_of[index[path]], tuple(build(c, path + (i,)) for i, c in enumerate(s[1])))

        yield build(shape, ())


def _shapes(lo: int, hi: int, accept) -> list:
    @lru_cache(maxsize=None)
    def rec(lo: int, hi: int) -> tuple:
        if hi - lo == 1:
            return (lo,)
        out = []
        for blocks in _compositions(lo, hi):
            if not accept(blocks):
                continue
            for combo in itertools.product(*(rec(a, b) for a, b in blocks)):
                out.append(("N", combo))
        return tuple(out)

    return list(rec(lo, hi))


def _skeletons_from(m: int, accept) -> list[Skeleton]:
    out = []
    for shape in _shapes(0, m, accept):
        for tree in _rank_assignments(shape):
            out.append(Skeleton(tree, m))
    return sorted(out)


def skeletons(m: int) -> list[Skeleton]:
    if m < 1:
        raise ValueError("need at least one leaf")
    return _skeletons_from(m, lambda blocks: True)


# --- types of copies ----------------------------------------------------

def type_of(c: Copy) -> Skeleton:
    nodes = c.nodes
    if not nodes:
        raise ValueError("empty copy")
    levels: list[int] = []

    def build(idxs: list[int]) -> tuple:
        if len(idxs) == 1:
            return idxs[0]
        first = nodes[idxs[0]]
        depth = min(next((n for n, (a, b) in enumerate(zip(first, nodes[i])) if a != b)) for i in idxs[1:])
        groups = [list(g) for _, g in itertools.groupby(idxs, key=lambda i: nodes[i][depth])]
        levels.append(depth)
        return ("N", depth, tuple(build(g) for g in groups))

    shape = build(list(range(len(nodes))))
    if len(set(levels)) != len(levels):
        raise NonDiagonalCopy(f"incomparable meets share a level in {[str(n) for n in nodes]}")
    rank_of = {lv: r for r, lv in enumerate(sorted(levels))}

    def ranked(s):
        if isinstance(s, int):
            return s
        return (rank_of[s[1]], tuple(ranked(ch) for ch in s[2]))

    return Skeleton(ranked(shape), len(nodes))


def is_diagonal(c: Copy) -> bool:
    try:
        type_of(c)
    except NonDiagonalCopy:
        return False
    return True


def strongly_isomorphic(c1: Copy, c2: Copy) -> bool:
    t1, t2 = type_of(c1), type_of(c2)
    if len(c1) != len(c2):
        return False
    return t1 == t2 and is_isomorphic(induced_structure(c1), induced_structure(c2))


# --- realizability ------------------------------------------------------

@dataclass(frozen=True)
class Realizability:
    ok: bool
    certificate: dict

    def __bool__(self):
        return self.ok


def _children_structure(h: RelStruct, blocks: list[list[int]]):
    """Children structure of a node, or the first undetermined (i, j, symbol)."""
    k = len(blocks)
    rels = {sym: set() for sym in h.relations}
    for i, j in itertools.permutations(range(k), 2):
        for sym, pairs in h.relations.items():
            vals = {(u, v) in pairs for u in blocks[i] for v in blocks[j]}
            if len(vals) > 1:
                return None, (i, j, sym)
            if vals.pop():
                rels[sym].add((i, j))
    return RelStruct(k, rels), None


def check_realizable(skel: Skeleton, h: RelStruct, c: ClassSpec) -> Realizability:
    if skel.leaves != h.size:
        raise ValueError(f"skeleton has {skel.leaves} leaves, structure has {h.size} points")
    if not membership(h, c):
        raise ClassViolation(f"{h} is not in {c.name}")
    children = {}
    for rank, blocks in skel.internal_nodes():
        sub, bad = _children_structure(h, blocks)
        if bad is not None:
            i, j, sym = bad
            return Realizability(False, {"reason": "undetermined", "node": rank, "children": [i, j], "symbol": sym})
        if not membership(sub, c):
            return Realizability(False, {"reason": "class", "node": rank, "structure": sub.to_json()})
        children[rank] = sub
    return Realizability(True, {"children": {r: s.to_json() for r, s in children.items()}})


def enumerate_types(h: RelStruct, c: ClassSpec) -> list[Skeleton]:
    """Realizable skeletons for ``h`` in canonical order; their number is T(h, F_max).

    Shapes are generated top-down and pruned with the same two local
    conditions as :func:`check_realizable`, which do not depend on ranks.
    """
    if not membership(h, c):
        raise ClassViolation(f"{h} is not in {c.name}")

    def accept(blocks) -> bool:
        sub, bad = _children_structure(h, [list(range(a, b)) for a, b in blocks])
        return bad is None and membership(sub, c)

    return _skeletons_from(h.size, accept)
