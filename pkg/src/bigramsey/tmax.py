"""The coding tree T_max and relations between its branches.

A node of length ``n`` has ``n + 1`` successors ``t+<0>, ..., t+<n>``, so a
node is a sequence whose ``i``-th entry is at most ``i``.  The successors of
any node of length ``n`` carry the level structure ``levels[n]`` of a
:class:`~bigramsey.flim.LimitChain`, and two branches are related exactly when
their successors just past the meet are related there.

Branches are represented by finite truncations of a common length; all type
and relation data of a finite copy is decided below its deepest meet.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .flim import ChainTooShort, LimitChain
from .structures import RelStruct


class Node(tuple):
    """An immutable node of T_max; validity ``t[i] <= i`` is checked on construction."""

    def __new__(cls, entries: Iterable[int] = ()):
        entries = tuple(int(e) for e in entries)
        for i, e in enumerate(entries):
            if not 0 <= e <= i:
                raise ValueError(f"entry {e} at position {i} violates t(i) <= i")
        return super().__new__(cls, entries)

    def __str__(self):
        return "<" + ",".join(map(str, self)) + ">"

    def __repr__(self):
        return f"Node({str(self)})"

    @classmethod
    def parse(cls, text: str) -> "Node":
        m = re.fullmatch(r"\s*<\s*([0-9,\s]*)>\s*", text)
        if not m:
            raise ValueError(f"malformed node {text!r}")
        body = m.group(1).strip()
        return cls(int(x) for x in body.split(",")) if body else cls()

    def restrict(self, n: int) -> "Node":
        return Node(self[:n])


def successors(t: Node) -> list[Node]:
    return [Node(t + (k,)) for k in range(len(t) + 1)]


def level_count(n: int) -> int:
    if n < 0:
        raise ValueError("level must be >= 0")
    return math.factorial(n)


def level_nodes(n: int) -> Iterator[Node]:
    """All nodes of length ``n`` in lexicographic order."""
    for entries in itertools.product(*(range(i + 1) for i in range(n))):
        yield Node(entries)


def meet(x: Sequence[int], y: Sequence[int]) -> Node:
    if len(x) != len(y):
        raise ValueError("meet needs nodes of equal length")
    for n, (a, b) in enumerate(zip(x, y)):
        if a != b:
            return Node(x[:n])
    raise ValueError("meet of a node with itself")


@dataclass(frozen=True)
class Copy:
    """Finitely many distinct equal-length nodes in lexicographic order."""

    nodes: tuple[Node, ...]
    chain: LimitChain | None = None

    def __post_init__(self):
        nodes = tuple(n if isinstance(n, Node) else Node(n) for n in self.nodes)
        if len({len(n) for n in nodes}) > 1:
            raise ValueError("nodes of a copy must have equal length")
        if any(a >= b for a, b in zip(nodes, nodes[1:])):
            raise ValueError("nodes of a copy must be distinct and lexicographically increasing")
        object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return len(self.nodes)

    @property
    def length(self) -> int:
        return len(self.nodes[0]) if self.nodes else 0

    def drop(self, i: int) -> "Copy":
        return Copy(self.nodes[:i] + self.nodes[i + 1:], self.chain)

    def extend(self, length: int) -> "Copy":
        """Prolong every branch with zeros (always a valid successor)."""
        return Copy(tuple(Node(n + (0,) * (length - len(n))) for n in self.nodes), self.chain)

    def to_json(self) -> dict:
        return {"nodes": [list(n) for n in self.nodes]}

    @classmethod
    def from_json(cls, data: dict, chain: LimitChain | None = None) -> "Copy":
        return cls(tuple(Node(n) for n in data["nodes"]), chain)


def delta_and_crown(c: Copy) -> tuple[int, list[Node]]:
    if len(c) < 2:
        raise ValueError("delta needs at least two nodes")
    delta = max(len(meet(x, y)) for x, y in itertools.combinations(c.nodes, 2))
    if c.length <= delta:
        raise ValueError("node lengths must exceed the maximal meet length")
    return delta, [x.restrict(delta + 1) for x in c.nodes]


def eval_relation(chain: LimitChain, symbol: str, x: Sequence[int], y: Sequence[int]) -> bool:
    n = len(meet(x, y))
    if n > chain.depth:
        raise ChainTooShort(f"meet at level {n} but chain depth is {chain.depth}")
    return (x[n], y[n]) in chain.levels[n].relations[symbol]


def induced_structure(c: Copy, chain: LimitChain | None = None) -> RelStruct:
    chain = chain or c.chain
    if chain is None:
        raise ValueError("induced_structure needs a chain")
    rels = {sym: set() for sym in chain.class_spec.signature.symbols}
    for (i, x), (j, y) in itertools.permutations(enumerate(c.nodes), 2):
        for sym in rels:
            if eval_relation(chain, sym, x, y):
                rels[sym].add((i, j))
    return RelStruct(len(c), rels)
