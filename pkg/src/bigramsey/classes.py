"""Fraisse-class descriptors: membership and one-point extensions.

Supported kinds: ``og`` (ordered graphs), ``og_k`` (ordered k-clique-free
graphs), ``oog`` (ordered oriented graphs), ``ot`` (ordered tournaments),
``opo`` (partial orders with a linear extension) and ``forb`` (ordered
expansions of Forb(F) for a finite set F of irreducible structures).

Forb membership ignores the linear order: forbidden structures live in the
order-free reduct, so a forbidden structure may appear in any order.  This
differs from :func:`bigramsey.structures.find_embeddings`, which is
order-preserving.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .structures import (
    RelStruct,
    Signature,
    SignatureMismatch,
    induced_substructure,
    structure_from_json,
    unordered_embedding,
    validate,
)

KINDS = ("og", "og_k", "oog", "ot", "opo", "forb")

# state bits for the pair (new point, old point) under one symbol
OUT = 1  # R(new, old)
IN = 2  # R(old, new)


class ClassViolation(ValueError):
    """A structure is not a member of the class it was used with."""


@dataclass(frozen=True)
class ClassSpec:
    kind: str
    signature: Signature
    k: int | None = None
    forbidden: tuple[RelStruct, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown class kind {self.kind!r}")
        sig = self.signature
        if self.kind in ("og", "og_k"):
            if len(sig.symbols) != 1 or not sig.symmetric[0] or not sig.irreflexive[0]:
                raise ValueError(f"{self.kind} needs one symmetric irreflexive symbol")
        if self.kind in ("oog", "ot", "opo"):
            if len(sig.symbols) != 1 or sig.symmetric[0] or not sig.irreflexive[0]:
                raise ValueError(f"{self.kind} needs one irreflexive directed symbol")
        if self.kind == "og_k" and (self.k is None or self.k < 3):
            raise ValueError("og_k needs k >= 3")
        if self.kind == "forb":
            for f in self.forbidden:
                if set(f.relations) != set(sig.symbols):
                    raise SignatureMismatch("forbidden structure over a different signature")
                if validate(f, sig):
                    raise ValueError(f"forbidden structure violates signature: {validate(f, sig)}")
                if not is_irreducible(f):
                    raise ValueError(f"forbidden structure {f} is not irreducible")

    @classmethod
    def og(cls) -> "ClassSpec":
        return cls("og", Signature.single(symmetric=True))

    @classmethod
    def og_k(cls, k: int) -> "ClassSpec":
        return cls("og_k", Signature.single(symmetric=True), k=k)

    @classmethod
    def oog(cls) -> "ClassSpec":
        return cls("oog", Signature.single())

    @classmethod
    def ot(cls) -> "ClassSpec":
        return cls("ot", Signature.single())

    @classmethod
    def opo(cls) -> "ClassSpec":
        return cls("opo", Signature.single())

    @classmethod
    def forb(cls, forbidden: Sequence[RelStruct], signature: Signature | None = None) -> "ClassSpec":
        return cls("forb", signature or Signature.single(), forbidden=tuple(forbidden))

    @property
    def is_free(self) -> bool:
        return self.kind in ("og", "og_k", "oog", "forb")

    @property
    def name(self) -> str:
        return f"og_{self.k}" if self.kind == "og_k" else self.kind

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "og_k":
            out["k"] = self.k
        if self.kind == "forb":
            out["forbidden"] = [f.to_json() for f in self.forbidden]
            out["signature"] = self.signature.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ClassSpec":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ValueError("class JSON needs a 'kind' field")
        kind = data["kind"]
        if kind == "og":
            return cls.og()
        if kind == "og_k":
            k = data.get("k")
            if not isinstance(k, int) or k < 3:
                raise ValueError("og_k needs an integer k >= 3")
            return cls.og_k(k)
        if kind in ("oog", "ot", "opo"):
            return getattr(cls, kind)()
        if kind == "forb":
            sig = Signature.from_json(data["signature"]) if "signature" in data else Signature.single()
            forbidden = [structure_from_json(f, sig)[0] for f in data.get("forbidden", [])]
            return cls.forb(forbidden, sig)
        raise ValueError(f"unknown class kind {kind!r}")


@dataclass(frozen=True, order=True)
class ExtensionDescriptor:
    """How a new point attaches to an existing structure of size ``len(states)``.

    ``rank`` is the insertion position in the linear order (0..m).  ``states[i]``
    holds one state per symbol for the pair (new point, old point ``i``): bit
    ``OUT`` for R(new, i), bit ``IN`` for R(i, new).  ``loops`` is only ever
    true for symbols that are not irreflexive.
    """

    rank: int
    loops: tuple[bool, ...]
    states: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"rank": self.rank, "loops": list(self.loops), "states": [list(s) for s in self.states]}

    @classmethod
    def from_json(cls, data: Mapping) -> "ExtensionDescriptor":
        return cls(data["rank"], tuple(data["loops"]), tuple(tuple(s) for s in data["states"]))


def is_irreducible(f: RelStruct) -> bool:
    for a, b in itertools.combinations(range(f.size), 2):
        if not any((a, b) in p or (b, a) in p for p in f.relations.values()):
            return False
    return True


def clique(k: int) -> RelStruct:
    sig = Signature.single(symmetric=True)
    return RelStruct.build(k, sig, {"R0": [(a, b) for a in range(k) for b in range(k) if a != b]})


def _has_clique(s: RelStruct, k: int) -> bool:
    edges = s.relations["R0"]
    nbrs = [{b for a, b in edges if a == v} for v in range(s.size)]

    def grow(chosen: list[int], cands: set[int]) -> bool:
        if len(chosen) == k:
            return True
        for v in sorted(cands):
            if v > (chosen[-1] if chosen else -1) and grow(chosen + [v], cands & nbrs[v]):
                return True
        return False

    return grow([], set(range(s.size)))


def forbidden_witness(s: RelStruct, c: ClassSpec) -> tuple[int, tuple[int, ...]] | None:
    """(index into ``c.forbidden``, image) of the first forbidden copy in ``s``."""
    for idx, f in enumerate(c.forbidden):
        if f.size > s.size:
            continue
        img = unordered_embedding(f, s)
        if img is not None:
            return idx, img
    return None


def membership(s: RelStruct, c: ClassSpec) -> bool:
    if set(s.relations) != set(c.signature.symbols):
        raise SignatureMismatch(f"structure symbols {sorted(s.relations)} vs class {list(c.signature.symbols)}")
    if validate(s, c.signature):
        return False
    if c.kind == "og":
        return True
    if c.kind == "og_k":
        return not _has_clique(s, c.k)
    if c.kind == "forb":
        return forbidden_witness(s, c) is None
    r = s.relations["R0"]
    if c.kind in ("oog", "ot"):
        if any((b, a) in r for a, b in r):
            return False
        if c.kind == "ot":
            return all((a, b) in r or (b, a) in r for a, b in itertools.combinations(range(s.size), 2))
        return True
    # opo: strict order compatible with the linear order; i<j also gives antisymmetry
    if any(a >= b for a, b in r):
        return False
    succ = [{b for a, b in r if a == v} for v in range(s.size)]
    return all(succ[b] <= succ[a] for a, b in r)


def apply_extension(s: RelStruct, desc: ExtensionDescriptor) -> RelStruct:
    """Insert a new point at position ``desc.rank``; the result is order-canonical."""
    m = s.size
    if len(desc.states) != m or not 0 <= desc.rank <= m:
        raise ValueError("descriptor does not fit the structure")
    r = desc.rank
    shift = [i if i < r else i + 1 for i in range(m)]
    rels = {}
    for si, (sym, pairs) in enumerate(s.relations.items()):
        new = {(shift[a], shift[b]) for a, b in pairs}
        for i, st in enumerate(desc.states):
            if st[si] & OUT:
                new.add((r, shift[i]))
            if st[si] & IN:
                new.add((shift[i], r))
        if desc.loops[si]:
            new.add((r, r))
        rels[sym] = frozenset(new)
    return RelStruct(m + 1, rels)


def _symbol_options(sig: Signature) -> list[tuple[int, ...]]:
    return [(0, OUT | IN) if symm else (0, OUT, IN, OUT | IN) for symm in sig.symmetric]


def _point_options(s: RelStruct, c: ClassSpec, i: int, before: bool, loops: tuple[bool, ...]) -> list[tuple[int, ...]]:
    # hereditary prune: the 2-point structure {i, new} must already be in the class
    single = induced_substructure(s, [i])
    out = []
    for st in itertools.product(*_symbol_options(c.signature)):
        d = ExtensionDescriptor(0 if before else 1, loops, (st,))
        if membership(apply_extension(single, d), c):
            out.append(st)
    return out


def iter_extensions(s: RelStruct, c: ClassSpec) -> Iterator[ExtensionDescriptor]:
    """Valid one-point extensions in (rank, loops, states) order."""
    if not membership(s, c):
        raise ClassViolation(f"{s} is not in {c.name}")
    sig = c.signature
    loop_opts = [(False,) if irr else (False, True) for irr in sig.irreflexive]
    empty = RelStruct.empty(0, sig)
    for rank in range(s.size + 1):
        for loops in itertools.product(*loop_opts):
            if not membership(apply_extension(empty, ExtensionDescriptor(0, loops, ())), c):
                continue
            opts = [_point_options(s, c, i, i >= rank, loops) for i in range(s.size)]
            for states in itertools.product(*opts):
                d = ExtensionDescriptor(rank, loops, tuple(states))
                if membership(apply_extension(s, d), c):
                    yield d


def one_point_extensions(s: RelStruct, c: ClassSpec) -> list[ExtensionDescriptor]:
    return list(iter_extensions(s, c))


def all_structures(m: int, sig: Signature) -> Iterator[RelStruct]:
    """Every structure on ``m`` points respecting the signature flags."""
    pairs = list(itertools.combinations(range(m), 2))
    pair_opts = _symbol_options(sig)
    loop_opts = [(False,) if irr else (False, True) for irr in sig.irreflexive]
    for loops in itertools.product(*(loop_opts * m)):
        for states in itertools.product(*(list(itertools.product(*pair_opts)) for _ in pairs)):
            rels = {sym: set() for sym in sig.symbols}
            for (a, b), st in zip(pairs, states):
                for si, sym in enumerate(sig.symbols):
                    if st[si] & OUT:
                        rels[sym].add((a, b))
                    if st[si] & IN:
                        rels[sym].add((b, a))
            for v in range(m):
                for si, sym in enumerate(sig.symbols):
                    if loops[v * len(sig.symbols) + si]:
                        rels[sym].add((v, v))
            yield RelStruct.build(m, sig, rels)


def members(c: ClassSpec, m: int) -> list[RelStruct]:
    return [s for s in all_structures(m, c.signature) if membership(s, c)]
