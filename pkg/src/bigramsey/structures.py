"""Finite ordered binary relational structures.

The universe of a structure of size ``m`` is always ``0..m-1`` and the
linear order is the natural order on those indices, so an order-preserving
bijection between two structures of equal size is unique.  Relations are
stored as frozensets of ordered pairs, one per relation symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

Pair = tuple[int, int]


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    symbols: tuple[str, ...]
    symmetric: tuple[bool, ...]
    irreflexive: tuple[bool, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("signature needs at least one relation symbol")
        if not (len(self.symbols) == len(self.symmetric) == len(self.irreflexive)):
            raise ValueError("flag lists must match the symbol list in length")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate relation symbol")

    @classmethod
    def single(cls, name: str = "R0", symmetric: bool = False, irreflexive: bool = True) -> "Signature":
        return cls((name,), (symmetric,), (irreflexive,))

    def is_symmetric(self, symbol: str) -> bool:
        return self.symmetric[self.symbols.index(symbol)]

    def is_irreflexive(self, symbol: str) -> bool:
        return self.irreflexive[self.symbols.index(symbol)]

    def to_json(self) -> dict:
        return {
            "symbols": list(self.symbols),
            "symmetric": list(self.symmetric),
            "irreflexive": list(self.irreflexive),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Signature":
        symbols = tuple(data["symbols"])
        symmetric = tuple(bool(x) for x in data.get("symmetric", [False] * len(symbols)))
        irreflexive = tuple(bool(x) for x in data.get("irreflexive", [True] * len(symbols)))
        return cls(symbols, symmetric, irreflexive)


@dataclass(frozen=True)
class RelStruct:
    """A structure on ``0..size-1`` with one set of ordered pairs per symbol."""

    size: int
    relations: Mapping[str, frozenset]

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("negative size")
        rels = {sym: frozenset((int(a), int(b)) for a, b in pairs)
                for sym, pairs in self.relations.items()}
        for sym, pairs in rels.items():
            for a, b in pairs:
                if not (0 <= a < self.size and 0 <= b < self.size):
                    raise IndexError(f"pair ({a},{b}) of {sym} outside universe of size {self.size}")
        object.__setattr__(self, "relations", dict(sorted(rels.items())))

    @classmethod
    def empty(cls, size: int, sig: Signature) -> "RelStruct":
        return cls(size, {sym: frozenset() for sym in sig.symbols})

    @classmethod
    def build(cls, size: int, sig: Signature, pairs: Mapping[str, Iterable[Pair]] | None = None) -> "RelStruct":
        """Structure over ``sig``; symbols missing from ``pairs`` get no pairs."""
        pairs = pairs or {}
        unknown = set(pairs) - set(sig.symbols)
        if unknown:
            raise SignatureMismatch(f"unknown symbols {sorted(unknown)}")
        return cls(size, {sym: frozenset(pairs.get(sym, ())) for sym in sig.symbols})

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.relations)

    def holds(self, symbol: str, a: int, b: int) -> bool:
        return (a, b) in self.relations[symbol]

    def pair_code(self, a: int, b: int) -> tuple[bool, ...]:
        """Relation bits between ``a`` and ``b`` in both directions, per symbol."""
        out = []
        for pairs in self.relations.values():
            out.append((a, b) in pairs)
            out.append((b, a) in pairs)
        return tuple(out)

    def key(self) -> tuple:
        return (self.size, tuple((sym, tuple(sorted(p))) for sym, p in self.relations.items()))

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other: "RelStruct") -> bool:
        return self.key() < other.key()

    def relabel(self, perm: Sequence[int]) -> "RelStruct":
        """Send point ``i`` to ``perm[i]``; ``perm`` must be a permutation."""
        return RelStruct(self.size, {
            sym: frozenset((perm[a], perm[b]) for a, b in pairs)
            for sym, pairs in self.relations.items()
        })

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "relations": {sym: [list(p) for p in sorted(pairs)] for sym, pairs in self.relations.items()},
        }

    def __str__(self):
        body = "; ".join(f"{sym}={sorted(p)}" for sym, p in self.relations.items())
        return f"RelStruct({self.size}: {body})"


@dataclass(frozen=True)
class Embedding:
    """Strictly increasing map ``i -> map[i]`` of a smaller structure into a larger one."""

    map: tuple[int, ...]

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.map, self.map[1:])):
            raise ValueError("embedding must be strictly increasing")


def structure_from_json(data: Mapping, sig: Signature) -> tuple[RelStruct, list[str]]:
    """Parse structure JSON, closing symmetric symbols.

    Returns the structure and the symbols whose pair sets had to be closed
    symmetrically.
    """
    if not isinstance(data, Mapping) or "size" not in data:
        raise ValueError("structure JSON needs a 'size' field")
    size = data["size"]
    if not isinstance(size, int) or isinstance(size, bool) or size < 0:
        raise ValueError("'size' must be a natural number")
    raw = data.get("relations", {})
    unknown = set(raw) - set(sig.symbols)
    if unknown:
        raise SignatureMismatch(f"unknown symbols {sorted(unknown)}")
    rels: dict[str, set] = {}
    closed = []
    for sym, flag in zip(sig.symbols, sig.symmetric):
        pairs = set()
        for p in raw.get(sym, []):
            if len(p) != 2:
                raise ValueError(f"malformed pair {p!r}")
            pairs.add((int(p[0]), int(p[1])))
        if flag:
            full = pairs | {(b, a) for a, b in pairs}
            if full != pairs:
                closed.append(sym)
            pairs = full
        rels[sym] = pairs
    return RelStruct.build(size, sig, rels), closed


def validate(s: RelStruct, sig: Signature) -> list[str]:
    violations = []
    if set(s.relations) != set(sig.symbols):
        violations.append(f"symbols {sorted(s.relations)} differ from signature {list(sig.symbols)}")
        return violations
    for sym, symm, irr in zip(sig.symbols, sig.symmetric, sig.irreflexive):
        pairs = s.relations[sym]
        for a, b in sorted(pairs):
            if not (0 <= a < s.size and 0 <= b < s.size):
                violations.append(f"{sym}: pair ({a},{b}) out of range")
            if irr and a == b:
                violations.append(f"{sym}: loop at {a} under irreflexive symbol")
            if symm and (b, a) not in pairs:
                violations.append(f"{sym}: ({a},{b}) present but ({b},{a}) missing")
    return violations


def induced_substructure(s: RelStruct, subset: Sequence[int]) -> RelStruct:
    subset = list(subset)
    if len(set(subset)) != len(subset):
        raise ValueError("subset indices must be distinct")
    for i in subset:
        if not 0 <= i < s.size:
            raise IndexError(f"index {i} out of range for size {s.size}")
    if any(a >= b for a, b in zip(subset, subset[1:])):
        raise ValueError("subset must be increasing")
    pos = {v: k for k, v in enumerate(subset)}
    return RelStruct(len(subset), {
        sym: frozenset((pos[a], pos[b]) for a, b in pairs if a in pos and b in pos)
        for sym, pairs in s.relations.items()
    })


def _check_same_signature(a: RelStruct, b: RelStruct):
    if set(a.relations) != set(b.relations):
        raise SignatureMismatch(f"{sorted(a.relations)} vs {sorted(b.relations)}")


def _compatible(a: RelStruct, b: RelStruct, i: int, j: int, bi: int, bj: int) -> bool:
    for sym in a.relations:
        pa, pb = a.relations[sym], b.relations[sym]
        if ((i, j) in pa) != ((bi, bj) in pb):
            return False
        if ((j, i) in pa) != ((bj, bi) in pb):
            return False
    return True


def iter_embeddings(a: RelStruct, b: RelStruct) -> Iterator[Embedding]:
    """Increasing induced embeddings of ``a`` into ``b``, lexicographic by image."""
    _check_same_signature(a, b)
    m, n = a.size, b.size
    image: list[int] = []

    def extend(start: int) -> Iterator[Embedding]:
        k = len(image)
        if k == m:
            yield Embedding(tuple(image))
            return
        # leave room for the m-k-1 points still to be placed
        for c in range(start, n - (m - k) + 1):
            if not _compatible(a, b, k, k, c, c):
                continue
            if all(_compatible(a, b, i, k, image[i], c) for i in range(k)):
                image.append(c)
                yield from extend(c + 1)
                image.pop()

    yield from extend(0)


def find_embeddings(a: RelStruct, b: RelStruct) -> list[Embedding]:
    return list(iter_embeddings(a, b))


def embeds(a: RelStruct, b: RelStruct) -> bool:
    return next(iter_embeddings(a, b), None) is not None


def is_isomorphic(a: RelStruct, b: RelStruct) -> bool:
    _check_same_signature(a, b)
    return a.size == b.size and a.relations == b.relations


def unordered_embedding(a: RelStruct, b: RelStruct) -> tuple[int, ...] | None:
    """First induced embedding of ``a`` into ``b`` ignoring the linear order.

    Used for Forb-style membership where forbidden structures carry no order.
    """
    _check_same_signature(a, b)
    m, n = a.size, b.size
    image: list[int] = []
    used = [False] * n

    def extend() -> tuple[int, ...] | None:
        k = len(image)
        if k == m:
            return tuple(image)
        for c in range(n):
            if used[c] or not _compatible(a, b, k, k, c, c):
                continue
            if all(_compatible(a, b, i, k, image[i], c) for i in range(k)):
                image.append(c)
                used[c] = True
                found = extend()
                if found is not None:
                    return found
                used[c] = False
                image.pop()
        return None

    return extend()
