"""Ground truth for type counts: find the types that actually occur in T_max.

Nothing here consults :func:`bigramsey.skeletons.check_realizable`.  Copies
are built from the chain's level structures and typed with
:func:`~bigramsey.skeletons.type_of`, so agreement with the enumerator is a
real cross-check.

``realized_types`` has two modes:

* ``"backtrack"`` walks down the tree level by level.  At each level at most
  one block of leaves that still share a prefix splits, into consecutive
  sub-blocks sent to increasing successors whose relations in the level
  structure match the target.  Entries at levels where a block does not split
  do not affect relations or meets, so they are set to 0.  Only diagonal copies
  are produced.
* ``"raw"`` sweeps every increasing tuple of nodes of the given length with
  numpy-vectorized pruning.  It is only feasible for tiny inputs.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .classes import ClassSpec
from .flim import LimitChain
from .skeletons import NonDiagonalCopy, Skeleton, enumerate_types, type_of
from .structures import RelStruct, find_embeddings, is_isomorphic
from .tmax import Copy, Node, induced_structure, level_nodes

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


class RealizationFailure(RuntimeError):
    """``reason`` is one of ``undetermined``, ``no-embedding``, ``insufficient-depth``."""

    def __init__(self, reason: str, detail: dict):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail


@dataclass
class RealizedTypes:
    witnesses: dict[str, Copy]
    non_diagonal_seen: int = 0
    expansions: int = 0

    @property
    def types(self) -> set[str]:
        return set(self.witnesses)


def _pair_matches(h: RelStruct, u: int, v: int, level: RelStruct, a: int, b: int) -> bool:
    for sym, pairs in h.relations.items():
        lp = level.relations[sym]
        if ((u, v) in pairs) != ((a, b) in lp) or ((v, u) in pairs) != ((b, a) in lp):
            return False
    return True


def _check_inputs(h: RelStruct, chain: LimitChain, depth: int):
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if chain.depth < depth - 1:
        raise BudgetExceeded(f"chain depth {chain.depth} too shallow for copies of length {depth}")
    if set(h.relations) != set(chain.class_spec.signature.symbols):
        raise ValueError("structure and chain use different signatures")
    if h.size >= 2 and depth == 0:
        raise BudgetExceeded("depth 0 leaves no room for meets")


def _record(out: RealizedTypes, h: RelStruct, c: Copy):
    skel = type_of(c)
    if not is_isomorphic(induced_structure(c), h):
        raise AssertionError(f"witness {c.to_json()} does not induce the target")
    out.witnesses.setdefault(skel.encode(), c)


def _realized_backtrack(h: RelStruct, chain: LimitChain, depth: int, budget: int) -> RealizedTypes:
    m = h.size
    out = RealizedTypes({})
    entries = [[] for _ in range(m)]

    def splits(block: tuple[int, ...], level: RelStruct, n: int):
        """(sub-blocks, successor indices) for every admissible split of ``block`` at level n."""
        for cuts in range(1, len(block)):
            for pts in itertools.combinations(range(1, len(block)), cuts):
                bounds = (0,) + pts + (len(block),)
                subs = [block[bounds[i]:bounds[i + 1]] for i in range(len(bounds) - 1)]
                chosen: list[int] = []

                def assign(p: int):
                    if p == len(subs):
                        yield tuple(chosen)
                        return
                    start = chosen[-1] + 1 if chosen else 0
                    for a in range(start, n + 1 - (len(subs) - p - 1)):
                        if all(_pair_matches(h, u, v, level, chosen[q], a)
                               for q in range(p) for u in subs[q] for v in subs[p]):
                            chosen.append(a)
                            yield from assign(p + 1)
                            chosen.pop()

                for idx in assign(0):
                    yield subs, idx

    def search(n: int, blocks: list[tuple[int, ...]]):
        out.expansions += 1
        if out.expansions > budget:
            raise BudgetExceeded(f"more than {budget} search nodes")
        open_blocks = [b for b in blocks if len(b) > 1]
        if not open_blocks:
            nodes = tuple(Node(e + [0] * (depth - len(e))) for e in entries)
            _record(out, h, Copy(nodes, chain))
            return
        if depth - n < len(open_blocks):
            return
        level = chain.levels[n]
        for bi, block in enumerate(blocks):
            if len(block) < 2:
                continue
            for subs, idx in splits(block, level, n):
                for sub, a in zip(subs, idx):
                    for leaf in sub:
                        entries[leaf].append(a)
                for other in blocks:
                    if other is not block:
                        for leaf in other:
                            entries[leaf].append(0)
                search(n + 1, blocks[:bi] + list(subs) + blocks[bi + 1:])
                for leaf in range(m):
                    entries[leaf].pop()
        for leaf in range(m):
            entries[leaf].append(0)
        search(n + 1, blocks)
        for leaf in range(m):
            entries[leaf].pop()

    if m == 1:
        _record(out, h, Copy((Node([0] * depth),), chain))
        return out
    search(0, [tuple(range(m))])
    return out


def _pair_tables(chain: LimitChain, depth: int):
    """Meet lengths and pair codes for all nodes of length ``depth``."""
    nodes = list(level_nodes(depth))
    arr = np.array(nodes, dtype=np.int16).reshape(len(nodes), depth)
    N = len(nodes)
    same = arr[:, None, :] == arr[None, :, :]
    ml = np.cumprod(same, axis=2).sum(axis=2)  # meet length; depth on the diagonal
    np.fill_diagonal(ml, 0)
    ii, jj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    a = arr[ii, ml] if depth else np.zeros((N, N), dtype=np.int16)
    b = arr[jj, ml] if depth else np.zeros((N, N), dtype=np.int16)
    code = np.zeros((N, N), dtype=np.int64)
    syms = chain.class_spec.signature.symbols
    for si, sym in enumerate(syms):
        table = np.zeros((depth, depth, depth), dtype=bool)
        for n in range(depth):
            for (x, y) in chain.levels[n].relations[sym]:
                table[n, x, y] = True
        fwd = table[ml, a, b]
        code |= fwd.astype(np.int64) << (2 * si)
        code |= fwd.T.astype(np.int64) << (2 * si + 1)
    np.fill_diagonal(code, -1)
    return nodes, ml, code


def _h_code(h: RelStruct, u: int, v: int) -> int:
    out = 0
    for si, pairs in enumerate(h.relations.values()):
        out |= int((u, v) in pairs) << (2 * si)
        out |= int((v, u) in pairs) << (2 * si + 1)
    return out


def _realized_raw(h: RelStruct, chain: LimitChain, depth: int) -> RealizedTypes:
    m = h.size
    if m >= 4 and depth >= 6 or m > 5 or depth > 6:
        raise BudgetExceeded(f"raw sweep refuses |H|={m} at depth {depth}")
    out = RealizedTypes({})
    if m == 1:
        return _realized_backtrack(h, chain, depth, DEFAULT_BUDGET)
    nodes, ml, code = _pair_tables(chain, depth)
    N = len(nodes)
    idx = np.arange(N)
    hc = [[_h_code(h, u, v) for v in range(m)] for u in range(m)]
    base = depth + 1
    last_pair = code == hc[m - 2][m - 1]
    upper = idx[:, None] < idx[None, :]

    def finish(chosen: list[int]):
        lo = chosen[-1] + 1 if chosen else 0
        cj = idx >= lo
        ck = idx >= lo
        for q, c in enumerate(chosen):
            cj &= code[c] == hc[q][m - 2]
            ck &= code[c] == hc[q][m - 1]
        grid = last_pair & upper & cj[:, None] & ck[None, :]
        J, K = np.nonzero(grid)
        if not len(J):
            return
        key = ml[J, K].astype(np.int64)
        for c in chosen:
            key = key * base + ml[c, J]
            key = key * base + ml[c, K]
        _, first, counts = np.unique(key, return_index=True, return_counts=True)
        for f, cnt in zip(first, counts):
            c = Copy(tuple(nodes[x] for x in chosen + [int(J[f]), int(K[f])]), chain)
            try:
                _record(out, h, c)
            except NonDiagonalCopy:
                out.non_diagonal_seen += int(cnt)

    def extend(chosen: list[int]):
        p = len(chosen)
        if p == m - 2:
            finish(chosen)
            return
        cand = idx > (chosen[-1] if chosen else -1)
        for q, c in enumerate(chosen):
            cand &= code[c] == hc[q][p]
        for x in np.nonzero(cand)[0]:
            chosen.append(int(x))
            extend(chosen)
            chosen.pop()

    extend([])
    return out


def realized_types(h: RelStruct, c: ClassSpec, depth: int, chain: LimitChain,
                   mode: str = "backtrack", budget: int = DEFAULT_BUDGET) -> RealizedTypes:
    """Types of copies of ``h`` among nodes of length ``depth``."""
    if chain.class_spec != c:
        raise ValueError("chain was built for a different class")
    _check_inputs(h, chain, depth)
    if mode == "backtrack":
        return _realized_backtrack(h, chain, depth, budget)
    if mode == "raw":
        return _realized_raw(h, chain, depth)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class RealizationProblem:
    skeleton: Skeleton
    target: RelStruct
    class_spec: ClassSpec
    chain: LimitChain
    max_depth: int


def _node_structure(h: RelStruct, blocks: list[list[int]]):
    k = len(blocks)
    rels = {sym: set() for sym in h.relations}
    for i, j in itertools.permutations(range(k), 2):
        for sym, pairs in h.relations.items():
            vals = {(u, v) in pairs for u in blocks[i] for v in blocks[j]}
            if len(vals) != 1:
                raise RealizationFailure("undetermined", {"children": [i, j], "symbol": sym})
            if vals.pop():
                rels[sym].add((i, j))
    return RelStruct(k, rels)


def realize(p: RealizationProblem) -> Copy:
    """Explicit copy of ``p.target`` with type ``p.skeleton`` and length ``p.max_depth``.

    Internal nodes are placed in rank order, each at the lowest level above the
    previous one whose level structure contains its children structure.  Level
    structures are nested, so taking the lowest level never loses a solution.
    """
    skel, h, chain = p.skeleton, p.target, p.chain
    if skel.leaves != h.size:
        raise ValueError("skeleton and target sizes differ")
    entries = [[0] * p.max_depth for _ in range(h.size)]
    prev = -1
    top = min(p.max_depth - 1, chain.depth)
    for rank, blocks in skel.internal_nodes():
        try:
            sub = _node_structure(h, blocks)
        except RealizationFailure as e:
            e.detail["node"] = rank
            raise
        placed = None
        for n in range(prev + 1, top + 1):
            emb = find_embeddings(sub, chain.levels[n])
            if emb:
                placed = (n, emb[0].map)
                break
        if placed is None:
            anywhere = any(find_embeddings(sub, chain.levels[n]) for n in range(top + 1))
            reason = "insufficient-depth" if anywhere else "no-embedding"
            raise RealizationFailure(reason, {"node": rank, "structure": sub.to_json(), "above_level": prev})
        n, image = placed
        for block, a in zip(blocks, image):
            for leaf in block:
                entries[leaf][n] = a
        prev = n
    c = Copy(tuple(Node(e) for e in entries), chain)
    if type_of(c) != skel or not is_isomorphic(induced_structure(c), h):
        raise AssertionError(f"realized copy {c.to_json()} does not round-trip")
    return c


@dataclass
class ComparisonReport:
    enumerated: list[str]
    realized: list[str]
    witnesses: dict[str, dict] = field(default_factory=dict)
    non_diagonal_seen: int = 0
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def missing(self) -> list[str]:
        got = set(self.realized)
        return [s for s in self.enumerated if s not in got]

    @property
    def extra(self) -> list[str]:
        want = set(self.enumerated)
        return sorted(s for s in self.realized if s not in want)

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra

    def to_json(self) -> dict:
        return {
            "enumerated": self.enumerated,
            "realized": self.realized,
            "missing": self.missing,
            "extra": self.extra,
            "witnesses": self.witnesses,
            "nonDiagonalSeen": self.non_diagonal_seen,
        }


def cross_check(h: RelStruct, c: ClassSpec, depth: int, chain: LimitChain,
                budget: int = DEFAULT_BUDGET, raw: bool = False) -> ComparisonReport:
    enumerated = enumerate_types(h, c)
    found = realized_types(h, c, depth, chain, "backtrack", budget)
    order = {s.encode(): s for s in enumerated}
    realized = sorted(found.types, key=lambda t: order[t].sort_key() if t in order else Skeleton.parse(t).sort_key())
    report = ComparisonReport([s.encode() for s in enumerated], realized)
    if raw:
        swept = realized_types(h, c, depth, chain, "raw")
        report.non_diagonal_seen = swept.non_diagonal_seen
        if swept.types != found.types:
            raise AssertionError(f"raw sweep {sorted(swept.types)} disagrees with backtracking {realized}")
    for s in enumerated:
        try:
            report.witnesses[s.encode()] = realize(RealizationProblem(s, h, c, chain, depth)).to_json()
        except RealizationFailure as e:
            report.failures[s.encode()] = e.reason
    for t in report.extra:
        report.witnesses[t] = found.witnesses[t].to_json()
    return report
