"""Deterministic finite segments of the Fraisse limit of a class.

Points are added one at a time.  Each new point realizes the oldest
unsatisfied *demand*: a base set of existing points together with a
one-point extension of the structure induced on it.  Demands are queued FIFO,
stage by stage: when point ``j`` appears, every base set containing ``j`` is
enqueued, ordered by size and then colexicographically, each with its
descriptors in canonical order.  While placing a point, later queued demands
that are compatible with the choices made so far are adopted greedily
(first fit within a bounded lookahead window, newest stage first) so that one
point serves many demands.  The oldest unsatisfied demand is always served,
which keeps the schedule fair.  Pairs not fixed by any adopted demand are completed by a
class-specific rule: no relation for free classes, a forward arrow (earlier to
later in the linear order) for tournaments, transitive closure for partial
orders.

The enumeration order above is the whole source of canonicity; changing it
changes every golden value, so it is versioned by ``GENERATOR_VERSION``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .classes import (
    IN,
    OUT,
    ClassSpec,
    ExtensionDescriptor,
    iter_extensions,
    members,
    membership,
)
from .structures import RelStruct, embeds, structure_from_json

log = logging.getLogger(__name__)

GENERATOR_VERSION = "fifo-newest-first-1"
LOOKAHEAD = 1024


class ChainTooShort(ValueError):
    def __init__(self, message: str, witness: RelStruct | None = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Demand:
    """Request for a point attached to ``base`` as described by ``descriptor``.

    ``base`` lists enumeration indices in the linear order of the structure, so
    ``descriptor.states[i]`` refers to ``base[i]``.
    """

    ident: int
    stage: int
    base: tuple[int, ...]
    descriptor: ExtensionDescriptor

    def to_json(self) -> dict:
        return {"id": self.ident, "stage": self.stage, "base": list(self.base),
                "descriptor": self.descriptor.to_json()}


@dataclass(frozen=True)
class LimitChain:
    """``raw[n]`` lives on ``0..n`` in enumeration order with ``order[n][i]`` the
    position of point ``i`` in the linear order; ``levels[n]`` is the same
    structure relabelled so that the linear order is the natural one."""

    class_spec: ClassSpec
    raw: tuple[RelStruct, ...]
    order: tuple[tuple[int, ...], ...]
    levels: tuple[RelStruct, ...]
    log: tuple[dict, ...]
    version: str = GENERATOR_VERSION

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def truncate(self, depth: int) -> "LimitChain":
        if depth > self.depth:
            raise ChainTooShort(f"chain has depth {self.depth}, asked for {depth}")
        return LimitChain(self.class_spec, self.raw[:depth + 1], self.order[:depth + 1],
                          self.levels[:depth + 1], tuple(e for e in self.log if e["point"] <= depth),
                          self.version)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "class": self.class_spec.to_json(),
            "depth": self.depth,
            "raw": [{"structure": r.to_json(), "order": list(o)} for r, o in zip(self.raw, self.order)],
            "levels": [lv.to_json() for lv in self.levels],
            "log": list(self.log),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> "LimitChain":
        spec = ClassSpec.from_json(data["class"])
        sig = spec.signature
        raw = tuple(structure_from_json(r["structure"], sig)[0] for r in data["raw"])
        order = tuple(tuple(r["order"]) for r in data["raw"])
        levels = tuple(structure_from_json(lv, sig)[0] for lv in data["levels"])
        return cls(spec, raw, order, levels, tuple(data["log"]), data["version"])


class _Builder:
    def __init__(self, spec: ClassSpec, lookahead: int):
        self.spec = spec
        self.sig = spec.signature
        self.lookahead = lookahead
        self.n = 1
        self.rels: dict[str, set] = {sym: set() for sym in self.sig.symbols}
        self.line: list[int] = [0]  # enumeration indices in linear order
        self.pending: deque[Demand] = deque()
        self.stages: deque[Iterator[Demand]] = deque()
        self.next_id = 0
        self.front = 0  # every demand with a smaller id is satisfied
        self.stages.append(self._stage(0))
        self.log: list[dict] = []

    # demand generation -------------------------------------------------

    def _bases(self, j: int) -> Iterator[tuple[int, ...]]:
        if j == 0:
            yield ()
        for size in range(1, j + 2):
            rest = sorted(itertools.combinations(range(j), size - 1), key=lambda c: tuple(reversed(c)))
            for c in rest:
                yield c + (j,)

    def _stage(self, j: int) -> Iterator[Demand]:
        for base in self._bases(j):
            pos = self._positions()
            in_order = tuple(sorted(base, key=pos.__getitem__))
            sub = self._induced(in_order)
            for desc in iter_extensions(sub, self.spec):
                d = Demand(self.next_id, j, in_order, desc)
                self.next_id += 1
                yield d

    def _materialize(self, k: int) -> bool:
        while len(self.pending) < k:
            if not self.stages:
                return False
            d = next(self.stages[0], None)
            if d is None:
                self.stages.popleft()
                continue
            self.pending.append(d)
        return True

    # structure access --------------------------------------------------

    def _positions(self) -> dict[int, int]:
        return {v: p for p, v in enumerate(self.line)}

    def _induced(self, in_order: tuple[int, ...]) -> RelStruct:
        idx = {v: k for k, v in enumerate(in_order)}
        return RelStruct(len(in_order), {
            sym: frozenset((idx[a], idx[b]) for a, b in pairs if a in idx and b in idx)
            for sym, pairs in self.rels.items()
        })

    def _state(self, rels, x: int, y: int) -> tuple[int, ...]:
        return tuple((OUT if (x, y) in rels[s] else 0) | (IN if (y, x) in rels[s] else 0)
                     for s in self.sig.symbols)

    def _loops(self, rels, x: int) -> tuple[bool, ...]:
        return tuple((x, x) in rels[s] for s in self.sig.symbols)

    def _gap_range(self, d: Demand, pos: dict[int, int]) -> tuple[int, int]:
        # gap g means "insert before the point currently at position g"
        r = d.descriptor.rank
        lo = pos[d.base[r - 1]] + 1 if r > 0 else 0
        hi = pos[d.base[r]] if r < len(d.base) else len(self.line)
        return lo, hi

    def _realized_by(self, d: Demand, x: int, pos: dict[int, int], rels) -> bool:
        if x in d.base:
            return False
        lo, hi = self._gap_range(d, pos)
        if not lo <= pos[x] < hi:
            return False
        if self._loops(rels, x) != d.descriptor.loops:
            return False
        return all(self._state(rels, x, b) == st for b, st in zip(d.base, d.descriptor.states))

    def _satisfied(self, d: Demand) -> bool:
        pos = self._positions()
        return any(self._realized_by(d, x, pos, self.rels) for x in range(self.n))

    # one step ----------------------------------------------------------

    def _candidate(self, assigned: dict[int, tuple[int, ...]], loops: tuple[bool, ...], gap: int):
        """Full relation sets and line after adding point ``n`` per the plan."""
        x = self.n
        rels = {s: set(p) for s, p in self.rels.items()}
        line = self.line[:gap] + [x] + self.line[gap:]
        pos = {v: p for p, v in enumerate(line)}
        for y in range(x):
            st = assigned.get(y)
            if st is None:
                if self.spec.kind == "ot":
                    st = (IN,) if pos[y] < pos[x] else (OUT,)
                else:
                    st = (0,) * len(self.sig.symbols)
            for si, sym in enumerate(self.sig.symbols):
                if st[si] & OUT:
                    rels[sym].add((x, y))
                if st[si] & IN:
                    rels[sym].add((y, x))
        for si, sym in enumerate(self.sig.symbols):
            if loops[si]:
                rels[sym].add((x, x))
        if self.spec.kind == "opo":
            rels["R0"] = _transitive_closure(rels["R0"])
        return rels, line

    def _check(self, assigned, loops, gap, adopted) -> tuple[dict, list] | None:
        rels, line = self._candidate(assigned, loops, gap)
        pos = {v: p for p, v in enumerate(line)}
        perm = [pos[i] for i in range(self.n + 1)]
        canon = RelStruct(self.n + 1, {s: frozenset((perm[a], perm[b]) for a, b in p) for s, p in rels.items()})
        if not membership(canon, self.spec):
            return None
        x = self.n
        for s, p in rels.items():
            # the closure may never add pairs between existing points
            if len(p) - sum(1 for a, b in p if x in (a, b)) != len(self.rels[s]):
                return None
        for d in adopted:
            if self._loops(rels, x) != d.descriptor.loops:
                return None
            if any(self._state(rels, x, b) != st for b, st in zip(d.base, d.descriptor.states)):
                return None
        return rels, line

    def step(self):
        while True:
            if not self._materialize(1):
                raise RuntimeError("demand queue exhausted")
            primary = self.pending.popleft()
            if not self._satisfied(primary):
                break
        self.front = primary.ident
        pos = self._positions()
        assigned = dict(zip(primary.base, primary.descriptor.states))
        loops = primary.descriptor.loops
        lo, hi = self._gap_range(primary, pos)
        adopted = [primary]
        result = self._check(assigned, loops, lo, adopted)
        if result is None:
            raise RuntimeError(f"demand {primary} cannot be realized")

        self._materialize(self.lookahead)
        window = [d for d in itertools.islice(self.pending, self.lookahead) if not self._satisfied(d)]
        rest = list(itertools.islice(self.pending, self.lookahead, None))
        # newest stages first: attaching the new point to recent points keeps levels dense
        for d in sorted(window, key=lambda d: (-d.stage, d.ident)):
            if d.descriptor.loops != loops:
                continue
            dlo, dhi = self._gap_range(d, pos)
            nlo, nhi = max(lo, dlo), min(hi, dhi)
            if nlo > nhi:
                continue
            if any(assigned.get(b, st) != st for b, st in zip(d.base, d.descriptor.states)):
                continue
            trial = dict(assigned)
            trial.update(zip(d.base, d.descriptor.states))
            res = self._check(trial, loops, nlo, adopted + [d])
            if res is None:
                continue
            assigned, lo, hi, result = trial, nlo, nhi, res
            adopted.append(d)
        self.pending = deque(window + rest)

        self.rels, self.line = {s: set(p) for s, p in result[0].items()}, result[1]
        self.log.append({"point": self.n, "gap": lo, "primary": primary.ident,
                         "demands": [d.to_json() for d in adopted]})
        self.n += 1
        self.stages.append(self._stage(self.n - 1))

    def snapshot(self) -> tuple[RelStruct, tuple[int, ...], RelStruct]:
        raw = RelStruct(self.n, {s: frozenset(p) for s, p in self.rels.items()})
        pos = self._positions()
        order = tuple(pos[i] for i in range(self.n))
        return raw, order, raw.relabel(order)


def _transitive_closure(pairs: set) -> set:
    closure = set(pairs)
    changed = True
    while changed:
        changed = False
        succ: dict[int, set] = {}
        for a, b in closure:
            succ.setdefault(a, set()).add(b)
        for a, b in list(closure):
            for c in succ.get(b, ()):
                if (a, c) not in closure:
                    closure.add((a, c))
                    changed = True
    return closure


def build_chain(spec: ClassSpec, depth: int, lookahead: int = LOOKAHEAD) -> LimitChain:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    b = _Builder(spec, lookahead)
    raws, orders, levels = [], [], []
    for n in range(depth + 1):
        if n > 0:
            b.step()
        raw, order, level = b.snapshot()
        raws.append(raw)
        orders.append(order)
        levels.append(level)
    return LimitChain(spec, tuple(raws), tuple(orders), tuple(levels), tuple(b.log))


def level_structure(chain: LimitChain, n: int) -> RelStruct:
    if not 0 <= n <= chain.depth:
        raise ChainTooShort(f"level {n} outside chain of depth {chain.depth}")
    return chain.levels[n]


def universality_budget(chain: LimitChain, s: int) -> int:
    """Least N such that every member of size <= s embeds into ``levels[N]``."""
    need = 0
    for size in range(1, s + 1):
        for f in members(chain.class_spec, size):
            n = next((n for n, lv in enumerate(chain.levels) if embeds(f, lv)), None)
            if n is None:
                raise ChainTooShort(f"{f} does not embed into any of {chain.depth + 1} levels", f)
            need = max(need, n)
    return need


def cache_key(spec: ClassSpec, version: str = GENERATOR_VERSION) -> str:
    text = json.dumps({"class": spec.to_json(), "version": version}, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def load_or_build(spec: ClassSpec, depth: int, cache_dir: str | Path | None = None) -> LimitChain:
    """Chain of the requested depth, reusing a cached deeper chain when present.

    Builds are prefix-stable (level ``n`` never depends on later levels), so a
    cached chain is truncated rather than rebuilt.
    """
    if cache_dir is None:
        return build_chain(spec, depth)
    path = Path(cache_dir) / f"chain-{cache_key(spec)}.json"
    if path.exists():
        chain = LimitChain.from_json(json.loads(path.read_text()))
        if chain.version == GENERATOR_VERSION and chain.depth >= depth:
            return chain.truncate(depth)
    chain = build_chain(spec, depth)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(chain.dumps())
    log.info("cached chain for %s at depth %d in %s", spec.name, depth, path)
    return chain
