"""Gadget structures H̄ that contain H and force every copy to split at one node.

Vertices are named ``v_0 .. v_{N-1}`` in the order of H̄, matching point indices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .classes import ClassSpec, ClassViolation, forbidden_witness, membership
from .flim import LimitChain, _transitive_closure, load_or_build
from .oracle import BudgetExceeded, realized_types
from .skeletons import enumerate_types
from .structures import RelStruct, induced_substructure, is_isomorphic

log = logging.getLogger(__name__)

FLAVORS = ("free", "ot", "opo")


@dataclass(frozen=True)
class Gadget:
    base: RelStruct
    extended: RelStruct
    host: tuple[int, ...]
    flavor: str
    trivial: bool = False

    def to_json(self) -> dict:
        out = self.extended.to_json()
        out.update(host=list(self.host), flavor=self.flavor, trivial=self.trivial)
        return out


def _place(h: RelStruct, host: list[int]) -> dict[str, set]:
    return {sym: {(host[a], host[b]) for a, b in pairs} for sym, pairs in h.relations.items()}


def build_gadget_free(h: RelStruct, c: ClassSpec) -> Gadget:
    """H on the odd vertices plus an R0-path ``v_0, v_2, ..., v_2m`` on the evens."""
    if not c.is_free:
        raise ValueError(f"{c.name} is not a free amalgamation class")
    if not membership(h, c):
        raise ClassViolation(f"{h} is not in {c.name}")
    m = h.size
    host = [2 * i + 1 for i in range(m)]
    rels = _place(h, host)
    r0 = c.signature.symbols[0]
    for i in range(0, 2 * m - 1, 2):
        rels[r0].add((i, i + 2))
        if c.signature.symmetric[0]:
            rels[r0].add((i + 2, i))
    ext = RelStruct(2 * m + 1, rels)
    if not membership(ext, c):
        witness = forbidden_witness(ext, c) if c.kind == "forb" else None
        raise ClassViolation(f"gadget {ext} is not in {c.name}; forbidden copy {witness}")
    return Gadget(h, ext, tuple(host), "free")


def build_gadget_ot(h: RelStruct) -> Gadget:
    if not membership(h, ClassSpec.ot()):
        raise ClassViolation(f"{h} is not a tournament")
    m = h.size
    n = 2 * m + 1
    host = [2 * i + 1 for i in range(m)]
    r = _place(h, host)["R0"]
    evens = range(0, n, 2)
    odds = range(1, n, 2)
    for i in evens:
        for j in evens:
            if i < j:
                r.add((i, j) if j == i + 2 else (j, i))
        for j in odds:
            r.add((j, i) if i < j else (i, j))
    ext = RelStruct(n, {"R0": r})
    assert membership(ext, ClassSpec.ot()), "gadget is not a tournament"
    return Gadget(h, ext, tuple(host), "ot")


def build_gadget_opo(h: RelStruct) -> Gadget:
    """H on ``v_2, v_4, ..., v_2m`` with an order scaffold on the rest, for m >= 2."""
    if not membership(h, ClassSpec.opo()):
        raise ClassViolation(f"{h} is not an ordered partial order")
    m = h.size
    if m < 2:
        return Gadget(h, h, tuple(range(m)), "opo", trivial=True)
    n = 2 * m + 3
    host = [2 * i + 2 for i in range(m)]
    r = _place(h, host)["R0"]
    scaffold = {(0, 3), (2 * m - 1, 2 * m + 2)} | {(i, i + 4) for i in range(1, 2 * m - 2, 2)}
    ext = RelStruct(n, {"R0": _transitive_closure(r | scaffold)})
    assert membership(ext, ClassSpec.opo()), "closure broke antisymmetry"
    return Gadget(h, ext, tuple(host), "opo")


def build_gadget(h: RelStruct, c: ClassSpec) -> Gadget:
    if c.is_free:
        return build_gadget_free(h, c)
    if c.kind == "ot":
        return build_gadget_ot(h)
    return build_gadget_opo(h)


@dataclass
class VerificationReport:
    skeletons: list[str]
    single_node: bool
    host_ok: bool
    member: bool
    depth: int = 0
    oracle_mode: str | None = None
    oracle_types: list[str] = field(default_factory=list)
    oracle_single: bool | None = None
    non_diagonal_seen: int = 0
    budget_exceeded: bool = False

    @property
    def ok(self) -> bool:
        return self.single_node and self.host_ok and self.member and self.oracle_single is not False

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "skeletons": self.skeletons,
            "singleSplittingNode": self.single_node,
            "hostEmbedding": self.host_ok,
            "membership": self.member,
            "depth": self.depth,
            "oracle": None if self.oracle_mode is None else {
                "mode": self.oracle_mode,
                "types": self.oracle_types,
                "singleSplittingNode": self.oracle_single,
                "nonDiagonalSeen": self.non_diagonal_seen,
            },
            "budgetExceeded": self.budget_exceeded,
        }


def verify_gadget(g: Gadget, c: ClassSpec, depth: int = 0, chain: LimitChain | None = None,
                  budget: int = 200_000, raw: bool | None = None) -> VerificationReport:
    """Check that every copy of ``g.extended`` has a single splitting node.

    The enumerator answers for all depths at once.  With ``depth > 0`` the
    oracle also looks at actual copies in T_max; the raw sweep (which sees
    non-diagonal copies too) is used by default when it is cheap enough.
    """
    ext = g.extended
    member = membership(ext, c)
    host_ok = is_isomorphic(induced_substructure(ext, g.host), g.base)
    skels = enumerate_types(ext, c) if member else []
    report = VerificationReport(
        [s.encode() for s in skels],
        bool(skels) and all(s.internal_count <= 1 for s in skels),
        host_ok, member, depth)
    if depth <= 0 or not member or ext.size < 2:
        return report
    if chain is None:
        chain = load_or_build(c, depth)
    if raw is None:
        raw = ext.size <= 5 and depth <= 5
    report.oracle_mode = "raw" if raw else "backtrack"
    try:
        found = realized_types(ext, c, depth, chain, report.oracle_mode, budget)
    except BudgetExceeded as e:
        log.warning("gadget oracle stopped: %s", e)
        report.budget_exceeded = True
        return report
    report.oracle_types = sorted(found.types)
    report.non_diagonal_seen = found.non_diagonal_seen
    single = "(0: " + " ".join(f"l{i}" for i in range(ext.size)) + ")"
    report.oracle_single = found.types <= {single} and found.non_diagonal_seen == 0
    return report
