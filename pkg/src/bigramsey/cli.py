"""Command-line front end.

Exit codes: 0 ok, 1 assertion failed, 2 invalid input, 3 class violation,
4 budget exceeded.  Output is deterministic: no timestamps, stable key order.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .classes import ClassSpec, ClassViolation, membership
from .flim import ChainTooShort, LimitChain, load_or_build
from .gadgets import Gadget, build_gadget, verify_gadget
from .oracle import BudgetExceeded, RealizationFailure, RealizationProblem, cross_check, realize
from .skeletons import Skeleton, enumerate_types, skeletons, type_of
from .structures import RelStruct, SignatureMismatch, structure_from_json
from .tmax import level_count, level_nodes

OK, FAILED, INVALID, VIOLATION, BUDGET = 0, 1, 2, 3, 4
COMMANDS = ("types", "skeletons", "gadget", "verify-gadget", "realize", "oracle", "flim", "tmax-level")


class InvalidInput(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    class_arg: str | None = None
    structure_arg: str | None = None
    depth: int = 0
    chain_cache: str | None = None
    fmt: str = "json"
    verify: bool = False
    budget: int = 2_000_000
    skeleton: str | None = None
    leaves: int | None = None
    raw: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInput(f"unknown command {self.command!r}")
        if self.depth < 0:
            raise InvalidInput("--depth must be >= 0")


def _load_json(arg: str):
    """Inline JSON, or the path of a JSON file."""
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        path = Path(arg)
        if not path.is_file():
            raise InvalidInput(f"{arg!r} is neither inline JSON nor a readable file")
        text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"bad JSON in {arg!r}: {e}") from e


def parse_class(arg: str | None) -> ClassSpec:
    if not arg:
        raise InvalidInput("--class is required")
    if arg in ("og", "oog", "ot", "opo"):
        return ClassSpec.from_json({"kind": arg})
    if arg.startswith("og_") and arg[3:].isdigit():
        return ClassSpec.og_k(int(arg[3:]))
    try:
        return ClassSpec.from_json(_load_json(arg))
    except (KeyError, TypeError) as e:
        raise InvalidInput(f"malformed class: {e}") from e


def parse_structure(arg: str | None, c: ClassSpec) -> RelStruct:
    if not arg:
        raise InvalidInput("--structure is required")
    try:
        s, _ = structure_from_json(_load_json(arg), c.signature)
    except (KeyError, TypeError, IndexError) as e:
        raise InvalidInput(f"malformed structure: {e}") from e
    return s


def _member(arg: str | None, c: ClassSpec) -> RelStruct:
    s = parse_structure(arg, c)
    if not membership(s, c):
        raise ClassViolation(f"{s} is not in {c.name}")
    return s


def _chain(cfg: RunConfig, c: ClassSpec, depth: int) -> LimitChain:
    return load_or_build(c, max(depth, 0), cfg.chain_cache)


# --- dot emission -------------------------------------------------------

def _dot_tree(skel: Skeleton, prefix: str, labels: list[str] | None = None) -> list[str]:
    lines = []

    def walk(t) -> str:
        if isinstance(t, int):
            name = f"{prefix}l{t}"
            label = f"l{t}" if labels is None else f"l{t} {labels[t]}"
            lines.append(f'  {name} [shape=box, label="{label}"];')
            return name
        rank, children = t
        name = f"{prefix}n{rank}"
        lines.append(f'  {name} [shape=circle, label="{rank}"];')
        for ch in children:
            lines.append(f"  {name} -> {walk(ch)};")
        return name

    walk(skel.root)
    return lines


def skeletons_dot(skels: list[Skeleton], name: str = "types") -> str:
    out = [f"digraph {name} {{"]
    for i, s in enumerate(skels):
        out.append(f"  subgraph cluster_{i} {{")
        out.append(f'  label="{s.encode()}";')
        out.extend(_dot_tree(s, f"t{i}_"))
        out.append("  }")
    out.append("}")
    return "\n".join(out)


def structure_dot(s: RelStruct, symmetric: bool, host: tuple[int, ...] = (), name: str = "structure") -> str:
    kind, arrow = ("graph", "--") if symmetric else ("digraph", "->")
    out = [f"{kind} {name} {{", "  rankdir=LR;"]
    for v in range(s.size):
        style = ", style=filled" if v in host else ""
        out.append(f'  v{v} [label="v{v}"{style}];')
    for sym, pairs in s.relations.items():
        for a, b in sorted(pairs):
            if symmetric and a > b:
                continue
            out.append(f'  v{a} {arrow} v{b} [label="{sym}"];')
    out.append("}")
    return "\n".join(out)


# --- commands -----------------------------------------------------------

def cmd_types(cfg: RunConfig):
    c = parse_class(cfg.class_arg)
    h = _member(cfg.structure_arg, c)
    skels = enumerate_types(h, c)
    if cfg.fmt == "dot":
        return OK, skeletons_dot(skels)
    if cfg.fmt == "text":
        return OK, "\n".join([f"count {len(skels)}"] + [s.encode() for s in skels])
    return OK, {"count": len(skels), "types": [s.encode() for s in skels]}


def cmd_skeletons(cfg: RunConfig):
    if cfg.leaves is None or cfg.leaves < 1:
        raise InvalidInput("--leaves must be >= 1")
    skels = skeletons(cfg.leaves)
    if cfg.fmt == "dot":
        return OK, skeletons_dot(skels, "skeletons")
    if cfg.fmt == "text":
        return OK, "\n".join(s.encode() for s in skels)
    return OK, {"count": len(skels), "skeletons": [s.encode() for s in skels]}


def _gadget(cfg: RunConfig, verify: bool):
    c = parse_class(cfg.class_arg)
    h = _member(cfg.structure_arg, c)
    g: Gadget = build_gadget(h, c)
    payload = g.to_json()
    code = OK
    if verify:
        chain = _chain(cfg, c, cfg.depth - 1) if cfg.depth > 0 else None
        report = verify_gadget(g, c, cfg.depth, chain, cfg.budget)
        payload["verification"] = report.to_json()
        if not report.ok:
            code = FAILED
        elif report.budget_exceeded:
            code = BUDGET
    if cfg.fmt == "dot":
        return code, structure_dot(g.extended, c.signature.symmetric[0], g.host, "gadget")
    if cfg.fmt == "text":
        lines = [f"flavor {g.flavor}", f"size {g.extended.size}", f"host {list(g.host)}", str(g.extended)]
        if verify:
            lines += [f"ok {payload['verification']['ok']}"] + payload["verification"]["skeletons"]
        return code, "\n".join(lines)
    return code, payload


def cmd_gadget(cfg: RunConfig):
    return _gadget(cfg, cfg.verify)


def cmd_verify_gadget(cfg: RunConfig):
    return _gadget(cfg, True)


def cmd_realize(cfg: RunConfig):
    c = parse_class(cfg.class_arg)
    h = _member(cfg.structure_arg, c)
    if not cfg.skeleton:
        raise InvalidInput("--skeleton is required")
    skel = Skeleton.parse(cfg.skeleton)
    if skel.leaves != h.size:
        raise InvalidInput(f"skeleton has {skel.leaves} leaves, structure has {h.size} points")
    chain = _chain(cfg, c, cfg.depth - 1)
    try:
        copy = realize(RealizationProblem(skel, h, c, chain, cfg.depth))
    except RealizationFailure as e:
        return FAILED, {"skeleton": skel.encode(), "failure": e.reason, "detail": e.detail}
    nodes = [str(n) for n in copy.nodes]
    if cfg.fmt == "dot":
        return OK, "\n".join(["digraph realization {"] + _dot_tree(type_of(copy), "", nodes) + ["}"])
    if cfg.fmt == "text":
        return OK, "\n".join([skel.encode()] + nodes)
    return OK, {"skeleton": skel.encode(), "copy": copy.to_json(), "nodes": nodes}


def cmd_oracle(cfg: RunConfig):
    c = parse_class(cfg.class_arg)
    h = _member(cfg.structure_arg, c)
    if cfg.depth == 0 and h.size >= 2:
        raise BudgetExceeded("depth 0 leaves no room for meets")
    chain = _chain(cfg, c, cfg.depth - 1)
    report = cross_check(h, c, cfg.depth, chain, cfg.budget, raw=cfg.raw)
    code = OK if report.ok else FAILED
    if cfg.fmt == "text":
        return code, "\n".join([
            f"enumerated {len(report.enumerated)}", f"realized {len(report.realized)}",
            f"missing {report.missing}", f"extra {report.extra}"])
    return code, report.to_json()


def cmd_flim(cfg: RunConfig):
    c = parse_class(cfg.class_arg)
    chain = _chain(cfg, c, cfg.depth)
    if cfg.fmt == "text":
        return OK, "\n".join(f"levels[{n}] {lv}" for n, lv in enumerate(chain.levels))
    return OK, chain.to_json()


def cmd_tmax_level(cfg: RunConfig):
    n = cfg.depth
    nodes = [str(t) for t in level_nodes(n)]
    if cfg.fmt == "text":
        return OK, "\n".join([f"count {level_count(n)}"] + nodes)
    return OK, {"level": n, "count": level_count(n), "nodes": nodes}


HANDLERS = {
    "types": cmd_types,
    "skeletons": cmd_skeletons,
    "gadget": cmd_gadget,
    "verify-gadget": cmd_verify_gadget,
    "realize": cmd_realize,
    "oracle": cmd_oracle,
    "flim": cmd_flim,
    "tmax-level": cmd_tmax_level,
}
DOT_COMMANDS = {"types", "skeletons", "gadget", "verify-gadget", "realize"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bigramsey", description="Big Ramsey degree types over the coding tree T_max.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--class", dest="class_arg", help="class name (og, og_3, oog, ot, opo), inline JSON or file")
    p.add_argument("--structure", help="structure as inline JSON or file")
    p.add_argument("--depth", type=int, default=0, help="node length / chain depth / level")
    p.add_argument("--chain-cache", help="directory for cached chains")
    p.add_argument("--format", dest="fmt", choices=("json", "dot", "text"), default="json")
    p.add_argument("--verify", action="store_true", help="verify the gadget after building it")
    p.add_argument("--budget", type=int, default=2_000_000, help="oracle search-node budget")
    p.add_argument("--skeleton", help="skeleton in canonical text form (realize)")
    p.add_argument("--leaves", type=int, help="number of leaves (skeletons)")
    p.add_argument("--raw", action="store_true", help="also run the raw sweep (oracle)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _emit(payload) -> str:
    if isinstance(payload, str):
        return payload
    return json.dumps(payload, indent=2)


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return OK if e.code == 0 else INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=err)
    try:
        cfg = RunConfig(args.command, args.class_arg, args.structure, args.depth, args.chain_cache,
                        args.fmt, args.verify, args.budget, args.skeleton, args.leaves, args.raw)
        if cfg.fmt == "dot" and cfg.command not in DOT_COMMANDS:
            raise InvalidInput(f"--format dot is not available for {cfg.command}")
        code, payload = HANDLERS[cfg.command](cfg)
    except ClassViolation as e:
        print(f"class violation: {e}", file=err)
        return VIOLATION
    except (BudgetExceeded, ChainTooShort) as e:
        print(f"budget exceeded: {e}", file=err)
        return BUDGET
    except (InvalidInput, SignatureMismatch, ValueError, IndexError) as e:
        print(f"invalid input: {e}", file=err)
        return INVALID
    print(_emit(payload), file=out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
