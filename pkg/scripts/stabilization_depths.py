"""Smallest copy length at which the oracle agrees with the enumerator on every
member of size <= 3, per class.  Writes the fixture used by the test suite."""

import argparse
import json
import time
from pathlib import Path

from bigramsey.classes import ClassSpec, members
from bigramsey.flim import build_chain
from bigramsey.oracle import cross_check

CLASSES = {
    "og": ClassSpec.og(),
    "og_3": ClassSpec.og_k(3),
    "oog": ClassSpec.oog(),
    "ot": ClassSpec.ot(),
    "opo": ClassSpec.opo(),
}


def stabilization_depth(spec: ClassSpec, max_depth: int, max_size: int = 3) -> tuple[int | None, list[int]]:
    chain = build_chain(spec, max_depth)
    hs = [h for m in range(1, max_size + 1) for h in members(spec, m)]
    history = []
    for depth in range(1, max_depth + 1):
        bad = sum(1 for h in hs if not cross_check(h, spec, depth, chain).ok)
        history.append(bad)
        if bad == 0:
            return depth, history
    return None, history


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-depth", type=int, default=18)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "tests/golden/stabilization.json")
    args = ap.parse_args()
    result = {}
    for name, spec in CLASSES.items():
        t = time.time()
        depth, history = stabilization_depth(spec, args.max_depth)
        result[name] = {"depth": depth, "disagreeing_by_depth": history}
        print(f"{name:5s} stabilizes at {depth}  ({time.time() - t:.1f}s)  disagreements per depth {history}")
    args.out.write_text(json.dumps(result, indent=2) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
