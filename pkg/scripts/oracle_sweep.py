"""Cross-check the enumerator against both oracle modes for every small member of a class.

Example:  python scripts/oracle_sweep.py --class ot --depth 6
"""

import argparse
import time

from bigramsey.cli import parse_class
from bigramsey.classes import members
from bigramsey.flim import load_or_build
from bigramsey.oracle import cross_check


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--class", dest="cls", default="og")
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--max-size", type=int, default=3)
    ap.add_argument("--no-raw", action="store_true", help="skip the numpy raw sweep")
    ap.add_argument("--chain-cache", default=None)
    args = ap.parse_args()

    spec = parse_class(args.cls)
    chain = load_or_build(spec, args.depth - 1, args.chain_cache)
    total = bad = 0
    t0 = time.time()
    for m in range(1, args.max_size + 1):
        for h in members(spec, m):
            raw = not args.no_raw and m >= 2 and (m <= 3 or args.depth <= 5)
            r = cross_check(h, spec, args.depth, chain, raw=raw)
            total += 1
            bad += not r.ok
            status = "ok " if r.ok else "BAD"
            print(f"{status} {str(h):45s} enumerated={len(r.enumerated)} realized={len(r.realized)}"
                  f" missing={r.missing} extra={r.extra} raw={'yes' if raw else 'no'}")
    print(f"{spec.name} depth {args.depth}: {total - bad}/{total} agree ({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
