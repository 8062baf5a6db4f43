"""Distribution of T(H, F_max) over all members of each class, by size."""

import argparse
from collections import Counter

from bigramsey.classes import ClassSpec, members
from bigramsey.skeletons import enumerate_types, skeletons

CLASSES = [ClassSpec.og(), ClassSpec.og_k(3), ClassSpec.oog(), ClassSpec.ot(), ClassSpec.opo()]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-size", type=int, default=4)
    args = ap.parse_args()
    for m in range(1, args.max_size + 1):
        print(f"size {m}: {len(skeletons(m))} skeletons")
        for spec in CLASSES:
            counts = Counter(len(enumerate_types(h, spec)) for h in members(spec, m))
            hist = "  ".join(f"{k}:{v}" for k, v in sorted(counts.items()))
            print(f"  {spec.name:5s} {sum(counts.values()):5d} members   count:members  {hist}")


if __name__ == "__main__":
    main()
