"""Depth-first enumeration of the simple static rotated scheme, checked against the frontier DP.

    python3 scripts/enumerate_simple_static.py --d 5 --workers 4
"""

from __future__ import annotations

import argparse
import time

from artifact.cli import parse_pb
from artifact.engine import enumerate_static, exact_static
from artifact.schemes import build_static


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--pb", default="1/2")
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--split-depth", type=int, default=6)
    args = ap.parse_args()
    p_b = parse_pb(args.pb)
    scheme = build_static("simple", params=(args.d, args.d))
    t0 = time.perf_counter()
    dp = exact_static(scheme, p_b).success_probability
    t1 = time.perf_counter()
    dfs = enumerate_static(scheme, p_b, workers=args.workers, split_depth=args.split_depth)
    t2 = time.perf_counter()
    print(f"d={args.d} P_B={p_b}")
    print(f"frontier DP    {dp}  ({t1 - t0:.2f} s)")
    print(f"depth first    {dfs}  ({t2 - t1:.2f} s, {args.workers} workers)")
    print("agree" if dp == dfs else "DISAGREE")
    raise SystemExit(0 if dp == dfs else 1)


if __name__ == "__main__":
    main()
