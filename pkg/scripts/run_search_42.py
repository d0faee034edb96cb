"""Exhaustive [[4,2]] search at one fidelity; writes ranked JSON records."""

from __future__ import annotations

import argparse
import logging
import time

from stabedp.search import SearchConfig, results_text, search, summary_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fidelity", type=float, default=0.85)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--top", type=int, default=100)
    ap.add_argument("--checkpoint")
    ap.add_argument("--symmetry", action="store_true")
    ap.add_argument("--out", default="results_42.jsonl")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = SearchConfig(n=4, k=2, p=2, F_eval=(args.fidelity,), F_star=args.fidelity, top=args.top,
                       workers=args.workers, checkpoint=args.checkpoint, symmetry=args.symmetry)
    t0 = time.perf_counter()
    result = search(cfg)
    with open(args.out, "w") as fh:
        fh.write(results_text(result))
    print(summary_table(result))
    print(f"wrote {args.out} in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
