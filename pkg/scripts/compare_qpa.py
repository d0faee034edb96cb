"""Best [[4,2]] versus best [[2,1]] yield per fidelity, plus two fixed [[4,2]] encoders.

Columns: the per-F optimum over all 3,855,600 [[4,2]] candidates, the per-F
optimum over all 90 [[2,1]] candidates, the worked-example encoder for
<XXXX, ZZZZ>, and the default encoder for the same stabilizer.
"""

from __future__ import annotations

import argparse
import logging

from stabedp.edp import best_point, fidelity_grid, yield_table
from stabedp.encoder import ProtocolSpec, default_class
from stabedp.search import SearchConfig, search

EXAMPLE = ('{"p":2,"n":4,"k":2,"xi":[[1,1,1,1,0,0,0,0],[0,0,0,0,1,1,1,1]],'
           '"eta_high":[[0,0,0,0,0,1,0,1],[0,1,0,1,0,0,1,1]],'
           '"xi_high":[[0,0,1,1,0,0,0,0],[0,1,0,1,0,0,0,0]],"lambda":[0,0],"T":[[0,0]]}')


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f-min", type=float, default=0.6)
    ap.add_argument("--f-max", type=float, default=0.95)
    ap.add_argument("--f-step", type=float, default=0.05)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="compare_qpa.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    grid = tuple(fidelity_grid(args.f_min, args.f_max, args.f_step))
    best42 = search(SearchConfig(n=4, k=2, F_eval=grid, F_star=grid[0], top=1, workers=args.workers)).maxima
    best21 = search(SearchConfig(n=2, k=1, F_eval=grid, F_star=grid[0], top=1)).maxima
    example = ProtocolSpec.from_json(EXAMPLE)
    default = ProtocolSpec.from_class(example.stabilizer, default_class(example.stabilizer))

    lines = ["F,best_42,best_21,example_42,default_42"]
    for F, a, b in zip(grid, best42, best21):
        ex = best_point(yield_table(example, F, 8)).yield_
        de = best_point(yield_table(default, F, 8)).yield_
        lines.append(f"{F!r},{a!r},{b!r},{ex!r},{de!r}")
        print(f"F={F:.2f}  best[[4,2]]={a:.7f}  best[[2,1]]={b:.7f}  example={ex:.7f}  default={de:.7f}"
              f"  {'>' if a > b else ('=' if a == b else '<')}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
